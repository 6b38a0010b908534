use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use involute_core::analysis::{
    continuity_check, discontinuity_certificate, naive_reference, property_suite, sigma_suite, ContinuityParams,
    Explorer, SigmaSuiteParams, Side,
};
use involute_core::sigma::{chain_from_target, ChainRecipe, DenseSplit, SigmaConfig};
use involute_core::{BuilderConfig, BuilderState, OpenInterval, Rational, Separator, SetSpec};

fn r(p: i64, q: i64) -> Rational {
    Rational::frac(p, q)
}

fn cfg() -> BuilderConfig {
    BuilderConfig::new(
        SetSpec::odd_denominator(r(0, 1), r(1, 1)).unwrap(),
        SetSpec::dyadics(r(0, 1), r(1, 1)).unwrap(),
    )
}

fn built(steps: usize) -> BuilderState {
    let mut s = BuilderState::init(cfg()).unwrap();
    s.run(steps).unwrap();
    s
}

fn build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build");
    group.sample_size(10);
    for steps in [200, 1000, 2000] {
        group.bench_with_input(BenchmarkId::from_parameter(steps), &steps, |b, &n| b.iter(|| built(black_box(n))));
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("naive_reference");
    group.sample_size(10);
    group.bench_function("100", |b| b.iter(|| naive_reference(&cfg(), black_box(100)).unwrap()));
    group.finish();
}

fn analysis(c: &mut Criterion) {
    let state = built(600);
    let mut group = c.benchmark_group("analysis");
    group.sample_size(10);
    group.bench_function("property_suite_600", |b| b.iter(|| property_suite(&state, 600)));
    group.bench_function("certificate_1_2", |b| b.iter(|| discontinuity_certificate(&state, &r(1, 2)).unwrap()));
    group.bench_function("continuity_1_3", |b| {
        b.iter(|| {
            let mut ex = Explorer::new(&state, 10_000);
            continuity_check(&mut ex, &r(1, 3), Side::Below, &ContinuityParams::default()).unwrap()
        })
    });
    group.finish();
}

fn sigma(c: &mut Criterion) {
    let x = SetSpec::all_rationals(r(0, 1), r(1, 1)).unwrap();
    let chain = chain_from_target(ChainRecipe::OpenIntervalTarget { u: r(1, 4), w: r(3, 4) }, &x).unwrap();
    let cfg = SigmaConfig { x, split: DenseSplit::Dyadic, chain };
    let mut group = c.benchmark_group("sigma");
    group.sample_size(10);
    group.bench_function("suite_200", |b| b.iter(|| sigma_suite(&cfg, &SigmaSuiteParams::default())));
    group.finish();
}

fn primitives(c: &mut Criterion) {
    let g = Separator::sqrt2_minus_one();
    let q = r(29_289, 70_711);
    c.bench_function("separator_cmp", |b| b.iter(|| black_box(&g).cmp_rational(black_box(&q))));
    let f = SetSpec::dyadics(r(0, 1), r(1, 1)).unwrap();
    let within = OpenInterval::rational(r(1, 3), r(1, 3) + r(1, 1 << 20)).unwrap();
    c.bench_function("first_available_narrow", |b| {
        b.iter(|| f.first_available(black_box(&within), &Default::default(), 0).unwrap())
    });
}

criterion_group!(benches, build, oracle, analysis, sigma, primitives);
criterion_main!(benches);
