use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use log::info;
use serde_json::{json, Value};

use involute_core::analysis::{
    continuity_check, discontinuity_certificate_with, naive_equivalence, property_suite, sigma_suite, Explorer, Side,
    SuiteReport, Verdict,
};
use involute_core::builder::evaluate;
use involute_core::config::{parse_config, Mode, OutputFormat, RunConfig};
use involute_core::sigma::SigmaConfig;
use involute_core::{BuilderConfig, BuilderState, ExportFormat, ExtendedPoint, Rational};

use crate::error::{CliError, VERIFICATION_FAILED};
use crate::Common;

/// Records compared against the naive oracle by `verify`.
const NAIVE_DEPTH: usize = 300;

pub enum Outcome {
    Ok,
    ChecksFailed,
}

impl Outcome {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Outcome::Ok => ExitCode::SUCCESS,
            Outcome::ChecksFailed => ExitCode::from(VERIFICATION_FAILED),
        }
    }

    fn from_passed(passed: bool) -> Self {
        if passed {
            Outcome::Ok
        } else {
            Outcome::ChecksFailed
        }
    }
}

pub fn dispatch(mode: Mode, args: &Common) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|source| CliError::Io { path: args.config.display().to_string(), source })?;
    let cfg = parse_config(&text, args.config.parent())?;
    if let Some(declared) = cfg.mode {
        if declared != mode {
            return Err(CliError::Usage(format!("config declares mode {declared}, but `{mode}` was requested")));
        }
    }
    let run = Run { cfg, args };
    match mode {
        Mode::Build => run.build(),
        Mode::Eval => run.eval(),
        Mode::Verify => run.verify(),
        Mode::Witness => run.witness(),
        Mode::Sigma => run.sigma(),
        Mode::Export => run.export(),
    }
}

struct Run<'a> {
    cfg: RunConfig,
    args: &'a Common,
}

impl Run<'_> {
    fn steps(&self) -> usize {
        self.args.steps.unwrap_or(self.cfg.steps)
    }

    fn format(&self, default: OutputFormat) -> OutputFormat {
        self.args.format.or(self.cfg.output.format).unwrap_or(default)
    }

    fn points(&self) -> Result<Vec<Rational>, CliError> {
        let points = if self.args.points.is_empty() { self.cfg.points.clone() } else { self.args.points.clone() };
        if points.is_empty() {
            return Err(CliError::Usage("no points given; pass --point or list them under \"points\"".into()));
        }
        Ok(points)
    }

    fn builder_config(&self) -> Result<&BuilderConfig, CliError> {
        self.cfg.builder.as_ref().ok_or_else(|| CliError::Usage("the config has no \"builder\" section".into()))
    }

    fn sigma_config(&self) -> Result<&SigmaConfig, CliError> {
        self.cfg.sigma.as_ref().ok_or_else(|| CliError::Usage("the config has no \"sigma\" section".into()))
    }

    fn built(&self) -> Result<BuilderState, CliError> {
        let mut state = BuilderState::init(self.builder_config()?.clone())?;
        state.run(self.steps())?;
        info!("built {} steps, {} pairs", state.step_count(), state.pairs().len() / 2);
        Ok(state)
    }

    fn emit(&self, content: &str) -> Result<(), CliError> {
        let target = self.args.out.as_deref().or(self.cfg.output.path.as_deref());
        match target {
            Some(path) => write_file(path, content),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(content.as_bytes())
                    .and_then(|()| out.flush())
                    .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
            }
        }
    }

    fn build(&self) -> Result<Outcome, CliError> {
        let format = match self.format(OutputFormat::Jsonl) {
            OutputFormat::Jsonl => ExportFormat::Jsonl,
            OutputFormat::Csv => ExportFormat::Csv,
            OutputFormat::Json => return Err(CliError::Usage("build writes jsonl or csv".into())),
        };
        let state = self.built()?;
        self.emit(&state.export_string(format))?;
        Ok(Outcome::Ok)
    }

    fn eval(&self) -> Result<Outcome, CliError> {
        let cfg = self.builder_config()?;
        let mut out = String::new();
        for p in self.points()? {
            let value = evaluate(cfg, &p, self.cfg.eval_cap)?;
            out.push_str(&format!("{value}\n"));
        }
        self.emit(&out)?;
        Ok(Outcome::Ok)
    }

    fn verify(&self) -> Result<Outcome, CliError> {
        let state = self.built()?;
        let mut report = property_suite(&state, state.step_count());
        if let Some(check) = naive_equivalence(&state, NAIVE_DEPTH) {
            report.checks.push(check);
        }
        log_report(&report);
        self.emit(&pretty(&report))?;
        Ok(Outcome::from_passed(report.passed()))
    }

    fn witness(&self) -> Result<Outcome, CliError> {
        let state = self.built()?;
        let cfg = state.config().clone();
        let mut explorer = Explorer::new(&state, state.step_count() + self.cfg.eval_cap as usize);
        let mut reports = Vec::new();
        let mut passed = true;
        for p in self.points()? {
            if cfg.f.contains(&p) {
                explorer.image(&p)?;
                let cert = discontinuity_certificate_with(&mut explorer, &p, self.cfg.certificate_samples)?;
                eprint!("{cert}");
                let holds = cert.holds(self.cfg.certificate_samples);
                passed &= holds;
                reports.push(json!({ "point": p, "kind": "certificate", "holds": holds, "certificate": cert }));
            } else {
                for side in [Side::Below, Side::Above] {
                    let report = match continuity_check(&mut explorer, &p, side, &self.cfg.continuity) {
                        Ok(r) => r,
                        Err(involute_core::analysis::AnalysisError::CapExceeded { partial, .. }) => *partial,
                        Err(e) => return Err(e.into()),
                    };
                    passed &= report.verdict != Verdict::Failed;
                    reports.push(json!({ "point": p, "kind": "continuity", "report": report }));
                }
            }
        }
        let text = match self.format(OutputFormat::Json) {
            OutputFormat::Json => pretty(&reports),
            OutputFormat::Jsonl => lines(&reports),
            OutputFormat::Csv => return Err(CliError::Usage("witness writes json or jsonl".into())),
        };
        self.emit(&text)?;
        Ok(Outcome::from_passed(passed))
    }

    fn sigma(&self) -> Result<Outcome, CliError> {
        let sigma = self.sigma_config()?;
        let mut points: Vec<Rational> = sigma.x.iter().take(self.cfg.sigma_suite.samples).map(|(_, q)| q).collect();
        points.extend(self.cfg.points.iter().chain(&self.args.points).cloned());
        let report = sigma_suite(sigma, &self.cfg.sigma_suite);
        log_report(&report);
        let text = match self.format(OutputFormat::Csv) {
            OutputFormat::Csv => sigma.value_table(&points).map_err(involute_core::analysis::AnalysisError::from)?,
            OutputFormat::Json | OutputFormat::Jsonl => {
                let rows = points
                    .iter()
                    .map(|p| {
                        let level = sigma.level(p)?;
                        let value = sigma.value(p)?;
                        Ok(json!({ "x": p, "class": sigma.split.classify(p), "level": level, "value": value }))
                    })
                    .collect::<Result<Vec<Value>, involute_core::sigma::SigmaError>>()
                    .map_err(involute_core::analysis::AnalysisError::from)?;
                pretty(&json!({ "table": rows, "suite": report }))
            }
        };
        self.emit(&text)?;
        Ok(Outcome::from_passed(report.passed()))
    }

    fn export(&self) -> Result<Outcome, CliError> {
        let state = self.built()?;
        let rows: Vec<(Rational, Rational, &str)> = state
            .history()
            .iter()
            .filter_map(|p| match p {
                ExtendedPoint::Fin(x) => {
                    let fx = state.image(x)?;
                    let source = if state.config().q.contains(x) { "Q" } else { "F" };
                    Some((x.clone(), fx, source))
                }
                _ => None,
            })
            .collect();
        let text = match self.format(OutputFormat::Csv) {
            OutputFormat::Csv => {
                let mut s = String::from("x,fx,source\n");
                for (x, fx, source) in &rows {
                    s.push_str(&format!("{x},{fx},{source}\n"));
                }
                s
            }
            format => {
                let values: Vec<Value> =
                    rows.iter().map(|(x, fx, source)| json!({ "x": x, "fx": fx, "source": source })).collect();
                if format == OutputFormat::Json {
                    pretty(&values)
                } else {
                    lines(&values)
                }
            }
        };
        self.emit(&text)?;
        Ok(Outcome::Ok)
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn lines(values: &[Value]) -> String {
    values.iter().map(|v| format!("{v}\n")).collect()
}

fn log_report(report: &SuiteReport) {
    for c in &report.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        info!("{status} {} ({} checked)", c.name, c.checked);
    }
    info!("{} suite finished in {} ms", report.suite, report.runtime_ms);
}
