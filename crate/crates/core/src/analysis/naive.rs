//! A slow, independent replay of the construction used as an oracle.
//!
//! Ladders are plain sorted vectors, one per level, and every search is a
//! linear walk over the enumeration from index 0. Census is consulted only
//! to know when a walk may stop.

use std::collections::HashSet;

use super::AnalysisError;
use crate::builder::{BuilderConfig, BuilderError, Evidence, PairRecord};
use crate::numerics::{ExtendedPoint, OpenInterval, Rational};
use crate::sets::{Census, SetError, SetSpec};

/// Enumeration entries one walk may visit.
pub const NAIVE_SCAN_CAP: u64 = 1 << 22;

/// The first `n + 1` records (seed included) recomputed from scratch.
pub fn naive_reference(config: &BuilderConfig, n: usize) -> Result<Vec<PairRecord>, AnalysisError> {
    if config.q.has_external() || config.f.has_external() {
        return Err(AnalysisError::InfeasibleForOpaqueSets);
    }
    let g = config.separator()?;
    let f = &config.f;

    let x0 = f.enumerate(0)?;
    let gp = ExtendedPoint::Sep(g);
    let side_of = |x: &Rational| {
        let xp = ExtendedPoint::Fin(x.clone());
        if xp < gp {
            OpenInterval::new(ExtendedPoint::NegInf, gp.clone())
        } else {
            OpenInterval::new(gp.clone(), ExtendedPoint::PosInf)
        }
        .map_err(BuilderError::from)
    };
    let side = side_of(&x0)?;
    let (p0_index, p0) = walk(f, &side, |q| *q == x0)?.1.ok_or(BuilderError::SeedPartnerMissing)?;

    let mut ladder = vec![
        ExtendedPoint::NegInf,
        ExtendedPoint::PosInf,
        gp.clone(),
        ExtendedPoint::Fin(x0.clone()),
        ExtendedPoint::Fin(p0.clone()),
    ];
    if let Some(y) = q_point(&config.q, 0)? {
        ladder.push(ExtendedPoint::Fin(y));
    }
    ladder.sort();
    let mut ladders = vec![ladder];
    let mut paired: HashSet<Rational> = [x0.clone(), p0.clone()].into();
    let mut records = vec![PairRecord {
        step: 0,
        primary: x0,
        primary_index: 0,
        partner: p0,
        partner_index: p0_index,
        level: 0,
        interval: side,
        evidence: Evidence::TopLevel,
    }];

    for step in 0..n {
        let (x_index, x) = least_unpaired(f, &paired)?.ok_or(BuilderError::FExhausted { steps: step })?;
        let current = ladders.last().expect("seed ladder").clone();
        let used = |q: &Rational| *q == x || current.binary_search(&ExtendedPoint::Fin(q.clone())).is_ok();

        let mut chosen = None;
        let mut above: Option<(Census, Vec<Rational>)> = None;
        for level in (0..=step + 1).rev() {
            let interval = if level == 0 { side_of(&x)? } else { around(&ladders[level - 1], &x)? };
            let (seen, hit) = walk(f, &interval, used)?;
            if let Some((i, p)) = hit {
                chosen = Some((level, interval, i, p));
                break;
            }
            above = Some((f.census(&interval), seen));
        }
        let (level, interval, partner_index, partner) =
            chosen.ok_or_else(|| BuilderError::NoFeasibleLevel { primary: x.clone() })?;
        let evidence = match above {
            None => Evidence::TopLevel,
            Some((Census::Empty, _)) => Evidence::NextLevelEmpty { census: Census::Empty },
            Some((_, members)) => Evidence::NextLevelExhausted { members },
        };

        let mut next = current;
        next.push(ExtendedPoint::Fin(x.clone()));
        next.push(ExtendedPoint::Fin(partner.clone()));
        if let Some(y) = q_point(&config.q, step as u64 + 1)? {
            next.push(ExtendedPoint::Fin(y));
        }
        next.sort();
        ladders.push(next);
        paired.insert(x.clone());
        paired.insert(partner.clone());
        records.push(PairRecord {
            step: step + 1,
            primary: x,
            primary_index: x_index,
            partner,
            partner_index,
            level,
            interval,
            evidence,
        });
    }
    Ok(records)
}

fn around(ladder: &[ExtendedPoint], x: &Rational) -> Result<OpenInterval, AnalysisError> {
    let xp = ExtendedPoint::Fin(x.clone());
    let lo = ladder.iter().rev().find(|p| **p < xp).cloned();
    let hi = ladder.iter().find(|p| **p > xp).cloned();
    match (lo, hi) {
        (Some(lo), Some(hi)) => Ok(OpenInterval::new(lo, hi).map_err(BuilderError::from)?),
        _ => Err(BuilderError::Inconsistent(format!("{x} is not bracketed by the ladder")).into()),
    }
}

fn q_point(q: &SetSpec, i: u64) -> Result<Option<Rational>, AnalysisError> {
    match q.enumerate(i) {
        Ok(y) => Ok(Some(y)),
        Err(SetError::IndexOutOfRange { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn least_unpaired(f: &SetSpec, paired: &HashSet<Rational>) -> Result<Option<(u64, Rational)>, AnalysisError> {
    for i in 0..NAIVE_SCAN_CAP {
        match f.enumerate(i) {
            Ok(q) if !paired.contains(&q) => return Ok(Some((i, q))),
            Ok(_) => {}
            Err(SetError::IndexOutOfRange { .. }) => return Ok(None),
            Err(e) => return Err(e.into()),
        }
    }
    Err(SetError::ScanCapExceeded { cap: NAIVE_SCAN_CAP }.into())
}

type Hit = Option<(u64, Rational)>;

/// Walk the enumeration for the first member of `within` not rejected by
/// `used`, also collecting the members seen before it.
fn walk(f: &SetSpec, within: &OpenInterval, used: impl Fn(&Rational) -> bool) -> Result<(Vec<Rational>, Hit), AnalysisError> {
    let census = f.census(within);
    let mut seen = Vec::new();
    if census == Census::Empty {
        return Ok((seen, None));
    }
    for i in 0..NAIVE_SCAN_CAP {
        if let Census::Finite(k) = census {
            if seen.len() as u64 == k {
                return Ok((seen, None));
            }
        }
        let q = match f.enumerate(i) {
            Ok(q) => q,
            Err(SetError::IndexOutOfRange { .. }) => return Ok((seen, None)),
            Err(e) => return Err(e.into()),
        };
        if within.contains_rational(&q) {
            if !used(&q) {
                return Ok((seen, Some((i, q))));
            }
            seen.push(q);
        }
    }
    Err(SetError::ScanCapExceeded { cap: NAIVE_SCAN_CAP }.into())
}
