use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Evidence, PairRecord};

pub const CSV_HEADER: &str = "step,primary,primary_index,partner,partner_index,level,lo,hi,evidence";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Jsonl,
    Csv,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" => Ok(ExportFormat::Jsonl),
            "csv" => Ok(ExportFormat::Csv),
            other => Err(format!("unknown export format {other:?}")),
        }
    }
}

/// Evidence column: the tag, then any payload after a colon.
fn evidence_cell(e: &Evidence) -> String {
    match e {
        Evidence::TopLevel => e.tag().to_string(),
        Evidence::NextLevelEmpty { .. } => e.tag().to_string(),
        Evidence::NextLevelExhausted { members } => {
            let list: Vec<_> = members.iter().map(ToString::to_string).collect();
            format!("{}:{}", e.tag(), list.join(" "))
        }
        Evidence::BudgetCaveat { budget } => format!("{}:{budget}", e.tag()),
    }
}

pub(crate) fn write_records<W: Write>(records: &[PairRecord], format: ExportFormat, mut sink: W) -> io::Result<()> {
    match format {
        ExportFormat::Jsonl => {
            for r in records {
                serde_json::to_writer(&mut sink, r)?;
                sink.write_all(b"\n")?;
            }
        }
        ExportFormat::Csv => {
            writeln!(sink, "{CSV_HEADER}")?;
            for r in records {
                writeln!(
                    sink,
                    "{},{},{},{},{},{},{},{},{}",
                    r.step,
                    r.primary,
                    r.primary_index,
                    r.partner,
                    r.partner_index,
                    r.level,
                    r.interval.lo(),
                    r.interval.hi(),
                    evidence_cell(&r.evidence)
                )?;
            }
        }
    }
    sink.flush()
}

#[cfg(test)]
mod tests {
    use super::super::{BuilderConfig, BuilderState};
    use super::*;
    use crate::numerics::Rational;
    use crate::sets::SetSpec;

    fn state(steps: usize) -> BuilderState {
        let r = Rational::frac;
        let cfg = BuilderConfig::new(
            SetSpec::odd_denominator(r(0, 1), r(1, 1)).unwrap(),
            SetSpec::dyadics(r(0, 1), r(1, 1)).unwrap(),
        );
        let mut s = BuilderState::init(cfg).unwrap();
        s.run(steps).unwrap();
        s
    }

    #[test]
    fn csv_rows() {
        let csv = state(2).export_string(ExportFormat::Csv);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "0,1/2,0,3/4,2,0,-1/1+1/1*sqrt2,+inf,top-level");
        assert_eq!(lines[2], "1,1/4,1,1/8,3,1,-inf,1/3,top-level");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn jsonl_rows() {
        let out = state(1).export_string(ExportFormat::Jsonl);
        let first: serde_json::Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
        assert_eq!(first["primary"], "1/2");
        assert_eq!(first["partner"], "3/4");
        assert_eq!(first["level"], 0);
        assert_eq!(first["interval"]["hi"], "+inf");
        assert_eq!(first["evidence"]["kind"], "top-level");
    }

    #[test]
    fn byte_identical_reruns() {
        assert_eq!(state(100).export_string(ExportFormat::Jsonl), state(100).export_string(ExportFormat::Jsonl));
    }
}
