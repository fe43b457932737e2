use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Strictness factor: a difference counts only when it exceeds this many
/// uncertainties.
pub const STRICT_FACTOR: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    /// Conjecture probes only: no violation beyond tolerance.
    InconclusiveSupporting,
    /// Conjecture probes only: a violation beyond tolerance.
    CounterexampleCandidate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
            Verdict::InconclusiveSupporting => "inconclusive-supporting",
            Verdict::CounterexampleCandidate => "counterexample-candidate",
        }
    }
}

/// Result of one experiment. `rows` follow `columns`; scalar outputs that
/// are not per-row (uncertainties, ratios) go to `metrics`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub name: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metrics: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub tolerance_used: f64,
    pub seeds: Vec<u64>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        ExperimentReport {
            schema_version: REPORT_SCHEMA_VERSION,
            name: name.to_string(),
            parameters: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metrics: BTreeMap::new(),
            verdict: Verdict::Inconclusive,
            tolerance_used: 0.0,
            seeds: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.parameters.insert(key.to_string(), v);
        self
    }

    pub fn metric(&mut self, key: &str, value: f64) -> &mut Self {
        self.metrics.insert(key.to_string(), value);
        self
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// CSV with a header row; values in shortest round-trip form.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Verdict for a sweep: every consecutive step between distinct parameters
/// must move in `dir` by more than `STRICT_FACTOR * uncertainty`; steps
/// between equal parameters must stay within that band. A clear step the
/// wrong way fails; anything else is inconclusive.
pub fn monotone_verdict(params: &[f64], values: &[f64], dir: Direction, uncertainty: f64) -> Verdict {
    let band = STRICT_FACTOR * uncertainty;
    let mut verdict = Verdict::Pass;
    for k in 1..values.len().min(params.len()) {
        let d = values[k] - values[k - 1];
        let signed = match dir {
            Direction::Increasing => d,
            Direction::Decreasing => -d,
        };
        if params[k] == params[k - 1] {
            if d.abs() > band {
                verdict = Verdict::Fail;
            }
        } else if signed < -band {
            verdict = Verdict::Fail;
        } else if signed <= band && verdict == Verdict::Pass {
            verdict = Verdict::Inconclusive;
        }
    }
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_rules() {
        let p = [0.0, 1.0, 2.0];
        assert_eq!(monotone_verdict(&p, &[1.0, 2.0, 3.0], Direction::Increasing, 0.1), Verdict::Pass);
        assert_eq!(monotone_verdict(&p, &[1.0, 1.2, 3.0], Direction::Increasing, 0.1), Verdict::Inconclusive);
        assert_eq!(monotone_verdict(&p, &[1.0, 0.0, 3.0], Direction::Increasing, 0.1), Verdict::Fail);
        assert_eq!(monotone_verdict(&p, &[3.0, 2.0, 1.0], Direction::Decreasing, 0.1), Verdict::Pass);
        assert_eq!(monotone_verdict(&[0.5, 0.5], &[1.0, 1.0], Direction::Increasing, 0.0), Verdict::Pass);
        assert_eq!(monotone_verdict(&[0.5], &[1.0], Direction::Increasing, 0.0), Verdict::Pass);
        assert_eq!(monotone_verdict(&[], &[], Direction::Increasing, 0.0), Verdict::Pass);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut r = ExperimentReport::new("x", &["t", "tau1"]);
        r.push_row(vec![0.0, 0.125]);
        assert_eq!(r.to_csv(), "t,tau1\n0.0,0.125\n");
        let json = serde_json::to_string(&r).unwrap();
        let back: ExperimentReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
