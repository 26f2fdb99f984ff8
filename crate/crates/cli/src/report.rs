//! Report records and their text and JSON renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use reflekt_core::{Matrix, Scalar};
use serde::{Deserialize, Serialize};

use crate::config::ConfigEcho;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// A matrix serialized as rows of canonical scalar strings.
pub type Grid = Vec<Vec<String>>;

pub fn grid(m: &Matrix) -> Grid {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x.to_string()).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub inputs: BTreeMap<String, String>,
    pub residual_nonzero_entries: usize,
    pub scale: Option<String>,
    pub derived: BTreeMap<String, Grid>,
    pub notes: Vec<String>,
    pub error: Option<String>,
    /// Seconds; not covered by the determinism contract.
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: ConfigEcho,
    pub checks: Vec<CheckRecord>,
}

/// What a check computes before it is turned into a record.
#[derive(Debug, Default)]
pub struct Outcome {
    pub inputs: BTreeMap<String, String>,
    pub residuals: Vec<Matrix>,
    pub scale: Option<Scalar>,
    pub derived: Vec<(String, Matrix)>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn input(mut self, k: &str, v: impl ToString) -> Outcome {
        self.inputs.insert(k.into(), v.to_string());
        self
    }

    pub fn residual(mut self, m: Matrix) -> Outcome {
        self.residuals.push(m);
        self
    }

    pub fn derive(mut self, name: &str, m: &Matrix) -> Outcome {
        self.derived.push((name.into(), m.clone()));
        self
    }

    pub fn note(mut self, s: impl Into<String>) -> Outcome {
        self.notes.push(s.into());
        self
    }

    pub fn record(self, name: &str, wall_time: f64) -> CheckRecord {
        let nz: usize = self.residuals.iter().map(Matrix::nonzero_count).sum();
        CheckRecord {
            name: name.into(),
            status: if nz == 0 { Status::Pass } else { Status::Fail },
            inputs: self.inputs,
            residual_nonzero_entries: nz,
            scale: self.scale.map(|s| s.to_string()),
            derived: self.derived.iter().map(|(k, m)| (k.clone(), grid(m))).collect(),
            notes: self.notes,
            error: None,
            wall_time,
        }
    }
}

pub fn failed(name: &str, err: String, wall_time: f64) -> CheckRecord {
    CheckRecord {
        name: name.into(),
        status: Status::Fail,
        inputs: BTreeMap::new(),
        residual_nonzero_entries: 0,
        scale: None,
        derived: BTreeMap::new(),
        notes: vec![],
        error: Some(err),
        wall_time,
    }
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(
            out,
            "reflekt {}: {} {} model={} tau={} spin={} sites={} seed={}",
            self.version,
            c.verb,
            c.suites.join(" "),
            c.model,
            c.tau,
            c.spin,
            c.sites,
            c.seed
        );
        for r in &self.checks {
            let tag = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            let _ = write!(
                out,
                "{tag} {:<14} nonzero residual entries {}",
                r.name, r.residual_nonzero_entries
            );
            if let Some(s) = &r.scale {
                let _ = write!(out, ", scale {s}");
            }
            let _ = writeln!(out, " ({:.3}s)", r.wall_time);
            if let Some(e) = &r.error {
                let _ = writeln!(out, "    error: {e}");
            }
            for n in &r.notes {
                let _ = writeln!(out, "    {n}");
            }
            for (k, g) in &r.derived {
                let _ = writeln!(out, "    {k} =");
                for row in g {
                    let _ = writeln!(out, "      [{}]", row.join(", "));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_residuals() {
        let ok = Outcome::default().residual(Matrix::zeros(2, 2)).record("a", 0.0);
        assert_eq!(ok.status, Status::Pass);
        let bad = Outcome::default()
            .residual(Matrix::identity(2))
            .record("b", 0.0);
        assert_eq!(bad.status, Status::Fail);
        assert_eq!(bad.residual_nonzero_entries, 2);
    }

    #[test]
    fn grid_uses_canonical_strings() {
        let x: Scalar = "(xi - z^2)/(xi*z^2 - 1)".parse().unwrap();
        let g = grid(&Matrix::diag(vec![Scalar::one(), x.clone()]));
        assert_eq!(g[1][1], x.to_string());
        assert_eq!(g[0][1], "0");
    }
}
