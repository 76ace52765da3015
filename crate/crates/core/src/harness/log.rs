use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::mission::{RateBounds, Vec3};

/// State of every agent after one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    /// `s_1`, `ℓ_1`, `u_0` of each agent's plan.
    pub gamma: Vec<f64>,
    pub gamma_dot: Vec<f64>,
    pub gamma_ddot: Vec<f64>,
    pub position: Vec<Vec3>,
    pub correction: Vec<f64>,
    pub solve_time: Vec<f64>,
    /// Upper triangle of the link weights used during the step.
    pub topology: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub name: String,
    pub h: f64,
    pub initial_gamma: Vec<f64>,
    pub bounds: Vec<RateBounds>,
    pub steps: Vec<StepRecord>,
}

pub const CSV_HEADER: [&str; 12] = [
    "step",
    "t",
    "agent",
    "gamma",
    "gamma_dot",
    "gamma_ddot",
    "x",
    "y",
    "z",
    "correction",
    "solve_time",
    "degree",
];

/// One agent at one step, as written to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub step: usize,
    pub t: f64,
    pub agent: usize,
    pub gamma: f64,
    pub gamma_dot: f64,
    pub gamma_ddot: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub correction: f64,
    pub solve_time: f64,
    /// Sum of the agent's link weights.
    pub degree: f64,
}

impl RunLog {
    pub fn agents(&self) -> usize {
        self.initial_gamma.len()
    }

    fn degree(&self, record: &StepRecord, i: usize) -> f64 {
        let n = self.agents();
        let mut k = 0;
        let mut deg = 0.0;
        for a in 0..n {
            for b in a + 1..n {
                if a == i || b == i {
                    deg += record.topology[k];
                }
                k += 1;
            }
        }
        deg
    }

    pub fn rows(&self) -> Vec<CsvRow> {
        let mut out = Vec::with_capacity(self.steps.len() * self.agents());
        for (k, r) in self.steps.iter().enumerate() {
            for i in 0..self.agents() {
                out.push(CsvRow {
                    step: k + 1,
                    t: r.t,
                    agent: i,
                    gamma: r.gamma[i],
                    gamma_dot: r.gamma_dot[i],
                    gamma_ddot: r.gamma_ddot[i],
                    x: r.position[i].x,
                    y: r.position[i].y,
                    z: r.position[i].z,
                    correction: r.correction[i],
                    solve_time: r.solve_time[i],
                    degree: self.degree(r, i),
                });
            }
        }
        out
    }

    /// SHA-256 over every logged value except the wall-clock solve times.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        let mut put = |x: f64| hasher.update(x.to_bits().to_le_bytes());
        put(self.h);
        self.initial_gamma.iter().copied().for_each(&mut put);
        for r in &self.steps {
            put(r.t);
            for series in [&r.gamma, &r.gamma_dot, &r.gamma_ddot, &r.correction, &r.topology] {
                series.iter().copied().for_each(&mut put);
            }
            for p in &r.position {
                p.iter().copied().for_each(&mut put);
            }
        }
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// `max_{i,j} |γ_i − γ_j|` at `t = 0` and after every step.
    pub fn spread(&self) -> Vec<(f64, f64)> {
        let spread = |g: &[f64]| {
            let max = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = g.iter().copied().fold(f64::INFINITY, f64::min);
            max - min
        };
        std::iter::once((0.0, spread(&self.initial_gamma)))
            .chain(self.steps.iter().map(|r| (r.t, spread(&r.gamma))))
            .collect()
    }

    pub fn solve_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().flat_map(|r| r.solve_time.iter().copied())
    }
}

/// First time after which the spread stays within `eps` until the end.
pub fn consensus_time(log: &RunLog, eps: f64) -> Option<f64> {
    let spread = log.spread();
    match spread.iter().rposition(|(_, s)| *s > eps) {
        None => Some(0.0),
        Some(last) => spread.get(last + 1).map(|(t, _)| *t),
    }
}

/// Smallest actual separation over all steps and pairs, and its per-step series.
pub fn min_pairwise_distance(log: &RunLog) -> (f64, Vec<f64>) {
    let series: Vec<f64> = log
        .steps
        .iter()
        .map(|r| {
            let mut m = f64::INFINITY;
            for i in 0..r.position.len() {
                for j in i + 1..r.position.len() {
                    m = m.min((r.position[i] - r.position[j]).norm());
                }
            }
            m
        })
        .collect();
    (series.iter().copied().fold(f64::INFINITY, f64::min), series)
}

/// A logged rate or input outside its bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundViolation {
    pub step: usize,
    pub agent: usize,
    pub quantity: &'static str,
    pub value: f64,
}

/// Re-checks every logged `(ℓ_1, u_0)` against the agent's bounds.
pub fn audit_constraints(log: &RunLog, tol: f64) -> Vec<BoundViolation> {
    let mut out = Vec::new();
    for (k, r) in log.steps.iter().enumerate() {
        for (i, b) in log.bounds.iter().enumerate() {
            if !b.contains_rate(r.gamma_dot[i], tol) {
                out.push(BoundViolation {
                    step: k + 1,
                    agent: i,
                    quantity: "gamma_dot",
                    value: r.gamma_dot[i],
                });
            }
            if r.gamma_ddot[i].abs() > b.gddot_max + tol {
                out.push(BoundViolation {
                    step: k + 1,
                    agent: i,
                    quantity: "gamma_ddot",
                    value: r.gamma_ddot[i],
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub agents: usize,
    pub steps: usize,
    pub mean_solve_time: f64,
    pub max_solve_time: f64,
    pub consensus_eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consensus_time: Option<f64>,
    pub min_distance: f64,
    pub final_spread: f64,
    pub bound_violations: usize,
    pub hash: String,
}

impl RunSummary {
    pub fn of(log: &RunLog, eps: f64) -> Self {
        let times: Vec<f64> = log.solve_times().collect();
        let mean = if times.is_empty() {
            0.0
        } else {
            times.iter().sum::<f64>() / times.len() as f64
        };
        RunSummary {
            name: log.name.clone(),
            agents: log.agents(),
            steps: log.steps.len(),
            mean_solve_time: mean,
            max_solve_time: times.iter().copied().fold(0.0, f64::max),
            consensus_eps: eps,
            consensus_time: consensus_time(log, eps),
            min_distance: min_pairwise_distance(log).0,
            final_spread: log.spread().last().map_or(0.0, |s| s.1),
            bound_violations: audit_constraints(log, 1e-9).len(),
            hash: log.hash(),
        }
    }
}

pub fn export_csv(log: &RunLog, path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for row in log.rows() {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(crate::Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

/// Writes the summary as TOML and returns it.
pub fn export_summary(log: &RunLog, eps: f64, path: &Path) -> Result<RunSummary> {
    let summary = RunSummary::of(log, eps);
    let text = toml::to_string(&summary).map_err(|e| crate::Error::Parse(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(summary)
}
