//! Time-varying communication topology and the prediction exchange between
//! consecutive steps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mission::Vec3;
use crate::mpc::{smoothstep_phi, MpcStepSolution, NeighborPrediction};

/// Symmetric link-quality matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CommGraph {
    n: usize,
    weights: Vec<f64>,
}

impl CommGraph {
    pub fn empty(n: usize) -> Self {
        CommGraph {
            n,
            weights: vec![0.0; n * n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                g.set(i, j, 1.0);
            }
        }
        g
    }

    pub fn agents(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    /// Sets both directions; the diagonal stays zero.
    pub fn set(&mut self, i: usize, j: usize, w: f64) {
        if i != j {
            let w = w.clamp(0.0, 1.0);
            self.weights[i * self.n + j] = w;
            self.weights[j * self.n + i] = w;
        }
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.n)
            .map(move |j| (j, self.weight(i, j)))
            .filter(|(_, w)| *w > 0.0)
    }

    /// Fraction of unordered pairs with a live link.
    pub fn density(&self) -> f64 {
        let pairs = self.n * self.n.saturating_sub(1) / 2;
        if pairs == 0 {
            return 0.0;
        }
        let live = (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.weight(i, j) > 0.0)
            .count();
        live as f64 / pairs as f64
    }

    /// Component label of every agent (smallest member index).
    pub fn components(&self) -> Vec<usize> {
        let mut label: Vec<usize> = (0..self.n).collect();
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..self.n {
                for (j, _) in self.neighbors(i) {
                    let m = label[i].min(label[j]);
                    if label[i] != m || label[j] != m {
                        label[i] = m;
                        label[j] = m;
                        changed = true;
                    }
                }
            }
        }
        label
    }

    /// Upper-triangle weights, row by row.
    pub fn upper_triangle(&self) -> Vec<f64> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .map(|(i, j)| self.weight(i, j))
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| self.weight(i, i) == 0.0 && (0..self.n).all(|j| self.weight(i, j) == self.weight(j, i)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinkModel {
    Full,
    /// `φ(distance, p1, p2)`.
    DistanceSmoothed {
        p1: f64,
        p2: f64,
    },
    /// Each unordered pair is up with probability `p_up`, redrawn every
    /// `refresh_period` seconds and held in between.
    RandomBernoulli {
        p_up: f64,
        refresh_period: f64,
    },
    /// Product of a distance gate and a Bernoulli draw.
    Composite {
        p1: f64,
        p2: f64,
        p_up: f64,
        refresh_period: f64,
    },
}

impl LinkModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            LinkModel::Full => true,
            LinkModel::DistanceSmoothed { p1, p2 } => 0.0 < p1 && p1 < p2,
            LinkModel::RandomBernoulli { p_up, refresh_period } => (0.0..=1.0).contains(&p_up) && refresh_period > 0.0,
            LinkModel::Composite {
                p1,
                p2,
                p_up,
                refresh_period,
            } => 0.0 < p1 && p1 < p2 && (0.0..=1.0).contains(&p_up) && refresh_period > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid link model {self:?}")))
        }
    }

    fn gate(&self) -> Option<(f64, f64)> {
        match *self {
            LinkModel::DistanceSmoothed { p1, p2 } | LinkModel::Composite { p1, p2, .. } => Some((p1, p2)),
            _ => None,
        }
    }

    fn bernoulli(&self) -> Option<(f64, f64)> {
        match *self {
            LinkModel::RandomBernoulli { p_up, refresh_period }
            | LinkModel::Composite {
                p_up, refresh_period, ..
            } => Some((p_up, refresh_period)),
            _ => None,
        }
    }
}

/// Stateful topology source: owns the seeded stream and the Bernoulli draws
/// held between refreshes.
#[derive(Debug, Clone)]
pub struct TopologySampler {
    model: LinkModel,
    rng: ChaCha8Rng,
    epoch: Option<u64>,
    held: CommGraph,
}

impl TopologySampler {
    pub fn new(model: LinkModel, agents: usize, seed: u64) -> Result<Self> {
        model.validate()?;
        Ok(TopologySampler {
            model,
            rng: ChaCha8Rng::seed_from_u64(seed),
            epoch: None,
            held: CommGraph::complete(agents),
        })
    }

    pub fn model(&self) -> &LinkModel {
        &self.model
    }

    /// Graph at time `t` for the given positions.
    pub fn update(&mut self, positions: &[Vec3], t: f64) -> CommGraph {
        let n = positions.len();
        if self.held.agents() != n {
            self.held = CommGraph::complete(n);
            self.epoch = None;
        }
        if let Some((p_up, period)) = self.model.bernoulli() {
            let epoch = (t / period + 1e-9).floor().max(0.0) as u64;
            if self.epoch != Some(epoch) {
                self.epoch = Some(epoch);
                for i in 0..n {
                    for j in i + 1..n {
                        let up = self.rng.random_bool(p_up);
                        self.held.set(i, j, if up { 1.0 } else { 0.0 });
                    }
                }
            }
        }
        let mut g = self.held.clone();
        if let Some((p1, p2)) = self.model.gate() {
            for i in 0..n {
                for j in i + 1..n {
                    let d = (positions[i] - positions[j]).norm();
                    let phi = smoothstep_phi(d, p1, p2).expect("validated thresholds");
                    g.set(i, j, g.weight(i, j) * phi);
                }
            }
        }
        g
    }
}

/// One-shot topology for callers that keep the sampler themselves.
pub fn update_topology(sampler: &mut TopologySampler, positions: &[Vec3], t: f64) -> CommGraph {
    sampler.update(positions, t)
}

/// Neighbor tables for the next step: every agent receives, from each live
/// link, the sender's shifted plan and current virtual time `s_1`. Links
/// that are down carry nothing, so a dropped neighbor simply disappears.
pub fn exchange(solutions: &[MpcStepSolution], graph: &CommGraph, h: f64) -> Vec<Vec<NeighborPrediction>> {
    let shifted: Vec<Vec<f64>> = solutions.iter().map(|s| s.shifted_prediction(h)).collect();
    (0..solutions.len())
        .map(|receiver| {
            graph
                .neighbors(receiver)
                .map(|(sender, w)| NeighborPrediction {
                    agent: sender,
                    weight: w,
                    current: solutions[sender].s[1],
                    s: shifted[sender].clone(),
                })
                .collect()
        })
        .collect()
}

/// First-step tables: every neighbor is assumed to keep the nominal pace
/// from its initial virtual time.
pub fn bootstrap_tables(gamma0: &[f64], graph: &CommGraph, horizon: usize, h: f64) -> Vec<Vec<NeighborPrediction>> {
    (0..gamma0.len())
        .map(|receiver| {
            graph
                .neighbors(receiver)
                .map(|(sender, w)| NeighborPrediction::bootstrap(sender, gamma0[sender], horizon, h, w))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize, spacing: f64) -> Vec<Vec3> {
        (0..n).map(|i| Vec3::new(i as f64 * spacing, 0.0, 0.0)).collect()
    }

    #[test]
    fn full_model_is_complete() {
        let mut s = TopologySampler::new(LinkModel::Full, 4, 0).unwrap();
        let g = s.update(&line(4, 100.0), 0.0);
        assert_eq!(g, CommGraph::complete(4));
        assert_eq!(g.density(), 1.0);
    }

    #[test]
    fn distance_gate() {
        let model = LinkModel::DistanceSmoothed { p1: 2.25, p2: 4.5 };
        let mut s = TopologySampler::new(model, 2, 0).unwrap();
        assert_eq!(s.update(&line(2, 5.0), 0.0).weight(0, 1), 0.0);
        assert_eq!(s.update(&line(2, 1.0), 0.0).weight(0, 1), 1.0);
        let mid = s.update(&line(2, 3.375), 0.0).weight(0, 1);
        assert!((mid - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bernoulli_draws_are_held_between_refreshes() {
        let model = LinkModel::RandomBernoulli {
            p_up: 0.5,
            refresh_period: 0.5,
        };
        let mut s = TopologySampler::new(model, 8, 3).unwrap();
        let pos = line(8, 1.0);
        let g0 = s.update(&pos, 0.05);
        for k in 2..10 {
            assert_eq!(s.update(&pos, 0.05 * k as f64), g0);
        }
        let later: Vec<CommGraph> = (0..20).map(|k| s.update(&pos, 0.5 + 0.5 * k as f64)).collect();
        assert!(later.iter().any(|g| *g != g0));
        assert!(later.iter().all(CommGraph::is_symmetric));
    }

    #[test]
    fn components_of_a_split_graph() {
        let mut g = CommGraph::empty(5);
        g.set(0, 1, 1.0);
        g.set(2, 3, 0.5);
        g.set(3, 4, 1.0);
        assert_eq!(g.components(), vec![0, 0, 2, 2, 2]);
    }
}
