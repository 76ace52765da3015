//! Per-agent receding-horizon problem over the virtual time.
//!
//! The agent plans `u_0..u_{K-1}` (virtual-time acceleration) for the double
//! integrator
//!
//! ```text
//! s_{τ+1} = s_τ + h ℓ_τ + h²/2 u_τ,   ℓ_{τ+1} = ℓ_τ + h u_τ
//! ```
//!
//! minimising `Σ(ℓ_τ − 1)² + Σ_j w_j Σ(s_τ − s̄_jτ)² + Σ u_τ²` (plus an
//! optional inverse-square separation penalty) under box limits on `u` and `ℓ`.
//! States are eliminated, so every step is a `K`-variable QP.

mod collision;
pub mod qp;
mod smooth;

pub use collision::CollisionTerms;
pub use smooth::{smoothstep_phi, smoothstep_psi};

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mission::{RateBounds, Vec3, VirtualTimeState};
use qp::DenseQp;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub pace: f64,
    pub coordination: f64,
    pub effort: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        CostWeights {
            pace: 1.0,
            coordination: 1.0,
            effort: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MpcConfig {
    /// Horizon length `K`.
    pub horizon: usize,
    /// Step `h` (s).
    pub h: f64,
    pub bounds: RateBounds,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "one")]
    pub delta: f64,
    #[serde(default)]
    pub weights: CostWeights,
    #[serde(default = "default_sqp_iters")]
    pub sqp_iters: usize,
    #[serde(default = "default_kkt_tol")]
    pub kkt_tol: f64,
    /// Divide the coordination term by the number of live neighbors.
    #[serde(default)]
    pub normalize: bool,
    #[serde(default = "default_max_qp_iters")]
    pub max_qp_iters: usize,
}

fn one() -> f64 {
    1.0
}

fn default_sqp_iters() -> usize {
    2
}

fn default_kkt_tol() -> f64 {
    1e-9
}

fn default_max_qp_iters() -> usize {
    500
}

impl MpcConfig {
    pub fn new(horizon: usize, h: f64, bounds: RateBounds) -> Result<Self> {
        let c = MpcConfig {
            horizon,
            h,
            bounds,
            beta: 1.0,
            delta: 1.0,
            weights: CostWeights::default(),
            sqp_iters: default_sqp_iters(),
            kkt_tol: default_kkt_tol(),
            normalize: false,
            max_qp_iters: default_max_qp_iters(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.bounds.validate()?;
        let w = &self.weights;
        let ok = self.horizon >= 2
            && self.h > 0.0
            && self.h.is_finite()
            && self.delta > 0.0
            && self.beta >= 0.0
            && self.sqp_iters >= 1
            && self.kkt_tol > 0.0
            && self.max_qp_iters >= 1
            && w.pace >= 0.0
            && w.coordination >= 0.0
            && w.effort > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid MPC configuration {self:?}")))
        }
    }
}

/// Path-following correction: the position error projected on the virtual
/// target's velocity. Positive when the vehicle lags its target.
pub fn correction_term(actual: &Vec3, target_pos: &Vec3, target_vel: &Vec3, beta: f64, delta: f64) -> f64 {
    beta * (target_pos - actual).dot(target_vel) / (target_vel.norm() + delta)
}

/// A neighbor's predicted virtual times `s̄_j1..s̄_jK`, its current virtual
/// time and the quality of the link it arrived on.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborPrediction {
    pub agent: usize,
    pub weight: f64,
    pub current: f64,
    pub s: Vec<f64>,
}

impl NeighborPrediction {
    /// First-step prediction: the neighbor keeps its nominal pace from `γ⁰`.
    pub fn bootstrap(agent: usize, gamma0: f64, horizon: usize, h: f64, weight: f64) -> Self {
        NeighborPrediction {
            agent,
            weight,
            current: gamma0,
            s: (1..=horizon).map(|tau| gamma0 + tau as f64 * h).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MpcStepProblem {
    pub s0: f64,
    pub l0: f64,
    pub neighbors: Vec<NeighborPrediction>,
    pub collision: Option<CollisionTerms>,
}

/// Initial conditions from the previous step's `(s_1, ℓ_1)`, held in
/// `state.gamma` and `state.gamma_dot`, shifted back by the correction.
/// The rate is clamped into its bounds; predictions of the wrong length or
/// with zero weight are treated as absent links.
pub fn build_step_problem(
    state: &VirtualTimeState,
    correction: f64,
    config: &MpcConfig,
    neighbors: Vec<NeighborPrediction>,
    collision: Option<CollisionTerms>,
) -> MpcStepProblem {
    let b = &config.bounds;
    let neighbors = neighbors
        .into_iter()
        .filter(|p| p.s.len() == config.horizon && p.weight > 0.0)
        .map(|p| NeighborPrediction {
            weight: p.weight.min(1.0),
            ..p
        })
        .collect();
    MpcStepProblem {
        s0: state.gamma - correction,
        l0: state.gamma_dot.clamp(b.gdot_min, b.gdot_max),
        neighbors,
        collision,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    InputUpper(usize),
    InputLower(usize),
    RateUpper(usize),
    RateLower(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpcStepSolution {
    pub s: Vec<f64>,
    pub l: Vec<f64>,
    pub u: Vec<f64>,
    pub kkt_residual: f64,
    /// Wall-clock time of assembly plus solve (s).
    pub solve_time: f64,
    /// Bounds with a positive multiplier at the last convex subproblem.
    pub active: Vec<(Bound, f64)>,
    pub objective: f64,
}

impl MpcStepSolution {
    /// `s_2..s_K` followed by the constant-rate tail `s_K + h ℓ_K`.
    pub fn shifted_prediction(&self, h: f64) -> Vec<f64> {
        let k = self.u.len();
        let mut out: Vec<f64> = self.s[2..].to_vec();
        out.push(self.s[k] + h * self.l[k]);
        out
    }
}

/// Affine maps `s_{1..K} = s_base + A u` and `ℓ_{1..K} = ℓ_base + B u`.
struct Rollout {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    s_base: DVector<f64>,
    l_base: DVector<f64>,
}

impl Rollout {
    fn new(k: usize, h: f64, s0: f64, l0: f64) -> Self {
        let mut a = DMatrix::zeros(k, k);
        let mut b = DMatrix::zeros(k, k);
        for tau in 1..=k {
            for m in 0..tau {
                a[(tau - 1, m)] = h * h * (tau as f64 - m as f64 - 0.5);
                b[(tau - 1, m)] = h;
            }
        }
        Rollout {
            a,
            b,
            s_base: DVector::from_fn(k, |i, _| s0 + (i + 1) as f64 * h * l0),
            l_base: DVector::from_element(k, l0),
        }
    }
}

impl MpcStepProblem {
    fn coordination_scale(&self, config: &MpcConfig) -> f64 {
        let live = self.neighbors.iter().filter(|n| n.weight > 0.0).count();
        if config.normalize && live > 0 {
            config.weights.coordination / live as f64
        } else {
            config.weights.coordination
        }
    }

    /// Coordination weights: link quality, gated off at close range when the
    /// separation penalty is present.
    fn link_weights(&self) -> Vec<f64> {
        self.neighbors
            .iter()
            .map(|n| match &self.collision {
                Some(c) => {
                    let d = (c.own.position(self.s0) - c.fleet[n.agent].position(n.current)).norm();
                    n.weight * (1.0 - smooth::phi_with_derivatives(d, c.near, c.far).0)
                }
                None => n.weight,
            })
            .collect()
    }

    /// Exact states for a control sequence.
    pub fn rollout(&self, config: &MpcConfig, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let h = config.h;
        let mut s = vec![self.s0];
        let mut l = vec![self.l0];
        for (tau, ut) in u.iter().enumerate() {
            s.push(s[tau] + h * l[tau] + 0.5 * h * h * ut);
            l.push(l[tau] + h * ut);
        }
        (s, l)
    }

    /// Full (nonconvex when the separation penalty is present) step cost.
    pub fn objective(&self, config: &MpcConfig, u: &[f64]) -> f64 {
        let (s, l) = self.rollout(config, u);
        let w = &config.weights;
        let pace: f64 = l[1..].iter().map(|x| (x - 1.0).powi(2)).sum();
        let effort: f64 = u.iter().map(|x| x * x).sum();
        let scale = self.coordination_scale(config);
        let mut coordination = 0.0;
        for (n, lw) in self.neighbors.iter().zip(self.link_weights()) {
            coordination += lw * n.s.iter().zip(&s[1..]).map(|(sb, si)| (si - sb).powi(2)).sum::<f64>();
        }
        let mut separation = 0.0;
        if let Some(c) = &self.collision {
            for n in &self.neighbors {
                let other = &c.fleet[n.agent];
                for (si, sb) in s[1..].iter().zip(&n.s) {
                    separation += collision::penalty(c, *si, &other.position(*sb)).0;
                }
            }
        }
        w.pace * pace + scale * coordination + w.effort * effort + separation
    }

    /// Gradient of the full cost in `u`, from the quadratic model taken at
    /// the rollout of `u` itself.
    pub fn gradient(&self, config: &MpcConfig, u: &[f64]) -> Vec<f64> {
        let (s, _) = self.rollout(config, u);
        let qp = self.assemble(config, Some(&s[1..]));
        let u = DVector::from_column_slice(u);
        (&qp.hessian * &u + &qp.linear).iter().copied().collect()
    }

    /// Convex model in `u`. The separation penalty, if any, enters as its
    /// second-order expansion around `nominal` with negative curvature dropped.
    fn assemble(&self, config: &MpcConfig, nominal: Option<&[f64]>) -> DenseQp {
        let k = config.horizon;
        let w = &config.weights;
        let r = Rollout::new(k, config.h, self.s0, self.l0);
        let mut hessian = DMatrix::identity(k, k) * (2.0 * w.effort) + r.b.transpose() * &r.b * (2.0 * w.pace);
        let mut linear = r.b.transpose() * r.l_base.add_scalar(-1.0) * (2.0 * w.pace);

        let scale = self.coordination_scale(config);
        let weights = self.link_weights();
        let total: f64 = weights.iter().sum::<f64>() * scale;
        if total > 0.0 {
            let ata = r.a.transpose() * &r.a;
            hessian += ata * (2.0 * total);
            let mut target = DVector::zeros(k);
            for (n, lw) in self.neighbors.iter().zip(&weights) {
                target += DVector::from_column_slice(&n.s) * (lw * scale);
            }
            linear += r.a.transpose() * (&r.s_base * total - target) * 2.0;
        }

        if let (Some(c), Some(nominal)) = (&self.collision, nominal) {
            let mut slope = DVector::zeros(k);
            let mut curvature = DVector::zeros(k);
            for n in &self.neighbors {
                let other = &c.fleet[n.agent];
                for tau in 0..k {
                    let (_, g1, g2) = collision::penalty(c, nominal[tau], &other.position(n.s[tau]));
                    slope[tau] += g1;
                    curvature[tau] += g2.max(0.0);
                }
            }
            let offset = &r.s_base - DVector::from_column_slice(nominal);
            let grad_s = slope + curvature.component_mul(&offset);
            linear += r.a.transpose() * grad_s;
            hessian += r.a.transpose() * DMatrix::from_diagonal(&curvature) * &r.a;
        }

        let b = &config.bounds;
        let mut constraints = DMatrix::zeros(4 * k, k);
        let mut bounds = DVector::zeros(4 * k);
        for i in 0..k {
            constraints[(i, i)] = 1.0;
            bounds[i] = b.gddot_max;
            constraints[(k + i, i)] = -1.0;
            bounds[k + i] = b.gddot_max;
            for j in 0..k {
                constraints[(2 * k + i, j)] = r.b[(i, j)];
                constraints[(3 * k + i, j)] = -r.b[(i, j)];
            }
            bounds[2 * k + i] = b.gdot_max - r.l_base[i];
            bounds[3 * k + i] = r.l_base[i] - b.gdot_min;
        }
        DenseQp {
            hessian,
            linear,
            constraints,
            bounds,
        }
    }
}

/// Solves one step: a single QP without the separation penalty, otherwise
/// `sqp_iters` rounds of successive convexification around the latest plan.
pub fn solve_step(problem: &MpcStepProblem, config: &MpcConfig) -> Result<MpcStepSolution> {
    let start = Instant::now();
    let k = config.horizon;
    if problem.neighbors.iter().any(|n| n.s.len() != k) {
        return Err(Error::Invariant(
            "neighbor prediction length differs from the horizon".into(),
        ));
    }
    let b = &config.bounds;
    if !(b.gdot_min <= problem.l0 && problem.l0 <= b.gdot_max) {
        return Err(Error::Invariant(format!(
            "initial rate {} outside [{}, {}]",
            problem.l0, b.gdot_min, b.gdot_max
        )));
    }

    let mut nominal: Option<Vec<f64>> = problem.collision.as_ref().map(|c| {
        c.nominal
            .clone()
            .filter(|n| n.len() == k)
            .unwrap_or_else(|| (1..=k).map(|t| problem.s0 + t as f64 * config.h * problem.l0).collect())
    });
    let rounds = if problem.collision.is_some() {
        config.sqp_iters
    } else {
        1
    };
    let mut last = None;
    for _ in 0..rounds {
        let qp = problem.assemble(config, nominal.as_deref());
        let sol = qp.solve(&DVector::zeros(k), config.kkt_tol, config.max_qp_iters)?;
        if !(sol.kkt_residual <= config.kkt_tol) {
            return Err(Error::SolverNonConvergence {
                iterations: sol.iterations,
                residual: sol.kkt_residual,
            });
        }
        if nominal.is_some() {
            let (s, _) = problem.rollout(config, sol.x.as_slice());
            nominal = Some(s[1..].to_vec());
        }
        last = Some(sol);
    }
    let sol = last.expect("at least one round");

    let u: Vec<f64> = sol.x.iter().map(|x| x.clamp(-b.gddot_max, b.gddot_max)).collect();
    let (s, l) = problem.rollout(config, &u);
    let active = sol
        .multipliers
        .iter()
        .enumerate()
        .filter(|(_, m)| **m > 0.0)
        .map(|(row, m)| {
            let bound = match row / k {
                0 => Bound::InputUpper(row % k),
                1 => Bound::InputLower(row % k),
                2 => Bound::RateUpper(row % k + 1),
                _ => Bound::RateLower(row % k + 1),
            };
            (bound, *m)
        })
        .collect();
    let objective = problem.objective(config, &u);
    Ok(MpcStepSolution {
        s,
        l,
        u,
        kkt_residual: sol.kkt_residual,
        solve_time: start.elapsed().as_secs_f64(),
        active,
        objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> MpcConfig {
        MpcConfig::new(10, 0.05, RateBounds::new(0.0, 2.0, 6.0).unwrap()).unwrap()
    }

    #[test]
    fn correction_examples() {
        let z = Vec3::zeros();
        let x = Vec3::new(1.0, 0.0, 0.0);
        assert_eq!(correction_term(&x, &x, &x, 1.0, 1.0), 0.0);
        assert_eq!(correction_term(&Vec3::new(-2.0, 0.0, 0.0), &z, &x, 1.0, 1.0), 1.0);
        assert_eq!(correction_term(&Vec3::new(0.0, 3.0, 0.0), &z, &x, 1.0, 1.0), 0.0);
        // vehicle ahead of its target: negative
        assert!(correction_term(&Vec3::new(0.5, 0.0, 0.0), &z, &x, 1.0, 1.0) < 0.0);
    }

    #[test]
    fn synchronized_fixed_point() {
        let cfg = config();
        let state = VirtualTimeState::new(3.0, 1.0);
        let preds = (1..4)
            .map(|j| NeighborPrediction::bootstrap(j, 3.0, 10, 0.05, 1.0))
            .collect();
        let p = build_step_problem(&state, 0.0, &cfg, preds, None);
        let sol = solve_step(&p, &cfg).unwrap();
        assert!(sol.u.iter().all(|u| u.abs() < 1e-12));
        assert!(sol.l.iter().all(|l| (l - 1.0).abs() < 1e-12));
        for t in 0..=10 {
            assert!((sol.s[t] - (3.0 + 0.05 * t as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn initial_conditions() {
        let cfg = config();
        let state = VirtualTimeState::new(2.0, 2.5);
        let p = build_step_problem(&state, 0.3, &cfg, vec![], None);
        assert!((p.s0 - 1.7).abs() < 1e-15);
        assert_eq!(p.l0, 2.0);
        let bad = NeighborPrediction {
            agent: 1,
            weight: 1.0,
            current: 0.0,
            s: vec![0.0; 3],
        };
        let p = build_step_problem(&state, 0.0, &cfg, vec![bad], None);
        assert!(p.neighbors.is_empty());
    }

    #[test]
    fn bootstrap_prediction() {
        let p = NeighborPrediction::bootstrap(2, 1.5, 4, 0.05, 1.0);
        assert_eq!(p.s, vec![1.55, 1.6, 1.65, 1.7]);
    }

    #[test]
    fn lagging_agent_speeds_up_within_limits() {
        let cfg = config();
        let state = VirtualTimeState::new(0.0, 1.0);
        let preds = vec![NeighborPrediction::bootstrap(1, 100.0, 10, 0.05, 1.0)];
        let p = build_step_problem(&state, 0.0, &cfg, preds, None);
        let sol = solve_step(&p, &cfg).unwrap();
        assert!(sol.u[0] > 0.0);
        assert!(sol.kkt_residual <= cfg.kkt_tol);
        for t in 0..10 {
            assert!(sol.u[t].abs() <= 6.0 + 1e-9);
            assert!(sol.l[t + 1] <= 2.0 + 1e-9);
            assert!((sol.s[t + 1] - (sol.s[t] + 0.05 * sol.l[t] + 0.00125 * sol.u[t])).abs() < 1e-12);
        }
        assert!(!sol.active.is_empty());
    }

    #[test]
    fn shifted_prediction_extrapolates() {
        let sol = MpcStepSolution {
            s: vec![0.0, 1.0, 2.0, 3.0],
            l: vec![1.0, 1.0, 1.0, 2.0],
            u: vec![0.0; 3],
            kkt_residual: 0.0,
            solve_time: 0.0,
            active: vec![],
            objective: 0.0,
        };
        assert_eq!(sol.shifted_prediction(0.5), vec![2.0, 3.0, 4.0]);
    }
}
