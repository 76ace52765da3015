//! Closed-form Nash equilibrium of the unconstrained, fully connected,
//! discounted virtual-time game.
//!
//! Each agent minimises
//! `∫ e^{-αt} (w1 γ̇² + w2/N Σ_j (γ_i − γ_j)² + w3 γ̈²) dt`
//! with `γ_i(0) = γ_i⁰`, `γ̇_i(0) = 0` (coordinates shifted by `t`, so the
//! physical rate is `1 + γ̇_i`). The Euler–Lagrange system decouples into
//! pairwise differences governed by the characteristic quartic
//!
//! ```text
//! λ⁴ − 2αλ³ + (α² − w1/w3)λ² + (α w1/w3)λ + w2/w3 = 0,
//! ```
//!
//! which is biquadratic in `x = λ − α/2`. The sign of `W = w1² − 4 w2 w3`
//! selects between a damped oscillation (`W < 0`), a repeated real root
//! (`W = 0`) and two distinct real roots (`W > 0`). Only the stable roots
//! survive the transversality conditions.

mod feasibility;
pub mod verify;

pub use feasibility::{find_feasible_alpha, FeasibilityOptions, FeasibleAlpha};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mission::GameWeights;

/// `|W|` at or below this value selects the repeated-root branch.
pub const DISCRIMINANT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// `W < 0`: complex pair `μ1 ± iν1`.
    Oscillatory,
    /// `W = 0`: double real root `μ⁰`.
    Critical,
    /// `W > 0`: two distinct real roots `μ1⁺ < μ2⁺ < 0`.
    RealDistinct,
}

impl Branch {
    pub fn name(&self) -> &'static str {
        match self {
            Branch::Oscillatory => "oscillatory (W < 0)",
            Branch::Critical => "critical (W = 0)",
            Branch::RealDistinct => "real-distinct (W > 0)",
        }
    }

    pub fn of(weights: &GameWeights) -> Branch {
        let w = weights.discriminant();
        if w.abs() <= DISCRIMINANT_TOL {
            Branch::Critical
        } else if w < 0.0 {
            Branch::Oscillatory
        } else {
            Branch::RealDistinct
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Modes {
    Oscillatory { mu: f64, nu: f64 },
    Critical { mu: f64 },
    RealDistinct { mu1: f64, mu2: f64 },
}

/// Per-agent coefficients of the equilibrium
/// `γ_i(t) = H1_i + H3_i e^{μ3 t} + (branch-specific decaying modes with C1_i, C2_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSolution {
    weights: GameWeights,
    gamma0: Vec<f64>,
    offsets: Vec<f64>,
    h1: Vec<f64>,
    h3: Vec<f64>,
    c1: Vec<f64>,
    c2: Vec<f64>,
    mu3: f64,
    modes: Modes,
}

/// `q(λ) = λ⁴ − 2αλ³ + (α² − r)λ² + αrλ`, the characteristic polynomial of
/// the homogeneous single-agent operator, with `r = w1/w3`.
fn q_real(lambda: f64, alpha: f64, r: f64) -> f64 {
    let l2 = lambda * lambda;
    l2 * l2 - 2.0 * alpha * l2 * lambda + (alpha * alpha - r) * l2 + alpha * r * lambda
}

fn q_real_derivative(lambda: f64, alpha: f64, r: f64) -> f64 {
    4.0 * lambda.powi(3) - 6.0 * alpha * lambda * lambda + 2.0 * (alpha * alpha - r) * lambda + alpha * r
}

/// Sum of the magnitudes of the terms of `q` at `|λ| = modulus`.
fn q_scale(modulus: f64, alpha: f64, r: f64) -> f64 {
    let m = modulus;
    m.powi(4) + 2.0 * alpha * m.powi(3) + (alpha * alpha - r).abs() * m * m + alpha * r * m
}

fn singular_if(value: f64, scale: f64, symbol: &'static str) -> Result<()> {
    if !value.is_finite() || value.abs() <= 1e-13 * scale {
        Err(Error::SingularParameters { symbol })
    } else {
        Ok(())
    }
}

/// Unique equilibrium of the unconstrained game for initial virtual times `gamma0`.
pub fn solve_unconstrained_game(weights: &GameWeights, gamma0: &[f64]) -> Result<AnalyticSolution> {
    weights.validate()?;
    let n = gamma0.len();
    if n < 2 {
        return Err(Error::Config("the game needs at least two agents".into()));
    }
    let GameWeights { w1, w2, w3, alpha } = *weights;
    let r = w1 / w3;
    let coupling = w2 / w3;
    let disc = weights.discriminant();

    // α/2 − √(α²/4 + m) rewritten as −m / (α/2 + √(α²/4 + m)) to avoid
    // cancellation for large α
    let stable_root = |m: f64| -m / (alpha / 2.0 + (alpha * alpha / 4.0 + m).sqrt());
    let mu3 = stable_root(r);
    singular_if(mu3, 1.0 + alpha, "mu3")?;

    let offsets: Vec<f64> = gamma0.iter().map(|gi| gamma0.iter().map(|gj| gi - gj).sum()).collect();
    // the pairwise-difference forcing enters agent i's equation with this amplitude
    let forcing: Vec<f64> = offsets.iter().map(|s| coupling / n as f64 * s).collect();

    let (modes, c1, c2): (Modes, Vec<f64>, Vec<f64>) = match Branch::of(weights) {
        Branch::Oscillatory => {
            let big_r = (w3 * alpha * alpha + 2.0 * w1) / w3;
            let root = (big_r * big_r - 4.0 * disc / (w3 * w3)).sqrt();
            // root − R and α²/4 − (root + R)/8 in cancellation-free form
            let root_minus_r = -4.0 * disc / (w3 * w3) / (root + big_r);
            let half_re = 0.5 * ((root + big_r) / 2.0).sqrt();
            let mu = (-root_minus_r / 8.0 - r / 2.0) / (alpha / 2.0 + half_re);
            let nu = 0.5 * (root_minus_r / 2.0).sqrt();
            // q(μ + iν) = P + iQ
            let (m2, n2) = (mu * mu, nu * nu);
            let p = m2 * m2 - 6.0 * m2 * n2 + n2 * n2 - 2.0 * alpha * (m2 * mu - 3.0 * mu * n2)
                + (alpha * alpha - r) * (m2 - n2)
                + alpha * r * mu;
            let q = 4.0 * (m2 * mu - mu * n2) * nu - 2.0 * alpha * (3.0 * m2 - n2) * nu
                + 2.0 * (alpha * alpha - r) * mu * nu
                + alpha * r * nu;
            let pq = p * p + q * q;
            let modulus = mu.hypot(nu);
            singular_if(pq, q_scale(modulus, alpha, r).powi(2), "P^2 + Q^2")?;
            // particular response to −f e^{μt}(cos νt − (μ/ν) sin νt)
            let c1 = forcing.iter().map(|f| -f * (p + mu * q / nu) / pq).collect();
            let c2 = forcing.iter().map(|f| f * (mu * p / nu - q) / pq).collect();
            (Modes::Oscillatory { mu, nu }, c1, c2)
        }
        Branch::RealDistinct => {
            // roots of m² − (w1/w3) m + w2/w3, with λ(λ − α) = m
            let m1 = (w1 + disc.sqrt()) / (2.0 * w3);
            let m2 = coupling / m1;
            let mu1 = stable_root(m1);
            let mu2 = stable_root(m2);
            let a_plus = q_real(mu1, alpha, r);
            let b_plus = q_real(mu2, alpha, r);
            singular_if(a_plus, q_scale(mu1.abs(), alpha, r), "A+")?;
            singular_if(b_plus, q_scale(mu2.abs(), alpha, r), "B+")?;
            let gap = mu2 - mu1;
            let c1 = forcing.iter().map(|f| -f * mu2 / (gap * a_plus)).collect();
            let c2 = forcing.iter().map(|f| f * mu1 / (gap * b_plus)).collect();
            (Modes::RealDistinct { mu1, mu2 }, c1, c2)
        }
        Branch::Critical => {
            let mu = stable_root(w1 / (2.0 * w3));
            let a0 = q_real(mu, alpha, r);
            let b0 = q_real_derivative(mu, alpha, r);
            singular_if(a0, q_scale(mu.abs(), alpha, r), "A0")?;
            let c2: Vec<f64> = forcing.iter().map(|f| f * mu / a0).collect();
            let c1 = forcing.iter().zip(&c2).map(|(f, c2)| -(c2 * b0 + f) / a0).collect();
            (Modes::Critical { mu }, c1, c2)
        }
    };

    // γ̇(0) = 0 fixes H3, γ(0) = γ⁰ fixes H1
    let (h1, h3): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|i| {
            let (c1, c2) = (c1[i], c2[i]);
            let (mode_rate, mode_value) = match modes {
                Modes::Oscillatory { mu, nu } => (mu * c1 + nu * c2, c1),
                Modes::Critical { mu } => (mu * c1 + c2, c1),
                Modes::RealDistinct { mu1, mu2 } => (mu1 * c1 + mu2 * c2, c1 + c2),
            };
            let h3 = -mode_rate / mu3;
            (gamma0[i] - h3 - mode_value, h3)
        })
        .unzip();

    Ok(AnalyticSolution {
        weights: *weights,
        gamma0: gamma0.to_vec(),
        offsets,
        h1,
        h3,
        c1,
        c2,
        mu3,
        modes,
    })
}

impl AnalyticSolution {
    pub fn branch(&self) -> Branch {
        match self.modes {
            Modes::Oscillatory { .. } => Branch::Oscillatory,
            Modes::Critical { .. } => Branch::Critical,
            Modes::RealDistinct { .. } => Branch::RealDistinct,
        }
    }

    pub fn weights(&self) -> &GameWeights {
        &self.weights
    }

    pub fn agents(&self) -> usize {
        self.gamma0.len()
    }

    pub fn gamma0(&self) -> &[f64] {
        &self.gamma0
    }

    /// `S_i = Σ_j (γ_i⁰ − γ_j⁰)`.
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn h1(&self) -> &[f64] {
        &self.h1
    }

    pub fn h3(&self) -> &[f64] {
        &self.h3
    }

    pub fn c1(&self) -> &[f64] {
        &self.c1
    }

    pub fn c2(&self) -> &[f64] {
        &self.c2
    }

    pub fn mu3(&self) -> f64 {
        self.mu3
    }

    /// Real part of the slowest surviving pairwise mode (`μ1`, or `μ⁰`).
    pub fn mu1(&self) -> f64 {
        match self.modes {
            Modes::Oscillatory { mu, .. } | Modes::Critical { mu } => mu,
            Modes::RealDistinct { mu1, .. } => mu1,
        }
    }

    pub fn mu2(&self) -> Option<f64> {
        match self.modes {
            Modes::RealDistinct { mu2, .. } => Some(mu2),
            _ => None,
        }
    }

    pub fn nu1(&self) -> Option<f64> {
        match self.modes {
            Modes::Oscillatory { nu, .. } => Some(nu),
            _ => None,
        }
    }

    /// All four roots of the characteristic quartic, from the closed forms.
    /// The polynomial is symmetric under `λ ↦ α − λ`, so the unstable roots
    /// mirror the stable ones.
    pub fn characteristic_roots(&self) -> [Complex64; 4] {
        let a = self.weights.alpha;
        match self.modes {
            Modes::Oscillatory { mu, nu } => [
                Complex64::new(mu, nu),
                Complex64::new(mu, -nu),
                Complex64::new(a - mu, nu),
                Complex64::new(a - mu, -nu),
            ],
            Modes::Critical { mu } => [
                Complex64::new(mu, 0.0),
                Complex64::new(mu, 0.0),
                Complex64::new(a - mu, 0.0),
                Complex64::new(a - mu, 0.0),
            ],
            Modes::RealDistinct { mu1, mu2 } => [
                Complex64::new(mu1, 0.0),
                Complex64::new(mu2, 0.0),
                Complex64::new(a - mu1, 0.0),
                Complex64::new(a - mu2, 0.0),
            ],
        }
    }

    /// `d^order/dt^order γ_i(t)` in shifted coordinates; add `t` (order 0) or
    /// `1` (order 1) to recover the physical virtual time.
    pub fn eval(&self, i: usize, t: f64, order: u32) -> f64 {
        assert!(order <= 4, "derivatives are available up to order 4");
        let d = order as i32;
        let base = if order == 0 { self.h1[i] } else { 0.0 };
        let slow = self.h3[i] * self.mu3.powi(d) * (self.mu3 * t).exp();
        let (c1, c2) = (self.c1[i], self.c2[i]);
        let modes = match self.modes {
            Modes::Oscillatory { mu, nu } => {
                let lambda = Complex64::new(mu, nu);
                let amp = Complex64::new(c1, -c2);
                (amp * lambda.powi(d) * (lambda * t).exp()).re
            }
            Modes::Critical { mu } => {
                let tail = if d == 0 { 0.0 } else { d as f64 * mu.powi(d - 1) };
                (mu.powi(d) * c1 + c2 * (mu.powi(d) * t + tail)) * (mu * t).exp()
            }
            Modes::RealDistinct { mu1, mu2 } => c1 * mu1.powi(d) * (mu1 * t).exp() + c2 * mu2.powi(d) * (mu2 * t).exp(),
        };
        base + slow + modes
    }

    /// Left-hand side of agent `i`'s Euler–Lagrange equation at `t`.
    pub fn el_residual(&self, i: usize, t: f64) -> f64 {
        let GameWeights { w1, w2, w3, alpha } = self.weights;
        let r = w1 / w3;
        let n = self.agents() as f64;
        let own = self.eval(i, t, 0);
        let coupling: f64 = (0..self.agents()).map(|j| own - self.eval(j, t, 0)).sum();
        self.eval(i, t, 4) - 2.0 * alpha * self.eval(i, t, 3)
            + (alpha * alpha - r) * self.eval(i, t, 2)
            + alpha * r * self.eval(i, t, 1)
            + w2 / (w3 * n) * coupling
    }

    /// Closed-form `γ_i − γ_k` for the oscillatory branch.
    pub fn pairwise_gap(&self, i: usize, k: usize, t: f64) -> Result<f64> {
        match self.modes {
            Modes::Oscillatory { mu, nu } => {
                let y0 = self.gamma0[i] - self.gamma0[k];
                Ok((mu * t).exp() * y0 * ((nu * t).cos() - mu / nu * (nu * t).sin()))
            }
            _ => Err(Error::BranchMismatch {
                expected: Branch::Oscillatory.name(),
                actual: self.branch().name(),
            }),
        }
    }

    /// Decay exponent of the slowest mode; always negative.
    pub fn convergence_rate(&self) -> f64 {
        match self.modes {
            Modes::Oscillatory { mu, .. } | Modes::Critical { mu } => mu.max(self.mu3),
            Modes::RealDistinct { mu1, mu2 } => mu1.max(mu2).max(self.mu3),
        }
    }

    /// Upper bound on `|d^order γ_i / dt^order|` at `t`, nonincreasing in `t`
    /// for `t >= 1/|rate|` (order >= 1).
    pub fn derivative_envelope(&self, i: usize, t: f64, order: u32) -> f64 {
        let d = order as i32;
        let slow = self.h3[i].abs() * self.mu3.abs().powi(d) * (self.mu3 * t).exp();
        let (c1, c2) = (self.c1[i], self.c2[i]);
        let modes = match self.modes {
            Modes::Oscillatory { mu, nu } => c1.hypot(c2) * mu.hypot(nu).powi(d) * (mu * t).exp(),
            Modes::Critical { mu } => {
                let m = mu.abs();
                let tail = if d == 0 { 0.0 } else { d as f64 * m.powi(d - 1) };
                (m.powi(d) * c1.abs() + c2.abs() * (m.powi(d) * t + tail)) * (mu * t).exp()
            }
            Modes::RealDistinct { mu1, mu2 } => {
                c1.abs() * mu1.abs().powi(d) * (mu1 * t).exp() + c2.abs() * mu2.abs().powi(d) * (mu2 * t).exp()
            }
        };
        slow + modes
    }

    /// Structured text snapshot of every coefficient.
    pub fn report(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            branch: Branch,
            discriminant: f64,
            weights: &'a GameWeights,
            mu3: f64,
            mu1: f64,
            #[serde(skip_serializing_if = "Option::is_none")]
            mu2: Option<f64>,
            #[serde(skip_serializing_if = "Option::is_none")]
            nu1: Option<f64>,
            convergence_rate: f64,
            gamma0: &'a [f64],
            offsets: &'a [f64],
            h1: &'a [f64],
            h3: &'a [f64],
            c1: &'a [f64],
            c2: &'a [f64],
        }
        let report = Report {
            branch: self.branch(),
            discriminant: self.weights.discriminant(),
            weights: &self.weights,
            mu3: self.mu3,
            mu1: self.mu1(),
            mu2: self.mu2(),
            nu1: self.nu1(),
            convergence_rate: self.convergence_rate(),
            gamma0: &self.gamma0,
            offsets: &self.offsets,
            h1: &self.h1,
            h3: &self.h3,
            c1: &self.c1,
            c2: &self.c2,
        };
        toml::to_string(&report).expect("report fields are plain numbers")
    }
}
