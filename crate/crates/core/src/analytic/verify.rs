//! Randomized self-check of the closed-form equilibrium, used by the
//! `verify-analytic` command.

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{solve_unconstrained_game, AnalyticSolution, Branch};
use crate::mission::GameWeights;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub draws: usize,
    /// Draws per branch: oscillatory, critical, real-distinct.
    pub per_branch: [usize; 3],
    /// Parameter draws rejected as singular.
    pub singular: usize,
    /// `max |EL residual| / (1 + max|γ⁰|)` over `t ∈ [0, 50]`.
    pub max_residual: f64,
    /// Largest deviation from `γ(0) = γ⁰`, `γ̇(0) = 0`.
    pub max_boundary_error: f64,
    /// Largest distance between closed-form and companion-matrix roots
    /// (oscillatory and real-distinct draws).
    pub max_root_error: f64,
    /// Largest `|closed-form gap − direct difference|` (oscillatory draws).
    pub max_gap_error: f64,
}

impl VerifyReport {
    pub const RESIDUAL_TOL: f64 = 1e-6;
    pub const BOUNDARY_TOL: f64 = 1e-9;
    pub const ROOT_TOL: f64 = 1e-10;
    pub const GAP_TOL: f64 = 1e-9;

    pub fn passed(&self) -> bool {
        self.max_residual < Self::RESIDUAL_TOL
            && self.max_boundary_error < Self::BOUNDARY_TOL
            && self.max_root_error < Self::ROOT_TOL
            && self.max_gap_error < Self::GAP_TOL
            && self.per_branch.iter().all(|n| *n > 0)
    }
}

/// Roots of the characteristic quartic as eigenvalues of its companion matrix.
pub fn companion_roots(w: &GameWeights) -> [Complex64; 4] {
    let r = w.w1 / w.w3;
    let a = w.alpha;
    let c = [-2.0 * a, a * a - r, a * r, w.w2 / w.w3];
    #[rustfmt::skip]
    let m = Matrix4::new(
        -c[0], -c[1], -c[2], -c[3],
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
    );
    let e = m.complex_eigenvalues();
    [e[0], e[1], e[2], e[3]]
}

/// Smallest over pairings of the largest pairwise distance.
fn root_mismatch(a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
    let mut best = f64::INFINITY;
    for p0 in 0..4 {
        for p1 in (0..4).filter(|p| *p != p0) {
            for p2 in (0..4).filter(|p| *p != p0 && *p != p1) {
                let p3 = 6 - p0 - p1 - p2;
                let worst = [p0, p1, p2, p3]
                    .iter()
                    .enumerate()
                    .map(|(k, p)| (a[k] - b[*p]).norm())
                    .fold(0.0, f64::max);
                best = best.min(worst);
            }
        }
    }
    best
}

fn draw(rng: &mut ChaCha8Rng, k: usize) -> (GameWeights, Vec<f64>) {
    let alpha = rng.random_range(0.2..5.0);
    let n = rng.random_range(2..=6);
    let gamma0 = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
    loop {
        let (w1, w3): (f64, f64) = if k % 3 == 1 {
            // w1 = 2(√w3 − w3), w2 = (1 − √w3)² puts W exactly at zero
            let w3: f64 = rng.random_range(0.1..0.8);
            (2.0 * (w3.sqrt() - w3), w3)
        } else {
            (rng.random_range(0.02..0.9), rng.random_range(0.1..0.9))
        };
        let w2 = if k % 3 == 1 {
            (1.0 - w3.sqrt()).powi(2)
        } else {
            1.0 - w1 - w3
        };
        let Ok(w) = GameWeights::new(w1, w2, w3, alpha) else {
            continue;
        };
        let wanted = match k % 3 {
            0 => w.discriminant() < -1e-6,
            1 => true,
            _ => w.discriminant() > 1e-6,
        };
        if wanted {
            return (w, gamma0);
        }
    }
}

fn check(sol: &AnalyticSolution, report: &mut VerifyReport) {
    let g0 = sol.gamma0();
    let scale = 1.0 + g0.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    for (i, g) in g0.iter().enumerate() {
        report.max_boundary_error = report
            .max_boundary_error
            .max((sol.eval(i, 0.0, 0) - g).abs() / scale)
            .max(sol.eval(i, 0.0, 1).abs() / scale);
        for k in 0..=250 {
            let t = 0.2 * k as f64;
            report.max_residual = report.max_residual.max(sol.el_residual(i, t).abs() / scale);
        }
    }
    match sol.branch() {
        Branch::Critical => {}
        branch => {
            let err = root_mismatch(&sol.characteristic_roots(), &companion_roots(sol.weights()));
            report.max_root_error = report.max_root_error.max(err);
            if branch == Branch::Oscillatory {
                for k in 0..50 {
                    let t = 0.4 * k as f64;
                    let direct = sol.eval(0, t, 0) - sol.eval(1, t, 0);
                    let gap = sol.pairwise_gap(0, 1, t).expect("oscillatory branch");
                    report.max_gap_error = report.max_gap_error.max((gap - direct).abs() / scale);
                }
            }
        }
    }
}

/// Draws `draws` parameter sets cycling through `W < 0`, `W = 0`, `W > 0`
/// and checks every closed-form property on each.
pub fn verify_random(draws: usize, seed: u64) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerifyReport {
        draws,
        per_branch: [0; 3],
        singular: 0,
        max_residual: 0.0,
        max_boundary_error: 0.0,
        max_root_error: 0.0,
        max_gap_error: 0.0,
    };
    let mut k = 0;
    while k < draws {
        let (w, g) = draw(&mut rng, k);
        match solve_unconstrained_game(&w, &g) {
            Ok(sol) => {
                report.per_branch[match sol.branch() {
                    Branch::Oscillatory => 0,
                    Branch::Critical => 1,
                    Branch::RealDistinct => 2,
                }] += 1;
                check(&sol, &mut report);
                k += 1;
            }
            Err(_) => report.singular += 1,
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_passes() {
        let r = verify_random(30, 9);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn companion_roots_of_a_known_quartic() {
        // α = 0 is outside the game, but the polynomial is still λ⁴ − (w1/w3)λ² + w2/w3
        let w = GameWeights {
            w1: 0.5,
            w2: 0.0,
            w3: 0.5,
            alpha: 0.0,
        };
        let mut re: Vec<f64> = companion_roots(&w).iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        for (got, want) in re.iter().zip([-1.0, 0.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-7);
        }
    }
}
