use nalgebra::{DMatrix, DVector};

use super::config::ScenarioConfig;
use super::log::RunLog;
use super::run::run_scenario;
use crate::analytic::{solve_unconstrained_game, AnalyticSolution};
use crate::error::{Error, Result};
use crate::mission::GameWeights;
use crate::mpc::CostWeights;

/// Least-squares slope of `ln y` against `t` over the samples with
/// `t ∈ [from, to]` and `y > floor`.
pub fn fit_log_slope(series: &[(f64, f64)], from: f64, to: f64, floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, y)| *t >= from && *t <= to && *y > floor)
        .map(|(t, y)| (*t, y.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(t, y)| (t - mt) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(t, _)| (t - mt).powi(2)).sum();
    Some(sxy / sxx)
}

/// Decay rate of a uniformly sampled signal that may oscillate: fits the
/// two-term recurrence `y[n+2] = c1 y[n+1] + c2 y[n]` by least squares and
/// returns `max ln|z| / dt` over the roots `z` of `z² − c1 z − c2`.
pub fn fit_oscillatory_rate(samples: &[f64], dt: f64) -> Option<f64> {
    let m = samples.len().checked_sub(2)?;
    if m < 2 {
        return None;
    }
    let a = DMatrix::from_fn(m, 2, |r, c| samples[r + 1 - c]);
    let b = DVector::from_fn(m, |r, _| samples[r + 2]);
    let c = a.svd(true, true).solve(&b, 1e-14).ok()?;
    let (c1, c2) = (c[0], c[1]);
    let disc = c1 * c1 + 4.0 * c2;
    let modulus = if disc < 0.0 {
        (-c2).sqrt()
    } else {
        let r = disc.sqrt();
        ((c1 + r) / 2.0).abs().max(((c1 - r) / 2.0).abs())
    };
    Some(modulus.ln() / dt)
}

/// Continuous-game weights matching the per-step cost
/// `pace (ℓ−1)² + coordination Σ_j (s − s̄_j)² + effort u²` for `n` agents,
/// whose coordination term is divided by `N`.
pub fn matched_game_weights(w: &CostWeights, n: usize, alpha: f64) -> Result<GameWeights> {
    let raw = [w.pace, w.coordination * n as f64, w.effort];
    let total: f64 = raw.iter().sum();
    GameWeights::new(raw[0] / total, raw[1] / total, raw[2] / total, alpha)
}

/// Two-agent comparison of the receding-horizon run against the
/// closed-form equilibrium.
#[derive(Debug, Clone)]
pub struct PairOracle {
    pub log: RunLog,
    pub solution: AnalyticSolution,
    pub alpha: f64,
    /// Decay rate fitted to the logged gap `γ_1 − γ_2`.
    pub mpc_rate: f64,
    pub analytic_rate: f64,
    /// `max_t |gap_mpc(t) − gap_analytic(t)|` over the run.
    pub max_gap_error: f64,
}

impl PairOracle {
    pub fn relative_rate_error(&self) -> f64 {
        (self.mpc_rate - self.analytic_rate).abs() / self.analytic_rate.abs()
    }
}

/// Runs a two-agent scenario and compares it with the equilibrium at
/// discount `alpha` and the matched weights. The decay rate is fitted over
/// `t ∈ [fit_from, fit_to]`.
pub fn pair_oracle(config: &ScenarioConfig, alpha: f64, fit_from: f64, fit_to: f64) -> Result<PairOracle> {
    if config.agents.len() != 2 {
        return Err(Error::Config("the pair oracle needs exactly two agents".into()));
    }
    let log = run_scenario(config)?;
    let weights = matched_game_weights(&config.mpc.weights, 2, alpha)?;
    let solution = solve_unconstrained_game(&weights, &config.gamma0())?;
    let gap: Vec<(f64, f64)> = std::iter::once((0.0, log.initial_gamma[0] - log.initial_gamma[1]))
        .chain(log.steps.iter().map(|r| (r.t, r.gamma[0] - r.gamma[1])))
        .collect();
    let window: Vec<f64> = gap
        .iter()
        .filter(|(t, _)| *t >= fit_from && *t <= fit_to)
        .map(|g| g.1)
        .collect();
    let mpc_rate = fit_oscillatory_rate(&window, log.h)
        .ok_or_else(|| Error::Invariant("not enough samples to fit a decay rate".into()))?;
    let mut max_gap_error: f64 = 0.0;
    for (t, g) in &gap {
        let analytic = solution.eval(0, *t, 0) - solution.eval(1, *t, 0);
        max_gap_error = max_gap_error.max((g - analytic).abs());
    }
    Ok(PairOracle {
        analytic_rate: solution.convergence_rate(),
        log,
        solution,
        alpha,
        mpc_rate,
        max_gap_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillatory_fit_recovers_a_damped_cosine() {
        let dt = 0.05;
        let y: Vec<f64> = (0..200)
            .map(|k| {
                let t = k as f64 * dt;
                (-0.4 * t).exp() * (1.3 * t + 0.2).cos()
            })
            .collect();
        let rate = fit_oscillatory_rate(&y, dt).unwrap();
        assert!((rate + 0.4).abs() < 1e-9);
    }

    #[test]
    fn log_slope_of_an_exponential() {
        let s: Vec<(f64, f64)> = (0..100)
            .map(|k| (k as f64 * 0.1, 3.0 * (-0.7 * k as f64 * 0.1).exp()))
            .collect();
        assert!((fit_log_slope(&s, 1.0, 8.0, 1e-12).unwrap() + 0.7).abs() < 1e-10);
    }

    #[test]
    fn matched_weights_for_a_pair() {
        let w = matched_game_weights(&CostWeights::default(), 2, 4.0).unwrap();
        assert!((w.w1 - 0.25).abs() < 1e-15 && (w.w2 - 0.5).abs() < 1e-15 && (w.w3 - 0.25).abs() < 1e-15);
    }
}
