use super::{solve_unconstrained_game, AnalyticSolution};
use crate::error::{Error, Result};
use crate::mission::{GameWeights, RateBounds};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityOptions {
    /// Spacing of the dense check grid (s).
    pub grid_step: f64,
    /// The grid covers `[0, horizon_factor / |rate|]`; beyond it the
    /// exponential envelope certifies the tail.
    pub horizon_factor: f64,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        FeasibilityOptions {
            grid_step: 0.005,
            horizon_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FeasibleAlpha {
    pub alpha: f64,
    pub solution: AnalyticSolution,
    /// `(alpha, worst violation)` for every tested value, in order.
    pub attempts: Vec<(f64, f64)>,
    /// Set when `W >= 0` and `w1/w3 > alpha`, where the existence argument
    /// for the non-oscillatory branches is not known to apply.
    pub warning: Option<String>,
}

/// Largest bound violation of the shifted equilibrium `γ* + t`; zero or
/// negative means feasible.
fn worst_violation(sol: &AnalyticSolution, bounds: &RateBounds, opts: &FeasibilityOptions) -> f64 {
    let rate = sol.convergence_rate();
    let t_check = opts.horizon_factor / rate.abs();
    let steps = (t_check / opts.grid_step).ceil() as usize;
    let violation = |gdot: f64, gddot: f64| {
        (bounds.gdot_min - gdot)
            .max(gdot - bounds.gdot_max)
            .max(gddot.abs() - bounds.gddot_max)
    };
    let mut worst = f64::NEG_INFINITY;
    for i in 0..sol.agents() {
        for k in 0..=steps {
            let t = k as f64 * opts.grid_step;
            worst = worst.max(violation(1.0 + sol.eval(i, t, 1), sol.eval(i, t, 2)));
        }
        let e1 = sol.derivative_envelope(i, t_check, 1);
        let e2 = sol.derivative_envelope(i, t_check, 2);
        worst = worst.max(violation(1.0 + e1, e2)).max(violation(1.0 - e1, e2));
    }
    worst
}

/// Doubles the discount rate from `alpha_init` until the unconstrained
/// equilibrium also satisfies the rate bounds, i.e. solves the constrained game.
pub fn find_feasible_alpha(
    weights: &GameWeights,
    gamma0: &[f64],
    bounds: &RateBounds,
    alpha_init: f64,
    alpha_cap: f64,
    opts: &FeasibilityOptions,
) -> Result<FeasibleAlpha> {
    if !(alpha_init > 0.0 && alpha_init <= alpha_cap) {
        return Err(Error::Config(format!(
            "need 0 < alpha_init <= alpha_cap, got {alpha_init} and {alpha_cap}"
        )));
    }
    bounds.validate()?;
    let mut attempts = Vec::new();
    let mut alpha = alpha_init;
    while alpha <= alpha_cap {
        let w = weights.with_alpha(alpha);
        let sol = solve_unconstrained_game(&w, gamma0)?;
        let worst = worst_violation(&sol, bounds, opts);
        attempts.push((alpha, worst));
        if worst <= 0.0 {
            let warning = (w.discriminant() >= 0.0 && w.w1 / w.w3 > alpha).then(|| {
                format!(
                    "W = {:.3e} >= 0 with w1/w3 = {:.3} > alpha = {alpha}",
                    w.discriminant(),
                    w.w1 / w.w3
                )
            });
            return Ok(FeasibleAlpha {
                alpha,
                solution: sol,
                attempts,
                warning,
            });
        }
        alpha *= 2.0;
    }
    let (last_alpha, worst_violation) = attempts.last().copied().unwrap_or((alpha_init, f64::NAN));
    Err(Error::NoFeasibleAlpha {
        alpha_cap,
        last_alpha,
        worst_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synchronized_start_is_accepted_immediately() {
        let bounds = RateBounds::new(0.0, 2.0, 6.0).unwrap();
        let w = GameWeights::equal(1.0).unwrap();
        let found = find_feasible_alpha(&w, &[3.0; 5], &bounds, 0.5, 64.0, &FeasibilityOptions::default()).unwrap();
        assert_eq!(found.alpha, 0.5);
        assert_eq!(found.attempts.len(), 1);
    }

    #[test]
    fn cap_exceeded_reports_violation() {
        let bounds = RateBounds::new(0.99, 1.01, 0.01).unwrap();
        let w = GameWeights::equal(1.0).unwrap();
        let err =
            find_feasible_alpha(&w, &[0.0, 10.0], &bounds, 0.25, 1.0, &FeasibilityOptions::default()).unwrap_err();
        match err {
            Error::NoFeasibleAlpha {
                worst_violation,
                last_alpha,
                ..
            } => {
                assert!(worst_violation > 0.0);
                assert_eq!(last_alpha, 1.0);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn warns_on_non_oscillatory_weights_with_small_alpha() {
        let bounds = RateBounds::new(0.0, 2.0, 6.0).unwrap();
        let w = GameWeights::new(0.8, 0.05, 0.15, 1.0).unwrap();
        let found = find_feasible_alpha(&w, &[0.0, 0.1], &bounds, 0.5, 64.0, &FeasibilityOptions::default()).unwrap();
        assert!(found.warning.is_some());
    }
}
