//! Raise the discount rate until the equilibrium respects the rate bounds.

use timecoord::analytic::{find_feasible_alpha, FeasibilityOptions};
use timecoord::harness::scenarios::SIX_GAMMA0;
use timecoord::mission::{GameWeights, RateBounds};

fn main() -> timecoord::Result<()> {
    let w = GameWeights::equal(0.125)?;
    for gddot in [6.0, 0.6, 0.06] {
        let bounds = RateBounds::new(0.0, 2.0, gddot)?;
        let found = find_feasible_alpha(&w, &SIX_GAMMA0, &bounds, 0.125, 1e6, &FeasibilityOptions::default())?;
        println!(
            "|gddot| <= {gddot:<5} alpha = {:<10} ({} attempts, rate {:.4})",
            found.alpha,
            found.attempts.len(),
            found.solution.convergence_rate()
        );
        if let Some(warning) = found.warning {
            println!("  warning: {warning}");
        }
    }
    Ok(())
}
