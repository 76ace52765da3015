//! Two agents under the receding-horizon controller against the
//! closed-form equilibrium with matched weights.

use timecoord::harness::{pair_oracle, scenarios};

fn main() -> timecoord::Result<()> {
    let cfg = scenarios::scenario_pair();
    let default_alpha = 1.0 / (cfg.mpc.horizon as f64 * cfg.mpc.h);
    for alpha in [default_alpha, 1.0, 4.0] {
        let o = pair_oracle(&cfg, alpha, 1.0, 12.0)?;
        println!(
            "alpha {alpha:4.1}: mpc rate {:.4}, analytic rate {:.4} ({:.1}% apart)",
            o.mpc_rate,
            o.analytic_rate,
            100.0 * o.relative_rate_error()
        );
    }
    Ok(())
}
