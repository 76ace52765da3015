//! One receding-horizon step for an agent that lags its neighbor.

use timecoord::mission::{RateBounds, VirtualTimeState};
use timecoord::mpc::{build_step_problem, solve_step, MpcConfig, NeighborPrediction};

fn main() -> timecoord::Result<()> {
    let cfg = MpcConfig::new(10, 0.05, RateBounds::new(0.0, 2.0, 6.0)?)?;
    let lead = 0.5;
    let neighbor = NeighborPrediction {
        agent: 1,
        weight: 1.0,
        current: lead,
        s: (1..=cfg.horizon).map(|k| lead + k as f64 * cfg.h).collect(),
    };
    let p = build_step_problem(&VirtualTimeState::new(0.0, 1.0), 0.0, &cfg, vec![neighbor], None);
    let sol = solve_step(&p, &cfg)?;
    println!("{:>3} {:>8} {:>8} {:>8}", "k", "s", "rate", "accel");
    for k in 0..cfg.horizon {
        println!("{k:>3} {:8.4} {:8.4} {:8.4}", sol.s[k], sol.l[k], sol.u[k]);
    }
    println!(
        "objective {:.6}, kkt residual {:.1e}, active {:?}",
        sol.objective, sol.kkt_residual, sol.active
    );
    Ok(())
}
