//! Two vehicles flying head-on: the distance penalty slows the plan down.

use std::sync::Arc;

use timecoord::mission::{PolyKnot, RateBounds, TrajectoryKind, TrajectorySpec, VirtualTimeState};
use timecoord::mpc::{build_step_problem, solve_step, CollisionTerms, MpcConfig, NeighborPrediction};

fn segment(from: [f64; 3], to: [f64; 3]) -> timecoord::Result<TrajectorySpec> {
    let knot = |time, position| PolyKnot {
        time,
        position,
        velocity: None,
        acceleration: None,
    };
    TrajectorySpec::new(
        TrajectoryKind::PolyLine {
            knots: vec![knot(0.0, from), knot(20.0, to)],
        },
        20.0,
    )
}

fn main() -> timecoord::Result<()> {
    let cfg = MpcConfig::new(10, 0.05, RateBounds::new(0.0, 2.0, 6.0)?)?;
    for gap in [10.0, 3.0, 2.0, 1.5] {
        let own = Arc::new(segment([0.0, 0.0, 2.0], [20.0, 0.0, 2.0])?);
        let other = Arc::new(segment([gap, 0.0, 2.0], [gap - 20.0, 0.0, 2.0])?);
        let terms = CollisionTerms {
            weight: 3.0,
            near: 1.0,
            far: 2.5,
            own: own.clone(),
            fleet: vec![own, other],
            nominal: None,
        };
        // the penalty looks at the neighbor's predicted virtual time
        let neighbor = NeighborPrediction {
            agent: 1,
            weight: 1.0,
            current: 0.0,
            s: (1..=cfg.horizon).map(|k| k as f64 * cfg.h).collect(),
        };
        let p = build_step_problem(&VirtualTimeState::new(0.0, 1.0), 0.0, &cfg, vec![neighbor], Some(terms));
        let sol = solve_step(&p, &cfg)?;
        println!(
            "gap {gap:4.1} m: s_K = {:.4}, first accel {:+.4}",
            sol.s[cfg.horizon], sol.u[0]
        );
    }
    Ok(())
}
