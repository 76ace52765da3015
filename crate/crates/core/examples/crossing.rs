//! Crossing lanes with and without the distance penalty.

use timecoord::harness::{min_pairwise_distance, run_scenario, scenarios};

fn main() -> timecoord::Result<()> {
    let with = scenarios::scenario_crossing();
    let mut without = with.clone();
    without.collision = None;
    for (label, cfg) in [("penalty", with), ("no penalty", without)] {
        let log = run_scenario(&cfg)?;
        let (min, _) = min_pairwise_distance(&log);
        let spread = log.spread().last().map_or(0.0, |s| s.1);
        println!("{label:<11} min distance {min:.3} m, final spread {spread:.3}");
    }
    Ok(())
}
