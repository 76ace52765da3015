//! Load a scenario file, change it and run the result.

use timecoord::harness::{consensus_time, run_scenario, ScenarioConfig};

fn main() -> timecoord::Result<()> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/ideal.toml");
    let mut cfg = ScenarioConfig::load(&path)?;
    for coordination in [0.5, 1.0, 4.0] {
        cfg.mpc.weights.coordination = coordination;
        let log = run_scenario(&cfg)?;
        println!(
            "coordination weight {coordination}: consensus at {:?}",
            consensus_time(&log, 0.05)
        );
    }
    Ok(())
}
