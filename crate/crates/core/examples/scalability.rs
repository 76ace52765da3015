//! Concentric circles with growing fleets.

use timecoord::harness::{run_scenario, scenarios, RunSummary};

fn main() -> timecoord::Result<()> {
    println!(
        "{:>4} {:>11} {:>11} {:>10}",
        "N", "mean solve", "max solve", "consensus"
    );
    for n in [5, 10, 20, 30] {
        let s = RunSummary::of(&run_scenario(&scenarios::scenario_concentric(n))?, 0.05);
        let consensus = s.consensus_time.map_or("-".into(), |t| format!("{t:.2} s"));
        println!(
            "{n:>4} {:>11.2e} {:>11.2e} {consensus:>10}",
            s.mean_solve_time, s.max_solve_time
        );
    }
    Ok(())
}
