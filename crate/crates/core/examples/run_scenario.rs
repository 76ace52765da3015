//! Run a builtin scenario and export its log.
//!
//! `cargo run --example run_scenario -- wind /tmp/out`

use std::path::PathBuf;

use timecoord::harness::{export_csv, export_summary, run_scenario, scenarios};

fn main() -> timecoord::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "ideal".into());
    let out = PathBuf::from(
        args.next()
            .unwrap_or_else(|| std::env::temp_dir().display().to_string()),
    );
    let cfg = scenarios::builtin(&name)
        .unwrap_or_else(|| panic!("unknown scenario {name}, try one of {:?}", scenarios::BUILTIN_NAMES));
    let log = run_scenario(&cfg)?;
    let csv = out.join(format!("{name}.csv"));
    export_csv(&log, &csv)?;
    let summary = export_summary(&log, 0.05, &out.join(format!("{name}_summary.toml")))?;
    println!("{}", toml::to_string(&summary).expect("summary serializes"));
    println!("wrote {}", csv.display());
    for (t, spread) in log.spread().iter().step_by(log.steps.len().max(10) / 10) {
        println!("t {t:5.2}  spread {spread:.4}");
    }
    Ok(())
}
