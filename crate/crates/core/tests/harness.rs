use std::path::PathBuf;

use proptest::prelude::*;

use timecoord::harness::{
    audit_constraints, consensus_time, export_csv, export_summary, min_pairwise_distance, read_csv, run_scenario,
    scenarios, RunLog, RunSummary, ScenarioConfig, CSV_HEADER,
};

fn short(mut c: ScenarioConfig, duration: f64) -> ScenarioConfig {
    c.duration = duration;
    c
}

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

#[test]
fn shipped_scenario_files_match_the_builtins() {
    for name in scenarios::BUILTIN_NAMES {
        let path = scenario_dir().join(format!("{name}.toml"));
        let loaded = ScenarioConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(loaded, scenarios::builtin(name).unwrap(), "{name}");
    }
}

#[test]
fn config_round_trips_through_toml() {
    for name in scenarios::BUILTIN_NAMES {
        let c = scenarios::builtin(name).unwrap();
        assert_eq!(ScenarioConfig::from_toml(&c.to_toml().unwrap()).unwrap(), c);
    }
}

#[test]
fn malformed_configs_are_rejected() {
    let good = scenarios::scenario_ideal().to_toml().unwrap();
    assert!(ScenarioConfig::from_toml(&good.replace("duration = 36.0", "duration = 36.01")).is_err());
    assert!(ScenarioConfig::from_toml(&good.replace("horizon = 10", "horizon = 10\nhorizn = 3")).is_err());
    assert!(ScenarioConfig::from_toml("name = 3").is_err());
}

#[test]
fn csv_round_trip_is_exact() {
    let log = run_scenario(&short(scenarios::scenario_wind(), 2.0)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.csv");
    export_csv(&log, &path).unwrap();
    let rows = read_csv(&path).unwrap();
    assert_eq!(rows, log.rows());
    assert_eq!(rows.len(), log.steps.len() * log.agents());
}

#[test]
fn empty_run_writes_only_the_header() {
    let log = run_scenario(&short(scenarios::scenario_ideal(), 0.0)).unwrap();
    assert!(log.steps.is_empty());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    export_csv(&log, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.trim_end(), CSV_HEADER.join(","));
    assert!(read_csv(&path).unwrap().is_empty());
}

#[test]
fn summary_is_written_as_toml() {
    let log = run_scenario(&short(scenarios::scenario_ideal(), 3.0)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("summary.toml");
    let summary = export_summary(&log, 0.05, &path).unwrap();
    let back: RunSummary = toml::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, summary);
    assert_eq!(summary.steps, 60);
    assert_eq!(summary.bound_violations, 0);
}

#[test]
fn equal_starts_never_spread() {
    let mut c = short(scenarios::scenario_ideal(), 10.0);
    for a in &mut c.agents {
        a.gamma0 = 1.5;
    }
    let log = run_scenario(&c).unwrap();
    assert!(log.spread().iter().all(|(_, s)| *s == 0.0));
    assert_eq!(consensus_time(&log, 0.05), Some(0.0));
}

#[test]
fn concentric_separation_is_the_radius_step() {
    let log = run_scenario(&short(scenarios::scenario_concentric(10), 5.0)).unwrap();
    let (min, series) = min_pairwise_distance(&log);
    assert_eq!(series.len(), log.steps.len());
    // same altitude, radii 1 m apart: any two vehicles are at least 1 m apart
    assert!((min - 1.0).abs() < 1e-3, "{min}");
}

#[test]
fn runs_are_deterministic_and_respect_bounds() {
    for c in [
        short(scenarios::scenario_wind(), 5.0),
        short(scenarios::scenario_distance_links(), 5.0),
        short(scenarios::scenario_crossing(), 5.0),
    ] {
        let a = run_scenario(&c).unwrap();
        let b = run_scenario(&c).unwrap();
        assert_eq!(a.hash(), b.hash(), "{}", c.name);
        assert!(audit_constraints(&a, 1e-9).is_empty(), "{}", c.name);
    }
    let mut other_seed = short(scenarios::scenario_wind(), 5.0);
    other_seed.seed += 1;
    assert_ne!(
        run_scenario(&other_seed).unwrap().hash(),
        run_scenario(&short(scenarios::scenario_wind(), 5.0)).unwrap().hash()
    );
}

#[test]
fn wind_run_coordinates_after_the_gust() {
    let log = run_scenario(&scenarios::scenario_wind()).unwrap();
    let t = consensus_time(&log, 0.05).expect("consensus before the end of the run");
    assert!(t > 18.0 && t < 36.0, "{t}");
}

#[test]
fn distance_links_relay_to_consensus() {
    let log = run_scenario(&scenarios::scenario_distance_links()).unwrap();
    // vehicles 1-2 and 5-6 start out of range; every link is live only through 3-4
    assert_eq!(log.steps[0].topology[4], 0.0);
    assert!(consensus_time(&log, 0.05).is_some());
}

fn ideal_log() -> &'static RunLog {
    static CELL: std::sync::OnceLock<RunLog> = std::sync::OnceLock::new();
    CELL.get_or_init(|| run_scenario(&scenarios::scenario_ideal()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn consensus_time_is_monotone_in_eps(eps in 0.001f64..2.0, extra in 0.0f64..2.0) {
        let log = ideal_log();
        let tight = consensus_time(log, eps);
        let loose = consensus_time(log, eps + extra);
        match (tight, loose) {
            (Some(a), Some(b)) => prop_assert!(b <= a),
            (None, _) => {}
            (Some(_), None) => prop_assert!(false, "looser tolerance never reached"),
        }
    }
}
