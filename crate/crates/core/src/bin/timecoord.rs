use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use timecoord::analytic::verify::{verify_random, VerifyReport};
use timecoord::harness::{
    audit_constraints, export_csv, export_summary, pair_oracle, run_scenario, scenarios, RunSummary, ScenarioConfig,
};

#[derive(Parser)]
#[command(version, about = "Virtual-time coordination of multi-vehicle missions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a TOML file (or a builtin name) and write its log.
    Run {
        config: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Spread tolerance for the consensus time.
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
    },
    /// Randomized check of the closed-form equilibrium.
    VerifyAnalytic {
        #[arg(long, default_value_t = 300)]
        draws: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the two-agent run with the closed-form equilibrium.
    Oracle {
        /// Discount rate; defaults to 1/(K h).
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        fit_from: f64,
        #[arg(long, default_value_t = 12.0)]
        fit_to: f64,
    },
    /// Concentric-circle runs over a range of fleet sizes.
    Scale {
        #[arg(long, value_delimiter = ',', default_values_t = [10, 20, 30])]
        agents: Vec<usize>,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
    },
}

fn load(config: &str) -> timecoord::Result<ScenarioConfig> {
    match scenarios::builtin(config) {
        Some(c) => Ok(c),
        None => ScenarioConfig::load(config.as_ref()),
    }
}

fn print_summary(s: &RunSummary) {
    println!("scenario        {}", s.name);
    println!("agents          {}", s.agents);
    println!("steps           {}", s.steps);
    match s.consensus_time {
        Some(t) => println!("consensus       {t:.2} s (eps {})", s.consensus_eps),
        None => println!("consensus       not reached (eps {})", s.consensus_eps),
    }
    println!("final spread    {:.4}", s.final_spread);
    println!("min distance    {:.3} m", s.min_distance);
    println!(
        "solve time      mean {:.2e} s, max {:.2e} s",
        s.mean_solve_time, s.max_solve_time
    );
    println!("violations      {}", s.bound_violations);
    println!("hash            {}", s.hash);
}

fn run(config: &str, seed: Option<u64>, out: PathBuf, eps: f64) -> timecoord::Result<bool> {
    let mut cfg = load(config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let log = run_scenario(&cfg)?;
    std::fs::create_dir_all(&out)?;
    export_csv(&log, &out.join(format!("{}.csv", cfg.name)))?;
    let summary = export_summary(&log, eps, &out.join(format!("{}_summary.toml", cfg.name)))?;
    print_summary(&summary);
    for v in audit_constraints(&log, 1e-9).iter().take(10) {
        eprintln!("violation: {v:?}");
    }
    Ok(summary.bound_violations == 0)
}

fn verify(draws: usize, seed: u64) -> bool {
    let r = verify_random(draws, seed);
    println!("draws           {} ({} singular skipped)", r.draws, r.singular);
    println!(
        "branches        oscillatory {}, critical {}, real-distinct {}",
        r.per_branch[0], r.per_branch[1], r.per_branch[2]
    );
    let line = |name: &str, value: f64, tol: f64| {
        println!(
            "{name:<16}{value:.3e} (< {tol:.0e}) {}",
            if value < tol { "ok" } else { "FAIL" }
        );
    };
    line("EL residual", r.max_residual, VerifyReport::RESIDUAL_TOL);
    line("boundary", r.max_boundary_error, VerifyReport::BOUNDARY_TOL);
    line("roots", r.max_root_error, VerifyReport::ROOT_TOL);
    line("pairwise gap", r.max_gap_error, VerifyReport::GAP_TOL);
    r.passed()
}

fn oracle(alpha: Option<f64>, from: f64, to: f64) -> timecoord::Result<bool> {
    let cfg = scenarios::scenario_pair();
    let alpha = alpha.unwrap_or(1.0 / (cfg.mpc.horizon as f64 * cfg.mpc.h));
    let o = pair_oracle(&cfg, alpha, from, to)?;
    println!("alpha           {alpha}");
    println!("branch          {}", o.solution.branch().name());
    println!("rate (mpc)      {:.4}", o.mpc_rate);
    println!("rate (analytic) {:.4}", o.analytic_rate);
    println!("relative error  {:.1}%", 100.0 * o.relative_rate_error());
    println!("max gap error   {:.4}", o.max_gap_error);
    Ok(audit_constraints(&o.log, 1e-9).is_empty())
}

fn scale(sizes: &[usize], eps: f64) -> timecoord::Result<bool> {
    println!(
        "{:>4} {:>12} {:>12} {:>10} {:>10}",
        "N", "mean solve", "max solve", "consensus", "violations"
    );
    let mut ok = true;
    for &n in sizes {
        let log = run_scenario(&scenarios::scenario_concentric(n))?;
        let s = RunSummary::of(&log, eps);
        let consensus = s.consensus_time.map_or("-".to_string(), |t| format!("{t:.2}"));
        println!(
            "{:>4} {:>12.2e} {:>12.2e} {:>10} {:>10}",
            n, s.mean_solve_time, s.max_solve_time, consensus, s.bound_violations
        );
        ok &= s.bound_violations == 0;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, seed, out, eps } => run(&config, seed, out, eps),
        Command::VerifyAnalytic { draws, seed } => Ok(verify(draws, seed)),
        Command::Oracle {
            alpha,
            fit_from,
            fit_to,
        } => oracle(alpha, fit_from, fit_to),
        Command::Scale { agents, eps } => scale(&agents, eps),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("invariant check failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
