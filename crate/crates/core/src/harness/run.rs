use std::sync::Arc;

use rayon::prelude::*;

use super::config::{LinkDistance, PlantConfig, ScenarioConfig};
use super::log::{RunLog, StepRecord};
use crate::error::{Error, Result};
use crate::mission::{TrajectorySpec, VirtualTimeState};
use crate::mpc::{build_step_problem, correction_term, solve_step, CollisionTerms, MpcConfig, MpcStepSolution};
use crate::netsim::{bootstrap_tables, exchange, TopologySampler};
use crate::plant::{step_ideal, step_pointmass, wind_at, TrackingTarget, VehicleState};

/// Hard check of a returned plan: exact dynamics and bounds.
fn check_solution(sol: &MpcStepSolution, cfg: &MpcConfig) -> Result<()> {
    let h = cfg.h;
    let b = &cfg.bounds;
    for t in 0..sol.u.len() {
        let ds = sol.s[t + 1] - (sol.s[t] + h * sol.l[t] + 0.5 * h * h * sol.u[t]);
        let dl = sol.l[t + 1] - (sol.l[t] + h * sol.u[t]);
        if ds.abs() > 1e-12 * (1.0 + sol.s[t].abs()) || dl.abs() > 1e-12 {
            return Err(Error::Invariant(format!(
                "dynamics residual ({ds:.3e}, {dl:.3e}) at tau = {t}"
            )));
        }
        if sol.u[t].abs() > b.gddot_max + 1e-9 {
            return Err(Error::Invariant(format!(
                "|u_{t}| = {} above {}",
                sol.u[t].abs(),
                b.gddot_max
            )));
        }
    }
    if let Some(l) = sol.l.iter().find(|l| !b.contains_rate(**l, 1e-9)) {
        return Err(Error::Invariant(format!(
            "rate {l} outside [{}, {}]",
            b.gdot_min, b.gdot_max
        )));
    }
    Ok(())
}

/// Runs the receding-horizon loop for `T / h` steps.
///
/// Each step: measure the vehicle, compute the path-following correction,
/// shift the initial condition, solve every agent's problem concurrently,
/// exchange shifted plans over the next topology and move the vehicles
/// toward `x_d(s_1)`.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunLog> {
    config.validate()?;
    let n = config.agents.len();
    let h = config.mpc.h;
    let k_horizon = config.mpc.horizon;
    let specs: Vec<Arc<TrajectorySpec>> = config.agents.iter().map(|a| Arc::new(a.trajectory.clone())).collect();
    let cfgs: Vec<MpcConfig> = (0..n).map(|i| config.agent_mpc(i)).collect::<Result<_>>()?;
    let gamma0 = config.gamma0();

    let mut current: Vec<VirtualTimeState> = config
        .agents
        .iter()
        .map(|a| VirtualTimeState::new(a.gamma0, a.gamma_dot0))
        .collect();
    let mut vehicles: Vec<VehicleState> = (0..n)
        .map(|i| step_ideal(&specs[i], current[i].gamma, current[i].gamma_dot))
        .collect();
    let mut sampler = TopologySampler::new(config.link, n, config.seed)?;
    let mut previous: Option<Vec<MpcStepSolution>> = None;
    let mut log = RunLog {
        name: config.name.clone(),
        h,
        initial_gamma: gamma0.clone(),
        bounds: cfgs.iter().map(|c| c.bounds).collect(),
        steps: Vec::with_capacity(config.steps()),
    };

    for step in 1..=config.steps() {
        let t_prev = (step - 1) as f64 * h;
        let link_positions: Vec<_> = match config.link_distance {
            LinkDistance::Desired => (0..n).map(|i| specs[i].position(current[i].gamma)).collect(),
            LinkDistance::Actual => vehicles.iter().map(|v| v.position).collect(),
        };
        let graph = sampler.update(&link_positions, t_prev);
        let tables = match &previous {
            None => bootstrap_tables(&gamma0, &graph, k_horizon, h),
            Some(sols) => exchange(sols, &graph, h),
        };

        let corrections: Vec<f64> = (0..n)
            .map(|i| {
                let target = specs[i].eval(current[i].gamma);
                let target_vel = target.velocity * current[i].gamma_dot;
                correction_term(
                    &vehicles[i].position,
                    &target.position,
                    &target_vel,
                    cfgs[i].beta,
                    cfgs[i].delta,
                )
            })
            .collect();

        let solutions: Vec<MpcStepSolution> = tables
            .into_par_iter()
            .enumerate()
            .map(|(i, table)| {
                let collision = config.collision.as_ref().map(|c| CollisionTerms {
                    weight: c.weights[i],
                    near: c.near[i],
                    far: c.far[i],
                    own: specs[i].clone(),
                    fleet: specs.clone(),
                    nominal: previous
                        .as_ref()
                        .map(|p| p[i].shifted_prediction(h).iter().map(|s| s - corrections[i]).collect()),
                });
                let problem = build_step_problem(&current[i], corrections[i], &cfgs[i], table, collision);
                solve_step(&problem, &cfgs[i])
                    .and_then(|sol| check_solution(&sol, &cfgs[i]).map(|_| sol))
                    .map_err(|e| Error::AgentStep {
                        step,
                        agent: i,
                        source: Box::new(e),
                    })
            })
            .collect::<Result<_>>()?;

        for i in 0..n {
            let sol = &solutions[i];
            current[i] = VirtualTimeState {
                gamma: sol.s[1],
                gamma_dot: sol.l[1],
                gamma_ddot: sol.u[0],
            };
            vehicles[i] = match &config.plant {
                PlantConfig::Ideal => step_ideal(&specs[i], sol.s[1], sol.l[1]),
                PlantConfig::PointMass { gains, drag, wind } => {
                    // reference at the start of the step, so the explicit
                    // update lands on x_d(s_1) to second order
                    let d = specs[i].eval(sol.s[0]);
                    let target = TrackingTarget {
                        position: d.position,
                        velocity: d.velocity * sol.l[0],
                        acceleration: d.acceleration * sol.l[0] * sol.l[0] + d.velocity * sol.u[0],
                    };
                    step_pointmass(&vehicles[i], &target, &wind_at(wind, t_prev, *drag), gains, h)
                }
            };
        }

        log.steps.push(StepRecord {
            t: step as f64 * h,
            gamma: current.iter().map(|c| c.gamma).collect(),
            gamma_dot: current.iter().map(|c| c.gamma_dot).collect(),
            gamma_ddot: current.iter().map(|c| c.gamma_ddot).collect(),
            position: vehicles.iter().map(|v| v.position).collect(),
            correction: corrections,
            solve_time: solutions.iter().map(|s| s.solve_time).collect(),
            topology: graph.upper_triangle(),
        });
        previous = Some(solutions);
    }
    Ok(log)
}
