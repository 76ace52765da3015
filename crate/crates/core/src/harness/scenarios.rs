//! Built-in scenarios. Each is also shipped as a TOML file under `scenarios/`.

use std::f64::consts::PI;

use super::config::{AgentConfig, CollisionConfig, LinkDistance, PlantConfig, ScenarioConfig};
use crate::mission::{PolyKnot, RateBounds, TrajectoryKind, TrajectorySpec};
use crate::mpc::MpcConfig;
use crate::netsim::LinkModel;
use crate::plant::{TrackerGains, WindProfile};

/// Initial virtual times of the six-vehicle missions.
pub const SIX_GAMMA0: [f64; 6] = [2.0, 1.0, 0.0, 3.5, 4.0, 3.0];

/// Mission length of every built-in desired trajectory (s); the vehicles
/// hold their final point if their virtual time runs past it.
const PATH_DURATION: f64 = 80.0;

pub fn default_mpc() -> MpcConfig {
    MpcConfig::new(10, 0.05, RateBounds::new(0.0, 2.0, 6.0).expect("valid bounds")).expect("valid config")
}

fn spec(kind: TrajectoryKind) -> TrajectorySpec {
    TrajectorySpec::new(kind, PATH_DURATION).expect("valid built-in trajectory")
}

fn agents(specs: Vec<TrajectorySpec>, gamma0: &[f64]) -> Vec<AgentConfig> {
    specs
        .into_iter()
        .zip(gamma0)
        .map(|(trajectory, &gamma0)| AgentConfig {
            trajectory,
            gamma0,
            gamma_dot0: 1.0,
            bounds: None,
            limits: None,
        })
        .collect()
}

/// Six separated, heterogeneous paths (circles, helices, a Lissajous figure
/// and a polyline loop) laid out on a 2 x 3 grid.
pub fn heterogeneous_fleet() -> Vec<TrajectorySpec> {
    let knot = |time: f64, p: [f64; 3]| PolyKnot {
        time,
        position: p,
        velocity: None,
        acceleration: None,
    };
    vec![
        spec(TrajectoryKind::Circle {
            center: [0.0, 0.0],
            radius: 3.0,
            angular_rate: 0.4,
            phase: 0.0,
            altitude: 2.0,
        }),
        spec(TrajectoryKind::Helix {
            center: [12.0, 0.0],
            radius: 2.5,
            angular_rate: -0.5,
            phase: 1.0,
            altitude: 1.0,
            climb_rate: 0.05,
        }),
        spec(TrajectoryKind::Lissajous {
            x_amp: 4.0,
            y_amp: 3.0,
            x_freq: 0.3,
            y_freq: 0.6,
            phase: 0.5,
            altitude: 3.0,
            heading: 0.0,
            time_offset: 0.0,
            center: [24.0, 0.0],
        }),
        spec(TrajectoryKind::Circle {
            center: [0.0, 12.0],
            radius: 4.0,
            angular_rate: 0.3,
            phase: 2.0,
            altitude: 4.0,
        }),
        spec(TrajectoryKind::Helix {
            center: [12.0, 12.0],
            radius: 2.0,
            angular_rate: 0.6,
            phase: 0.0,
            altitude: 2.0,
            climb_rate: 0.03,
        }),
        spec(TrajectoryKind::PolyLine {
            knots: vec![
                knot(0.0, [21.0, 9.0, 2.0]),
                knot(20.0, [27.0, 9.0, 2.5]),
                knot(40.0, [27.0, 15.0, 3.0]),
                knot(60.0, [21.0, 15.0, 2.5]),
                knot(PATH_DURATION, [21.0, 9.0, 2.0]),
            ],
        }),
    ]
}

/// Ideal links, ideal tracking, staggered starts.
pub fn scenario_ideal() -> ScenarioConfig {
    ScenarioConfig {
        name: "ideal".into(),
        duration: 36.0,
        seed: 0,
        consensus_eps: 0.05,
        mpc: default_mpc(),
        link: LinkModel::Full,
        link_distance: LinkDistance::Desired,
        plant: PlantConfig::Ideal,
        collision: None,
        agents: agents(heterogeneous_fleet(), &SIX_GAMMA0),
    }
}

/// Distance-gated links (`c = 2.25 m`, `d = 4.5 m`) on stacked circles 1.6 m
/// apart: vehicles 1-2 start out of range of 5-6 and 3-4 relay between them.
pub fn scenario_distance_links() -> ScenarioConfig {
    let specs = (0..6)
        .map(|i| {
            spec(TrajectoryKind::Circle {
                center: [0.0, 0.0],
                radius: 2.0 + 0.1 * i as f64,
                angular_rate: 0.5,
                phase: 0.0,
                altitude: 1.6 * i as f64 + 1.0,
            })
        })
        .collect();
    ScenarioConfig {
        name: "distance_links".into(),
        link: LinkModel::DistanceSmoothed { p1: 2.25, p2: 4.5 },
        agents: agents(specs, &SIX_GAMMA0),
        ..scenario_ideal()
    }
}

/// Wind from +y decaying from 7 m/s to zero at 18 s, point-mass tracking,
/// and links redrawn every 0.5 s with 70 % availability.
pub fn scenario_wind() -> ScenarioConfig {
    ScenarioConfig {
        name: "wind".into(),
        seed: 7,
        link: LinkModel::RandomBernoulli {
            p_up: 0.7,
            refresh_period: 0.5,
        },
        link_distance: LinkDistance::Actual,
        plant: PlantConfig::PointMass {
            gains: TrackerGains::default(),
            drag: 1.0,
            wind: WindProfile::LinearDecay {
                v0: 7.0,
                t_end: 18.0,
                direction: [0.0, -1.0, 0.0],
            },
        },
        ..scenario_ideal()
    }
}

/// Start offset along the figure-eight of the crossing scenario: the
/// vehicles begin at the outer tips instead of all on the shared center.
pub const CROSSING_TIME_OFFSET: f64 = 2.0 * PI;

/// Six figure-eights `x = 0.8 sin(0.5 τ)`, `y = 8 sin(0.25 τ)` rotated by
/// multiples of 30°, all through one center point, with the separation
/// penalty on.
pub fn scenario_crossing() -> ScenarioConfig {
    let specs = (0..6)
        .map(|i| {
            spec(TrajectoryKind::Lissajous {
                x_amp: 0.8,
                y_amp: 8.0,
                x_freq: 0.5,
                y_freq: 0.25,
                phase: 0.0,
                altitude: 2.0,
                heading: i as f64 * PI / 6.0,
                time_offset: CROSSING_TIME_OFFSET,
                center: [0.0, 0.0],
            })
        })
        .collect();
    ScenarioConfig {
        name: "crossing".into(),
        duration: 42.0,
        link: LinkModel::DistanceSmoothed { p1: 10.0, p2: 20.0 },
        collision: Some(CollisionConfig {
            weights: (1..=6).map(|i| i as f64 + 1.0).collect(),
            near: vec![2.35, 2.5, 2.7, 2.8, 2.9, 3.0],
            far: vec![4.7, 5.0, 5.4, 5.6, 5.8, 6.0],
        }),
        agents: agents(specs, &[0.0; 6]),
        ..scenario_ideal()
    }
}

/// `n` concentric circles 1 m apart sharing one angular rate; initial
/// virtual times cycle through [`SIX_GAMMA0`].
pub fn scenario_concentric(n: usize) -> ScenarioConfig {
    let specs = (0..n)
        .map(|i| {
            spec(TrajectoryKind::Circle {
                center: [0.0, 0.0],
                radius: 2.0 + i as f64,
                angular_rate: 0.3,
                phase: 0.0,
                altitude: 2.0,
            })
        })
        .collect();
    let gamma0: Vec<f64> = (0..n).map(|i| SIX_GAMMA0[i % 6]).collect();
    ScenarioConfig {
        name: format!("concentric_{n}"),
        agents: agents(specs, &gamma0),
        ..scenario_ideal()
    }
}

/// Two vehicles one second apart, ideal everything; compared against the
/// closed-form equilibrium.
pub fn scenario_pair() -> ScenarioConfig {
    let specs = (0..2)
        .map(|i| {
            spec(TrajectoryKind::Circle {
                center: [0.0, 0.0],
                radius: 3.0 + 2.0 * i as f64,
                angular_rate: 0.3,
                phase: 0.0,
                altitude: 2.0,
            })
        })
        .collect();
    ScenarioConfig {
        name: "pair".into(),
        duration: 20.0,
        agents: agents(specs, &[0.0, 1.0]),
        ..scenario_ideal()
    }
}

pub fn builtin(name: &str) -> Option<ScenarioConfig> {
    match name {
        "ideal" => Some(scenario_ideal()),
        "distance_links" => Some(scenario_distance_links()),
        "wind" => Some(scenario_wind()),
        "crossing" => Some(scenario_crossing()),
        "pair" => Some(scenario_pair()),
        _ => name
            .strip_prefix("concentric_")
            .and_then(|n| n.parse().ok())
            .filter(|n| *n >= 2)
            .map(scenario_concentric),
    }
}

pub const BUILTIN_NAMES: [&str; 6] = ["ideal", "distance_links", "wind", "crossing", "pair", "concentric_10"];
