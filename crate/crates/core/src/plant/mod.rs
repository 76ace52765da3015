//! Vehicle motion: a perfect tracker and a point mass under PD tracking with
//! a wind disturbance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mission::{TrajectorySpec, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub position: Vec3,
    pub velocity: Vec3,
}

/// Vehicle exactly on its reparameterized path: `x_d(γ)` moving at `ẋ_d(γ) γ̇`.
pub fn step_ideal(spec: &TrajectorySpec, gamma: f64, gamma_dot: f64) -> VehicleState {
    let sample = spec.eval(gamma);
    VehicleState {
        position: sample.position,
        velocity: sample.velocity * gamma_dot,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackerGains {
    pub kp: f64,
    pub kd: f64,
    /// Acceleration saturation (m/s²).
    pub a_max: f64,
}

impl Default for TrackerGains {
    fn default() -> Self {
        TrackerGains {
            kp: 16.0,
            kd: 8.0,
            a_max: 20.0,
        }
    }
}

/// Reference the tracker is steered toward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingTarget {
    pub position: Vec3,
    pub velocity: Vec3,
    pub acceleration: Vec3,
}

/// One semi-implicit Euler step of the PD-tracked point mass. The commanded
/// acceleration is saturated at `a_max`; wind acceleration is added on top.
pub fn step_pointmass(
    state: &VehicleState,
    target: &TrackingTarget,
    wind: &Vec3,
    gains: &TrackerGains,
    h: f64,
) -> VehicleState {
    let mut command = target.acceleration
        + gains.kp * (target.position - state.position)
        + gains.kd * (target.velocity - state.velocity);
    let norm = command.norm();
    if norm > gains.a_max {
        command *= gains.a_max / norm;
    }
    let velocity = state.velocity + h * (command + wind);
    VehicleState {
        position: state.position + h * velocity,
        velocity,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WindProfile {
    None,
    /// Speed `v0` decaying linearly to zero at `t_end`, blowing along `direction`.
    LinearDecay {
        v0: f64,
        t_end: f64,
        direction: [f64; 3],
    },
}

impl WindProfile {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WindProfile::None => Ok(()),
            WindProfile::LinearDecay { v0, t_end, direction } => {
                let norm = Vec3::from(direction).norm();
                if v0 >= 0.0 && t_end > 0.0 && (norm - 1.0).abs() < 1e-9 {
                    Ok(())
                } else {
                    Err(Error::Config(format!("invalid wind profile {self:?}")))
                }
            }
        }
    }
}

/// Wind as an acceleration: `drag · speed(t) · direction`.
pub fn wind_at(profile: &WindProfile, t: f64, drag: f64) -> Vec3 {
    match *profile {
        WindProfile::None => Vec3::zeros(),
        WindProfile::LinearDecay { v0, t_end, direction } => {
            Vec3::from(direction) * (drag * v0 * (1.0 - t / t_end).max(0.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hold(p: Vec3) -> TrackingTarget {
        TrackingTarget {
            position: p,
            velocity: Vec3::zeros(),
            acceleration: Vec3::zeros(),
        }
    }

    #[test]
    fn ideal_tracker_sits_on_the_path() {
        let spec = TrajectorySpec::circle(2.0, 0.5, 0.0, 1.0, 30.0).unwrap();
        let v = step_ideal(&spec, 0.0, 1.3);
        assert_eq!(v.position, spec.position(0.0));
        assert!((v.velocity.norm() - 2.0 * 0.5 * 1.3).abs() < 1e-9);
    }

    #[test]
    fn zero_error_follows_target_acceleration() {
        let target = TrackingTarget {
            position: Vec3::new(1.0, 2.0, 3.0),
            velocity: Vec3::new(0.5, 0.0, 0.0),
            acceleration: Vec3::new(0.0, 1.0, 0.0),
        };
        let s = VehicleState {
            position: target.position,
            velocity: target.velocity,
        };
        let next = step_pointmass(&s, &target, &Vec3::zeros(), &TrackerGains::default(), 0.01);
        assert!((next.velocity - (target.velocity + 0.01 * target.acceleration)).norm() < 1e-15);
    }

    #[test]
    fn wind_profile() {
        let w = WindProfile::LinearDecay {
            v0: 7.0,
            t_end: 18.0,
            direction: [0.0, -1.0, 0.0],
        };
        assert_eq!(wind_at(&w, 0.0, 1.0), Vec3::new(0.0, -7.0, 0.0));
        assert_eq!(wind_at(&w, 9.0, 1.0), Vec3::new(0.0, -3.5, 0.0));
        assert_eq!(wind_at(&w, 18.0, 1.0), Vec3::zeros());
        assert_eq!(wind_at(&w, 30.0, 1.0), Vec3::zeros());
        assert!(WindProfile::LinearDecay {
            v0: 1.0,
            t_end: 1.0,
            direction: [1.0, 1.0, 0.0]
        }
        .validate()
        .is_err());
    }

    #[test]
    fn constant_wind_offset() {
        let gains = TrackerGains::default();
        let wind = Vec3::new(0.0, -2.0, 0.0);
        let mut s = VehicleState {
            position: Vec3::zeros(),
            velocity: Vec3::zeros(),
        };
        for _ in 0..20_000 {
            s = step_pointmass(&s, &hold(Vec3::zeros()), &wind, &gains, 0.001);
        }
        let expected = 2.0 / gains.kp;
        assert!((s.position.norm() - expected).abs() < 0.05 * expected);
    }
}
