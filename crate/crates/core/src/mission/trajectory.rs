use serde::{Deserialize, Serialize};

use super::Vec3;
use crate::error::{Error, Result};

/// Position and its first two time derivatives at one mission time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub position: Vec3,
    pub velocity: Vec3,
    pub acceleration: Vec3,
}

/// One waypoint of a [`TrajectoryKind::PolyLine`]. Missing derivatives are
/// filled in: velocity by central differences (zero at the ends),
/// acceleration with zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyKnot {
    pub time: f64,
    pub position: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acceleration: Option<[f64; 3]>,
}

fn zero2() -> [f64; 2] {
    [0.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectoryKind {
    Circle {
        #[serde(default = "zero2")]
        center: [f64; 2],
        radius: f64,
        angular_rate: f64,
        #[serde(default)]
        phase: f64,
        altitude: f64,
    },
    Helix {
        #[serde(default = "zero2")]
        center: [f64; 2],
        radius: f64,
        angular_rate: f64,
        #[serde(default)]
        phase: f64,
        altitude: f64,
        climb_rate: f64,
    },
    /// `x = X sin(v (tau + offset) + eps)`, `y = Y sin(w (tau + offset))`,
    /// rotated by `heading` about the vertical axis and translated to `center`.
    Lissajous {
        x_amp: f64,
        y_amp: f64,
        x_freq: f64,
        y_freq: f64,
        #[serde(default)]
        phase: f64,
        altitude: f64,
        #[serde(default)]
        heading: f64,
        #[serde(default)]
        time_offset: f64,
        #[serde(default = "zero2")]
        center: [f64; 2],
    },
    /// Quintic Hermite segments between knots; C2 at every junction.
    PolyLine { knots: Vec<PolyKnot> },
}

/// A desired trajectory `x_d : [0, duration] -> R^3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySpec {
    #[serde(flatten)]
    pub kind: TrajectoryKind,
    pub duration: f64,
}

impl TrajectorySpec {
    pub fn new(kind: TrajectoryKind, duration: f64) -> Result<Self> {
        let spec = TrajectorySpec { kind, duration };
        spec.validate()?;
        Ok(spec)
    }

    pub fn circle(radius: f64, angular_rate: f64, phase: f64, altitude: f64, duration: f64) -> Result<Self> {
        Self::new(
            TrajectoryKind::Circle {
                center: [0.0, 0.0],
                radius,
                angular_rate,
                phase,
                altitude,
            },
            duration,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::Trajectory(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        match &self.kind {
            TrajectoryKind::Circle {
                radius, angular_rate, ..
            }
            | TrajectoryKind::Helix {
                radius, angular_rate, ..
            } => {
                if !(*radius > 0.0) {
                    return Err(Error::Trajectory(format!("radius must be positive, got {radius}")));
                }
                if !angular_rate.is_finite() {
                    return Err(Error::Trajectory("angular rate must be finite".into()));
                }
            }
            TrajectoryKind::Lissajous {
                x_amp,
                y_amp,
                x_freq,
                y_freq,
                ..
            } => {
                if ![x_amp, y_amp, x_freq, y_freq].iter().all(|v| v.is_finite()) {
                    return Err(Error::Trajectory("lissajous parameters must be finite".into()));
                }
            }
            TrajectoryKind::PolyLine { knots } => {
                if knots.len() < 2 {
                    return Err(Error::Trajectory("a polyline needs at least two knots".into()));
                }
                if knots[0].time != 0.0 {
                    return Err(Error::Trajectory("the first knot must sit at time 0".into()));
                }
                for (i, w) in knots.windows(2).enumerate() {
                    if !(w[1].time > w[0].time) {
                        return Err(Error::Trajectory(format!(
                            "segment {i} has non-positive duration ({} -> {})",
                            w[0].time, w[1].time
                        )));
                    }
                }
                let last = knots[knots.len() - 1].time;
                if (last - self.duration).abs() > 1e-9 {
                    return Err(Error::Trajectory(format!(
                        "polyline ends at {last} but duration is {}",
                        self.duration
                    )));
                }
            }
        }
        Ok(())
    }

    /// Exact position, velocity and acceleration at mission time `tau`.
    /// Outside `[0, duration]` the nearest endpoint is held with zero derivatives.
    pub fn eval(&self, tau: f64) -> TrajectorySample {
        if tau > self.duration || tau < 0.0 {
            let end = if tau < 0.0 { 0.0 } else { self.duration };
            return TrajectorySample {
                position: self.eval_inside(end).position,
                velocity: Vec3::zeros(),
                acceleration: Vec3::zeros(),
            };
        }
        self.eval_inside(tau)
    }

    pub fn position(&self, tau: f64) -> Vec3 {
        self.eval(tau).position
    }

    fn eval_inside(&self, tau: f64) -> TrajectorySample {
        match &self.kind {
            TrajectoryKind::Circle {
                center,
                radius,
                angular_rate,
                phase,
                altitude,
            } => circular(*center, *radius, *angular_rate, *phase, *altitude, 0.0, tau),
            TrajectoryKind::Helix {
                center,
                radius,
                angular_rate,
                phase,
                altitude,
                climb_rate,
            } => circular(*center, *radius, *angular_rate, *phase, *altitude, *climb_rate, tau),
            TrajectoryKind::Lissajous {
                x_amp,
                y_amp,
                x_freq,
                y_freq,
                phase,
                altitude,
                heading,
                time_offset,
                center,
            } => {
                let ax = x_freq * (tau + time_offset) + phase;
                let ay = y_freq * (tau + time_offset);
                let local = [
                    [x_amp * ax.sin(), y_amp * ay.sin()],
                    [x_amp * x_freq * ax.cos(), y_amp * y_freq * ay.cos()],
                    [-x_amp * x_freq * x_freq * ax.sin(), -y_amp * y_freq * y_freq * ay.sin()],
                ];
                let (s, c) = heading.sin_cos();
                let rot = |v: [f64; 2]| Vec3::new(c * v[0] - s * v[1], s * v[0] + c * v[1], 0.0);
                TrajectorySample {
                    position: rot(local[0]) + Vec3::new(center[0], center[1], *altitude),
                    velocity: rot(local[1]),
                    acceleration: rot(local[2]),
                }
            }
            TrajectoryKind::PolyLine { knots } => eval_polyline(knots, tau),
        }
    }
}

fn circular(center: [f64; 2], r: f64, w: f64, phase: f64, alt: f64, climb: f64, tau: f64) -> TrajectorySample {
    let (s, c) = (w * tau + phase).sin_cos();
    TrajectorySample {
        position: Vec3::new(center[0] + r * c, center[1] + r * s, alt + climb * tau),
        velocity: Vec3::new(-r * w * s, r * w * c, climb),
        acceleration: Vec3::new(-r * w * w * c, -r * w * w * s, 0.0),
    }
}

fn knot_velocity(knots: &[PolyKnot], i: usize) -> Vec3 {
    if let Some(v) = knots[i].velocity {
        return Vec3::from(v);
    }
    if i == 0 || i + 1 == knots.len() {
        return Vec3::zeros();
    }
    let (a, b) = (&knots[i - 1], &knots[i + 1]);
    (Vec3::from(b.position) - Vec3::from(a.position)) / (b.time - a.time)
}

fn knot_acceleration(knots: &[PolyKnot], i: usize) -> Vec3 {
    knots[i].acceleration.map(Vec3::from).unwrap_or_else(Vec3::zeros)
}

fn eval_polyline(knots: &[PolyKnot], tau: f64) -> TrajectorySample {
    // index of the segment containing tau; the last segment owns its right end
    let seg = match knots.partition_point(|k| k.time <= tau) {
        0 => 0,
        n => (n - 1).min(knots.len() - 2),
    };
    let (k0, k1) = (&knots[seg], &knots[seg + 1]);
    let t = k1.time - k0.time;
    let p0 = Vec3::from(k0.position);
    let p1 = Vec3::from(k1.position);
    let v0 = knot_velocity(knots, seg) * t;
    let v1 = knot_velocity(knots, seg + 1) * t;
    let a0 = knot_acceleration(knots, seg) * (t * t);
    let a1 = knot_acceleration(knots, seg + 1) * (t * t);
    let dp = p1 - p0;
    let c = [
        p0,
        v0,
        a0 * 0.5,
        dp * 10.0 - v0 * 6.0 - v1 * 4.0 - (a0 * 3.0 - a1) * 0.5,
        dp * -15.0 + v0 * 8.0 + v1 * 7.0 + (a0 * 3.0 - a1 * 2.0) * 0.5,
        dp * 6.0 - (v0 + v1) * 3.0 - (a0 - a1) * 0.5,
    ];
    let s = (tau - k0.time) / t;
    let mut pos = Vec3::zeros();
    let mut vel = Vec3::zeros();
    let mut acc = Vec3::zeros();
    for k in (0..6).rev() {
        pos = pos * s + c[k];
    }
    for k in (1..6).rev() {
        vel = vel * s + c[k] * k as f64;
    }
    for k in (2..6).rev() {
        acc = acc * s + c[k] * (k * (k - 1)) as f64;
    }
    TrajectorySample {
        position: pos,
        velocity: vel / t,
        acceleration: acc / (t * t),
    }
}
