//! Domain types shared by every layer: vehicle limits, virtual-time rate
//! bounds, game weights and the desired trajectories themselves.

mod separation;
mod trajectory;

pub use separation::{check_separation, SeparationReport, DEFAULT_GRID_STEP};
pub use trajectory::{PolyKnot, TrajectoryKind, TrajectorySample, TrajectorySpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;

/// Speed and acceleration envelope of one vehicle, together with the band
/// its mission trajectory was planned in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentLimits {
    pub v_min: f64,
    pub v_max: f64,
    pub v_d_min: f64,
    pub v_d_max: f64,
    pub a_max: f64,
    pub a_d_max: f64,
}

impl AgentLimits {
    pub fn validate(&self) -> Result<()> {
        let ordered =
            0.0 <= self.v_min && self.v_min < self.v_d_min && self.v_d_min <= self.v_d_max && self.v_d_max < self.v_max;
        if !ordered {
            return Err(Error::Config(format!(
                "speed limits must satisfy 0 <= v_min < v_d_min <= v_d_max < v_max, got {self:?}"
            )));
        }
        if !(0.0 < self.a_d_max && self.a_d_max < self.a_max) {
            return Err(Error::Config(format!(
                "acceleration limits must satisfy 0 < a_d_max < a_max, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Admissible range of the virtual-time rate and of its derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBounds {
    pub gdot_min: f64,
    pub gdot_max: f64,
    pub gddot_max: f64,
}

impl RateBounds {
    pub fn new(gdot_min: f64, gdot_max: f64, gddot_max: f64) -> Result<Self> {
        let b = RateBounds {
            gdot_min,
            gdot_max,
            gddot_max,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.gdot_min && self.gdot_min <= 1.0 && 1.0 <= self.gdot_max) {
            return Err(Error::Config(format!(
                "rate bounds must bracket the nominal pace: 0 <= {} <= 1 <= {}",
                self.gdot_min, self.gdot_max
            )));
        }
        if !(self.gddot_max > 0.0) || !self.gddot_max.is_finite() {
            return Err(Error::Config(format!(
                "gddot_max must be positive, got {}",
                self.gddot_max
            )));
        }
        Ok(())
    }

    /// Re-substitutes the bounds into the acceleration budget
    /// `gddot_max * v_d_max + gdot_max^2 * a_d_max <= a_max`.
    pub fn acceleration_slack(&self, limits: &AgentLimits) -> f64 {
        limits.a_max - (self.gddot_max * limits.v_d_max + self.gdot_max.powi(2) * limits.a_d_max)
    }

    pub fn contains_rate(&self, rate: f64, tol: f64) -> bool {
        rate >= self.gdot_min - tol && rate <= self.gdot_max + tol
    }
}

/// Tightest rate bounds compatible with the vehicle limits.
pub fn derive_rate_bounds(limits: &AgentLimits) -> Result<RateBounds> {
    limits.validate()?;
    let gdot_min = limits.v_min / limits.v_d_min;
    let gdot_max = limits.v_max / limits.v_d_max;
    let required = gdot_max * gdot_max * limits.a_d_max;
    if limits.a_max <= required {
        return Err(Error::InfeasibleLimits {
            a_max: limits.a_max,
            required,
        });
    }
    Ok(RateBounds {
        gdot_min,
        gdot_max,
        gddot_max: (limits.a_max - required) / limits.v_d_max,
    })
}

/// Virtual time of one agent with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirtualTimeState {
    pub gamma: f64,
    pub gamma_dot: f64,
    pub gamma_ddot: f64,
}

impl VirtualTimeState {
    pub fn new(gamma: f64, gamma_dot: f64) -> Self {
        VirtualTimeState {
            gamma,
            gamma_dot,
            gamma_ddot: 0.0,
        }
    }

    pub fn within(&self, bounds: &RateBounds, tol: f64) -> bool {
        bounds.contains_rate(self.gamma_dot, tol) && self.gamma_ddot.abs() <= bounds.gddot_max + tol
    }
}

/// Relative weights of the pace, coordination and effort penalties plus the
/// discount rate of the continuous game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameWeights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub alpha: f64,
}

impl GameWeights {
    pub fn new(w1: f64, w2: f64, w3: f64, alpha: f64) -> Result<Self> {
        let w = GameWeights { w1, w2, w3, alpha };
        w.validate()?;
        Ok(w)
    }

    /// Equal penalty weights.
    pub fn equal(alpha: f64) -> Result<Self> {
        Self::new(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, alpha)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w1 >= 0.0 && self.w2 >= 0.0 && self.w3 > 0.0) {
            return Err(Error::Config(format!(
                "weights need w1, w2 >= 0 and w3 > 0, got ({}, {}, {})",
                self.w1, self.w2, self.w3
            )));
        }
        if ((self.w1 + self.w2 + self.w3) - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "weights must sum to one, got {}",
                self.w1 + self.w2 + self.w3
            )));
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        Ok(())
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        GameWeights { alpha, ..*self }
    }

    /// `w1^2 - 4 w2 w3`; its sign selects the shape of the equilibrium.
    pub fn discriminant(&self) -> f64 {
        self.w1 * self.w1 - 4.0 * self.w2 * self.w3
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn limits(v_min: f64, v_max: f64, a_max: f64) -> AgentLimits {
        AgentLimits {
            v_min,
            v_max,
            v_d_min: 0.5,
            v_d_max: 1.0,
            a_max,
            a_d_max: 1.0,
        }
    }

    #[test]
    fn ratio_definition() {
        let b = derive_rate_bounds(&limits(0.0, 2.0, 10.0)).unwrap();
        assert_eq!(b.gdot_min, 0.0);
        assert_eq!(b.gdot_max, 2.0);
        assert_eq!(b.gddot_max, 6.0);
    }

    #[test]
    fn acceleration_boundary_is_infeasible() {
        // gdot_max = 2, a_d_max = 1 => a_max = 4 sits exactly on the boundary
        let err = derive_rate_bounds(&limits(0.0, 2.0, 4.0)).unwrap_err();
        assert!(matches!(err, Error::InfeasibleLimits { .. }));
    }

    #[test]
    fn rejects_unordered_speeds() {
        assert!(derive_rate_bounds(&limits(0.6, 2.0, 10.0)).is_err());
        assert!(derive_rate_bounds(&limits(0.0, 0.9, 10.0)).is_err());
    }

    #[test]
    fn bounds_must_admit_unit_rate() {
        assert!(RateBounds::new(0.0, 2.0, 6.0).is_ok());
        assert!(RateBounds::new(1.1, 2.0, 6.0).is_err());
        assert!(RateBounds::new(0.0, 0.9, 6.0).is_err());
        assert!(RateBounds::new(0.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn weights_validation() {
        assert!(GameWeights::equal(1.0).is_ok());
        assert!(GameWeights::new(0.5, 0.5, 0.0, 1.0).is_err());
        assert!(GameWeights::new(0.5, 0.3, 0.3, 1.0).is_err());
        assert!(GameWeights::new(0.2, 0.3, 0.5, 0.0).is_err());
        let w = GameWeights::equal(4.0).unwrap();
        assert!((w.discriminant() - (1.0 / 9.0 - 4.0 / 9.0)).abs() < 1e-15);
    }

    prop_compose! {
        fn feasible_limits()(
            v_min in 0.0..1.0f64,
            d1 in 0.05..1.0f64,
            d2 in 0.0..1.0f64,
            d3 in 0.05..2.0f64,
            a_d_max in 0.1..3.0f64,
            extra in 0.01..5.0f64,
        ) -> AgentLimits {
            let v_d_min = v_min + d1;
            let v_d_max = v_d_min + d2;
            let v_max = v_d_max + d3;
            let gdot_max = v_max / v_d_max;
            AgentLimits {
                v_min, v_max, v_d_min, v_d_max,
                a_max: gdot_max * gdot_max * a_d_max + extra,
                a_d_max,
            }
        }
    }

    proptest! {
        #[test]
        fn derived_bounds_respect_acceleration_budget(l in feasible_limits()) {
            let b = derive_rate_bounds(&l).unwrap();
            prop_assert!(b.validate().is_ok());
            prop_assert!(b.acceleration_slack(&l) >= -1e-9 * l.a_max);
            prop_assert!(b.gdot_min >= l.v_min / l.v_d_min - 1e-12);
            prop_assert!(b.gdot_max <= l.v_max / l.v_d_max + 1e-12);
        }
    }
}
