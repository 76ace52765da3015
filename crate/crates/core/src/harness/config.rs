use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mission::{derive_rate_bounds, AgentLimits, RateBounds, TrajectorySpec};
use crate::mpc::MpcConfig;
use crate::netsim::LinkModel;
use crate::plant::{TrackerGains, WindProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    pub trajectory: TrajectorySpec,
    pub gamma0: f64,
    #[serde(default = "one")]
    pub gamma_dot0: f64,
    /// Per-agent rate bounds; overrides the shared MPC bounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<RateBounds>,
    /// Vehicle limits the rate bounds are derived from, when `bounds` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limits: Option<AgentLimits>,
}

fn one() -> f64 {
    1.0
}

/// Which positions the distance-gated links are measured between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkDistance {
    /// Desired-trajectory points at the agents' current virtual times.
    #[default]
    Desired,
    /// Actual vehicle positions.
    Actual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlantConfig {
    Ideal,
    PointMass {
        #[serde(default)]
        gains: TrackerGains,
        /// Wind speed to acceleration factor (1/s).
        #[serde(default = "one")]
        drag: f64,
        wind: WindProfile,
    },
}

/// Separation penalty parameters, one entry per agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollisionConfig {
    pub weights: Vec<f64>,
    /// Full-strength radius `a` per agent (m).
    pub near: Vec<f64>,
    /// Activation radius `b` per agent (m).
    pub far: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// Total simulated time `T` (s).
    pub duration: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_eps")]
    pub consensus_eps: f64,
    pub mpc: MpcConfig,
    pub link: LinkModel,
    #[serde(default)]
    pub link_distance: LinkDistance,
    pub plant: PlantConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collision: Option<CollisionConfig>,
    pub agents: Vec<AgentConfig>,
}

fn default_eps() -> f64 {
    0.05
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: ScenarioConfig = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.mpc.h).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.mpc.validate()?;
        self.link.validate()?;
        if self.agents.is_empty() {
            return Err(Error::Config("scenario has no agents".into()));
        }
        let steps = self.duration / self.mpc.h;
        if !(self.duration >= 0.0) || (steps - steps.round()).abs() > 1e-6 {
            return Err(Error::Config(format!(
                "duration {} is not a multiple of h = {}",
                self.duration, self.mpc.h
            )));
        }
        if !(self.consensus_eps > 0.0) {
            return Err(Error::Config("consensus_eps must be positive".into()));
        }
        if let PlantConfig::PointMass { gains, drag, wind } = &self.plant {
            wind.validate()?;
            if !(gains.kp > 0.0 && gains.kd > 0.0 && gains.a_max > 0.0 && *drag >= 0.0) {
                return Err(Error::Config(format!(
                    "invalid tracker parameters {gains:?}, drag {drag}"
                )));
            }
        }
        if let Some(c) = &self.collision {
            let n = self.agents.len();
            if c.weights.len() != n || c.near.len() != n || c.far.len() != n {
                return Err(Error::Config("collision lists need one entry per agent".into()));
            }
            for i in 0..n {
                if !(c.weights[i] > 0.0 && 0.0 < c.near[i] && c.near[i] < c.far[i]) {
                    return Err(Error::Config(format!("collision parameters of agent {i} are invalid")));
                }
            }
        }
        for (i, a) in self.agents.iter().enumerate() {
            a.trajectory.validate()?;
            let b = self.agent_bounds(i)?;
            if !b.contains_rate(a.gamma_dot0, 0.0) {
                return Err(Error::Config(format!(
                    "agent {i}: initial rate {} outside [{}, {}]",
                    a.gamma_dot0, b.gdot_min, b.gdot_max
                )));
            }
        }
        Ok(())
    }

    pub fn agent_bounds(&self, i: usize) -> Result<RateBounds> {
        let a = &self.agents[i];
        match (&a.bounds, &a.limits) {
            (Some(b), _) => {
                b.validate()?;
                Ok(*b)
            }
            (None, Some(l)) => derive_rate_bounds(l),
            (None, None) => Ok(self.mpc.bounds),
        }
    }

    pub fn agent_mpc(&self, i: usize) -> Result<MpcConfig> {
        Ok(MpcConfig {
            bounds: self.agent_bounds(i)?,
            ..self.mpc.clone()
        })
    }

    pub fn gamma0(&self) -> Vec<f64> {
        self.agents.iter().map(|a| a.gamma0).collect()
    }
}
