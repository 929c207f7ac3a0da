use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CameraRig, Hazard, Intrinsics, MotorcycleState, Mount, Road};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::perception::NoiseParams;
use crate::planner::PlannerParams;
use crate::riskmap::RiskParams;
use crate::simulator::SimParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PinholeParams {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraConfig {
    pub intrinsics: PinholeParams,
    pub width: usize,
    pub height: usize,
    #[serde(default)]
    pub mount: Mount,
}

impl CameraConfig {
    pub fn rig(&self) -> CameraRig {
        CameraRig {
            intrinsics: Intrinsics {
                fx: self.intrinsics.fx,
                fy: self.intrinsics.fy,
                cx: self.intrinsics.cx,
                cy: self.intrinsics.cy,
                width: self.width,
                height: self.height,
            },
            mount: self.mount,
        }
    }
}

/// Per-trial randomization used by batch runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrialConfig {
    /// Start positions are shifted sideways by a uniform draw in
    /// `[-lateral_offset, lateral_offset]` meters.
    pub lateral_offset: f64,
    pub noise: NoiseParams,
    pub base_seed: u64,
    pub count: usize,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            lateral_offset: 0.5,
            noise: NoiseParams::default(),
            base_seed: 0,
            count: 50,
        }
    }
}

/// A validated scenario. Construct with [`load_scenario`] or [`parse_scenario`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub road: Road,
    #[serde(default)]
    pub hazards: Vec<Hazard>,
    pub start: MotorcycleState,
    pub goal: Vec2,
    pub camera: CameraConfig,
    #[serde(default)]
    pub planner_params: PlannerParams,
    #[serde(default)]
    pub risk_params: RiskParams,
    #[serde(default)]
    pub trials: TrialConfig,
    #[serde(default)]
    pub sim: SimParams,
}

impl Scenario {
    pub fn rig(&self) -> CameraRig {
        self.camera.rig()
    }

    /// Checks every scenario invariant, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        self.road.validate()?;
        let mut ids = HashSet::new();
        for h in &self.hazards {
            h.validate()?;
            if !ids.insert(h.id.as_str()) {
                return Err(Error::invalid(format!("duplicate hazard id '{}'", h.id)));
            }
        }
        self.planner_params.validate()?;
        self.risk_params.validate()?;
        self.rig().intrinsics.validate()?;
        self.trials.noise.validate()?;
        self.sim.validate()?;
        if !(self.trials.lateral_offset >= 0.0) {
            return Err(Error::invalid("trials.lateral_offset must be >= 0"));
        }
        self.start.validate(self.planner_params.delta_max)?;
        if !self.road.contains(self.start.position()) {
            return Err(Error::invalid("start outside corridor"));
        }
        if let Some(h) = self
            .hazards
            .iter()
            .find(|h| h.contains(self.start.position()))
        {
            return Err(Error::invalid(format!("start inside hazard '{}'", h.id)));
        }
        if !(self.goal.x.is_finite() && self.goal.y.is_finite()) || !self.road.contains(self.goal) {
            return Err(Error::invalid("goal outside corridor"));
        }
        Ok(())
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let scenario: Scenario = serde_json::from_str(text).map_err(|e| Error::parse("scenario", e))?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let scenario: Scenario =
        serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e))?;
    scenario.validate()?;
    Ok(scenario)
}
