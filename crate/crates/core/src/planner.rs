//! Sampling planner over bicycle-model rollouts.
//!
//! Every `(a, δ̇)` pair on a regular grid is held constant over the horizon
//! and integrated with explicit Euler:
//!
//! ```text
//! x += v cosθ dt    y += v sinθ dt    θ += (v / L) tanδ dt
//! v = max(0, v + a dt)                δ = clamp(δ + δ̇ dt, ±δ_max)
//! ```
//!
//! Each trajectory is scored `J = β_goal ψ_goal + β_speed ψ_speed + β_risk ψ_risk`
//! and the argmin wins.

use std::cmp::Ordering;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::projection::project_trajectory;
use crate::riskmap::RiskMap;
use crate::scene::{normalize_angle, CameraModel, MotorcycleState};

/// How waypoints that fall outside the image enter the risk average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OffImage {
    /// Dropped from numerator and denominator.
    #[default]
    Exclude,
    /// Counted with zero risk.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerParams {
    pub a_min: f64,
    pub a_max: f64,
    pub ddelta_min: f64,
    pub ddelta_max: f64,
    pub n_accel: usize,
    pub n_steer: usize,
    pub dt: f64,
    pub horizon_t: f64,
    pub wheelbase: f64,
    pub v_max: f64,
    pub delta_max: f64,
    pub beta_goal: f64,
    pub beta_speed: f64,
    pub beta_risk: f64,
    pub offimage: OffImage,
    /// Height at which waypoints are placed before projection.
    pub ground_offset: f64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        PlannerParams {
            a_min: -2.0,
            a_max: 1.0,
            ddelta_min: -0.15,
            ddelta_max: 0.15,
            n_accel: 4,
            n_steer: 11,
            dt: 0.05,
            horizon_t: 2.0,
            wheelbase: 1.4,
            v_max: 8.0,
            delta_max: 0.6,
            beta_goal: 1.0,
            beta_speed: 1.0,
            beta_risk: 10.0,
            offimage: OffImage::Exclude,
            ground_offset: 0.0,
        }
    }
}

impl PlannerParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.a_min,
            self.a_max,
            self.ddelta_min,
            self.ddelta_max,
            self.dt,
            self.horizon_t,
            self.wheelbase,
            self.v_max,
            self.delta_max,
            self.beta_goal,
            self.beta_speed,
            self.beta_risk,
            self.ground_offset,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("planner parameters must be finite"));
        }
        if self.a_min > self.a_max {
            return Err(Error::invalid("planner a_min must be <= a_max"));
        }
        if self.ddelta_min > self.ddelta_max {
            return Err(Error::invalid("planner ddelta_min must be <= ddelta_max"));
        }
        if !(self.dt > 0.0) {
            return Err(Error::invalid("planner dt must be > 0"));
        }
        if self.horizon_t < self.dt {
            return Err(Error::invalid("planner horizon_t must be >= dt"));
        }
        if !(self.wheelbase > 0.0) {
            return Err(Error::invalid("planner wheelbase must be > 0"));
        }
        if !(self.v_max > 0.0) {
            return Err(Error::invalid("planner v_max must be > 0"));
        }
        if !(self.delta_max >= 0.0) {
            return Err(Error::invalid("planner delta_max must be >= 0"));
        }
        if self.n_accel == 0 || self.n_steer == 0 {
            return Err(Error::invalid("planner sample counts must be >= 1"));
        }
        if self.beta_goal < 0.0 || self.beta_speed < 0.0 || self.beta_risk < 0.0 {
            return Err(Error::invalid("planner cost weights must be >= 0"));
        }
        Ok(())
    }

    /// Number of waypoints per rollout, `round(T / dt)`.
    pub fn steps(&self) -> usize {
        ((self.horizon_t / self.dt).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlSample {
    /// Longitudinal acceleration, m/s².
    pub a: f64,
    /// Steering rate, rad/s.
    pub ddelta: f64,
}

/// One explicit-Euler step of the bicycle model.
///
/// This is the only state update in the crate: rollouts and the simulator
/// both call it.
#[inline]
pub fn step(
    state: &MotorcycleState,
    control: &ControlSample,
    dt: f64,
    params: &PlannerParams,
) -> MotorcycleState {
    let (sin, cos) = state.theta.sin_cos();
    MotorcycleState {
        x: state.x + state.v * cos * dt,
        y: state.y + state.v * sin * dt,
        theta: normalize_angle(state.theta + state.v / params.wheelbase * state.delta.tan() * dt),
        v: (state.v + control.a * dt).max(0.0),
        delta: (state.delta + control.ddelta * dt).clamp(-params.delta_max, params.delta_max),
        phi: state.phi,
    }
}

/// States at `dt, 2dt, …, T` under a constant control.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<MotorcycleState>,
    pub control: ControlSample,
}

impl Trajectory {
    pub fn last(&self) -> &MotorcycleState {
        self.states.last().expect("trajectories are nonempty")
    }
}

pub fn rollout(x0: &MotorcycleState, control: ControlSample, params: &PlannerParams) -> Trajectory {
    let n = params.steps();
    let mut states = Vec::with_capacity(n);
    let mut s = *x0;
    for _ in 0..n {
        s = step(&s, &control, params.dt, params);
        states.push(s);
    }
    Trajectory { states, control }
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..count)
            .map(|i| {
                if i == count - 1 {
                    hi
                } else {
                    lo + (hi - lo) * (i as f64 / (count - 1) as f64)
                }
            })
            .collect(),
    }
}

/// Cartesian grid over acceleration (outer) and steering rate (inner).
pub fn sample_controls(params: &PlannerParams) -> Vec<ControlSample> {
    let accels = linspace(params.a_min, params.a_max, params.n_accel);
    let rates = linspace(params.ddelta_min, params.ddelta_max, params.n_steer);
    accels
        .iter()
        .flat_map(|&a| rates.iter().map(move |&ddelta| ControlSample { a, ddelta }))
        .collect()
}

/// Distance from the final waypoint to the goal.
pub fn psi_goal(traj: &Trajectory, goal: Vec2) -> f64 {
    traj.last().position().dist(goal)
}

/// Terminal speed shortfall, floored at zero.
pub fn psi_speed(traj: &Trajectory, v_max: f64) -> f64 {
    (v_max - traj.last().v).max(0.0)
}

/// Mean risk sampled at the projected waypoints.
pub fn psi_risk(
    traj: &Trajectory,
    risk: &RiskMap,
    camera: &CameraModel,
    params: &PlannerParams,
) -> f64 {
    let samples = project_trajectory(&traj.states, camera, params.ground_offset);
    let mut sum = 0.0;
    let mut count = 0usize;
    for s in &samples {
        match s.index() {
            Some((m, n)) => {
                sum += risk.get(m, n);
                count += 1;
            }
            None if params.offimage == OffImage::Zero => count += 1,
            None => {}
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryScore {
    pub psi_goal: f64,
    pub psi_speed: f64,
    pub psi_risk: f64,
    pub j: f64,
}

impl TrajectoryScore {
    pub fn new(psi_goal: f64, psi_speed: f64, psi_risk: f64, params: &PlannerParams) -> Self {
        TrajectoryScore {
            psi_goal,
            psi_speed,
            psi_risk,
            j: params.beta_goal * psi_goal
                + params.beta_speed * psi_speed
                + params.beta_risk * psi_risk,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub control: ControlSample,
    pub score: TrajectoryScore,
}

/// Preference order: lower J, then lower |δ̇|, then lower |a|. Remaining
/// ties keep the earlier index.
fn prefer(a: &Candidate, b: &Candidate) -> Ordering {
    a.score
        .j
        .total_cmp(&b.score.j)
        .then(a.control.ddelta.abs().total_cmp(&b.control.ddelta.abs()))
        .then(a.control.a.abs().total_cmp(&b.control.a.abs()))
}

/// Index of the preferred candidate. Independent of evaluation order.
pub fn select_best(candidates: &[Candidate]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, c) in candidates.iter().enumerate() {
        match best {
            Some(b) if prefer(c, &candidates[b]) != Ordering::Less => {}
            _ => best = Some(i),
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutcome {
    pub best: ControlSample,
    pub best_trajectory: Trajectory,
    /// Every candidate in sampling order.
    pub candidates: Vec<Candidate>,
}

pub fn plan(
    x0: &MotorcycleState,
    risk: &RiskMap,
    camera: &CameraModel,
    goal: Vec2,
    params: &PlannerParams,
) -> Result<PlanOutcome> {
    if (risk.width(), risk.height()) != (camera.width(), camera.height()) {
        return Err(Error::DimensionMismatch(format!(
            "risk map is {}x{}, camera is {}x{}",
            risk.width(),
            risk.height(),
            camera.width(),
            camera.height()
        )));
    }
    let controls = sample_controls(params);
    if controls.is_empty() {
        return Err(Error::EmptyControlSet);
    }
    let mut trajectories = Vec::with_capacity(controls.len());
    let mut candidates = Vec::with_capacity(controls.len());
    for control in controls {
        let traj = rollout(x0, control, params);
        let score = TrajectoryScore::new(
            psi_goal(&traj, goal),
            psi_speed(&traj, params.v_max),
            psi_risk(&traj, risk, camera, params),
            params,
        );
        candidates.push(Candidate { control, score });
        trajectories.push(traj);
    }
    let best = select_best(&candidates).expect("nonempty candidate set");
    Ok(PlanOutcome {
        best: candidates[best].control,
        best_trajectory: trajectories.swap_remove(best),
        candidates,
    })
}

/// Per-candidate diagnostic CSV: `a,ddelta,psi_goal,psi_speed,psi_risk,J`.
pub fn write_candidates_csv<W: Write>(out: W, candidates: &[Candidate]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["a", "ddelta", "psi_goal", "psi_speed", "psi_risk", "J"])?;
    for c in candidates {
        w.write_record([
            c.control.a.to_string(),
            c.control.ddelta.to_string(),
            c.score.psi_goal.to_string(),
            c.score.psi_speed.to_string(),
            c.score.psi_risk.to_string(),
            c.score.j.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
