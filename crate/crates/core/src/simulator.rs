//! Closed-loop episodes (perceive → risk map → plan → step) and batch
//! metrics over seeded trials.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{polygons_intersect, OrientedRect};
use crate::perception::{HazardDetection, NoisyProvider, PerceptionProvider};
use crate::planner::{plan, PlanOutcome};
use crate::riskmap::{build_risk_map, obstacle_risk_map, RiskMap};
use crate::scene::{camera_pose_at, CameraModel, Hazard, MotorcycleState, Scenario};

pub use crate::planner::step;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Full multi-factor risk map.
    Ours,
    /// Contextual term removed, remaining weights rescaled to the same total.
    NoVlm,
    /// Only solid obstacles, at `c_max`; surface hazards are ignored.
    Baseline,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Ours, Mode::NoVlm, Mode::Baseline];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Ours => "ours",
            Mode::NoVlm => "no_vlm",
            Mode::Baseline => "baseline",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ours" => Ok(Mode::Ours),
            "no_vlm" => Ok(Mode::NoVlm),
            "baseline" => Ok(Mode::Baseline),
            other => Err(Error::InvalidMode(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimParams {
    pub goal_radius: f64,
    pub max_steps: usize,
    pub body_length: f64,
    pub body_width: f64,
    /// Labels treated as solid obstacles by the baseline.
    pub obstacle_labels: Vec<String>,
    /// End the episode at the first hazard contact instead of driving on.
    pub stop_on_contact: bool,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            goal_radius: 1.0,
            max_steps: 1200,
            body_length: 2.0,
            body_width: 0.8,
            obstacle_labels: vec!["cone".to_string()],
            stop_on_contact: false,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.goal_radius > 0.0) {
            return Err(Error::invalid("sim goal_radius must be > 0"));
        }
        if !(self.body_length > 0.0 && self.body_width > 0.0) {
            return Err(Error::invalid("sim body dimensions must be > 0"));
        }
        Ok(())
    }

    pub fn body(&self) -> BodyDims {
        BodyDims {
            length: self.body_length,
            width: self.body_width,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyDims {
    pub length: f64,
    pub width: f64,
}

impl Default for BodyDims {
    fn default() -> Self {
        BodyDims {
            length: 2.0,
            width: 0.8,
        }
    }
}

/// Closed-set test of the oriented body rectangle against a hazard footprint.
pub fn footprint_intersects(state: &MotorcycleState, hazard: &Hazard, body: BodyDims) -> bool {
    let rect = OrientedRect {
        center: state.position(),
        heading: state.theta,
        length: body.length,
        width: body.width,
    };
    polygons_intersect(&rect.corners(), &hazard.footprint)
}

/// Minimum distance from any visited position to any hazard centroid.
/// `None` when there are no hazards or no states.
pub fn hazard_exposure(trajectory: &[MotorcycleState], hazards: &[Hazard]) -> Option<f64> {
    let centroids: Vec<_> = hazards.iter().map(Hazard::centroid).collect();
    trajectory
        .iter()
        .flat_map(|s| centroids.iter().map(move |c| s.position().dist(*c)))
        .reduce(f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Goal,
    HazardContact,
    Timeout,
    OffRoad,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Goal => "goal",
            Termination::HazardContact => "hazard_contact",
            Termination::Timeout => "timeout",
            Termination::OffRoad => "off_road",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    /// No body/hazard intersection at any visited state.
    pub success: bool,
    pub reached_goal: bool,
    pub hazard_exposure_distance: Option<f64>,
    pub trajectory: Vec<MotorcycleState>,
    pub steps: usize,
    pub termination: Termination,
    /// Ids of hazards touched at least once, sorted.
    pub contacts: Vec<String>,
}

/// Start state for a trial: the scenario start shifted sideways by a seeded
/// uniform offset.
pub fn trial_start(scenario: &Scenario, seed: u64) -> MotorcycleState {
    let r = scenario.trials.lateral_offset;
    let mut start = scenario.start;
    if r > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::MAX);
        let offset: f64 = rng.random_range(-r..=r);
        let (sin, cos) = start.theta.sin_cos();
        start.x -= offset * sin;
        start.y += offset * cos;
    }
    start
}

/// Holds the first-seen semantics of each hazard for the rest of an episode.
#[derive(Debug, Default)]
struct SemanticMemory {
    seen: HashMap<String, (String, f64, f64, f64)>,
}

impl SemanticMemory {
    fn apply(&mut self, detections: &mut [HazardDetection]) {
        for d in detections {
            let entry = self
                .seen
                .entry(d.hazard_id.clone())
                .or_insert_with(|| (d.label.clone(), d.c_vlm, d.confidence, d.depth_m));
            d.label.clone_from(&entry.0);
            d.c_vlm = entry.1;
            d.confidence = entry.2;
            d.depth_m = entry.3;
        }
    }
}

pub fn risk_map_for_mode(
    scenario: &Scenario,
    mode: Mode,
    detections: &[HazardDetection],
    camera: &CameraModel,
) -> Result<RiskMap> {
    let (w, h) = (camera.width(), camera.height());
    let params = &scenario.risk_params;
    match mode {
        Mode::Ours => build_risk_map(detections, params, w, h),
        Mode::NoVlm => build_risk_map(detections, &params.without_context(), w, h),
        Mode::Baseline => obstacle_risk_map(
            detections,
            &scenario.sim.obstacle_labels,
            params.c_max,
            w,
            h,
        ),
    }
}

/// Everything computed for one control cycle.
#[derive(Debug)]
pub struct Frame<'a> {
    pub step: usize,
    pub state: &'a MotorcycleState,
    pub camera: &'a CameraModel,
    pub detections: &'a [HazardDetection],
    pub risk: &'a RiskMap,
    pub plan: &'a PlanOutcome,
}

/// Runs one episode with the scenario's default provider (seeded noise;
/// exact oracle when the scenario's noise is zero).
pub fn run_episode(scenario: &Scenario, mode: Mode, seed: u64) -> Result<EpisodeResult> {
    let mut provider = NoisyProvider {
        noise: scenario.trials.noise,
        seed,
    };
    run_episode_with(scenario, mode, seed, &mut provider, |_| {})
}

pub fn run_episode_with<P, F>(
    scenario: &Scenario,
    mode: Mode,
    seed: u64,
    provider: &mut P,
    mut observe: F,
) -> Result<EpisodeResult>
where
    P: PerceptionProvider + ?Sized,
    F: FnMut(&Frame<'_>),
{
    let params = &scenario.planner_params;
    let sim = &scenario.sim;
    let body = sim.body();
    let rig = scenario.rig();
    let mut memory = SemanticMemory::default();

    let mut state = trial_start(scenario, seed);
    let mut trajectory = vec![state];
    let mut contacts = BTreeSet::new();
    let touch = |s: &MotorcycleState, contacts: &mut BTreeSet<String>| {
        for h in &scenario.hazards {
            if footprint_intersects(s, h, body) {
                contacts.insert(h.id.clone());
            }
        }
    };
    touch(&state, &mut contacts);

    let mut steps = 0usize;
    let termination = loop {
        if state.position().dist(scenario.goal) <= sim.goal_radius {
            break Termination::Goal;
        }
        if !scenario.road.contains(state.position()) {
            break Termination::OffRoad;
        }
        if sim.stop_on_contact && !contacts.is_empty() {
            break Termination::HazardContact;
        }
        if steps >= sim.max_steps {
            break Termination::Timeout;
        }
        let camera = camera_pose_at(&state, &rig);
        let mut detections = provider.perceive(scenario, &camera, &state)?;
        memory.apply(&mut detections);
        let risk = risk_map_for_mode(scenario, mode, &detections, &camera)?;
        let outcome = plan(&state, &risk, &camera, scenario.goal, params)?;
        observe(&Frame {
            step: steps,
            state: &state,
            camera: &camera,
            detections: &detections,
            risk: &risk,
            plan: &outcome,
        });
        state = step(&state, &outcome.best, params.dt, params);
        steps += 1;
        trajectory.push(state);
        touch(&state, &mut contacts);
    };

    Ok(EpisodeResult {
        success: contacts.is_empty(),
        reached_goal: termination == Termination::Goal,
        hazard_exposure_distance: hazard_exposure(&trajectory, &scenario.hazards),
        trajectory,
        steps,
        termination,
        contacts: contacts.into_iter().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    pub reached_goal: bool,
    pub exposure_distance: Option<f64>,
    pub steps: usize,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchMetrics {
    pub scenario: String,
    pub mode: Mode,
    pub n_trials: usize,
    /// Percentage of trials without hazard contact.
    pub success_rate: f64,
    /// Mean over trials that have an exposure value.
    pub mean_hazard_exposure_distance: Option<f64>,
    pub trials: Vec<TrialSummary>,
    #[serde(skip)]
    pub results: Vec<EpisodeResult>,
}

impl BatchMetrics {
    pub fn from_results(
        scenario: &str,
        mode: Mode,
        seeds: &[u64],
        results: Vec<EpisodeResult>,
    ) -> Self {
        let n = results.len();
        let successes = results.iter().filter(|r| r.success).count();
        let exposures: Vec<f64> = results
            .iter()
            .filter_map(|r| r.hazard_exposure_distance)
            .collect();
        let mean =
            (!exposures.is_empty()).then(|| exposures.iter().sum::<f64>() / exposures.len() as f64);
        let trials = results
            .iter()
            .zip(seeds)
            .enumerate()
            .map(|(i, (r, &seed))| TrialSummary {
                trial: i,
                seed,
                success: r.success,
                reached_goal: r.reached_goal,
                exposure_distance: r.hazard_exposure_distance,
                steps: r.steps,
                termination: r.termination,
            })
            .collect();
        BatchMetrics {
            scenario: scenario.to_string(),
            mode,
            n_trials: n,
            success_rate: if n == 0 {
                0.0
            } else {
                100.0 * successes as f64 / n as f64
            },
            mean_hazard_exposure_distance: mean,
            trials,
            results,
        }
    }
}

pub fn trial_seed(base_seed: u64, trial: usize) -> u64 {
    base_seed.wrapping_add(trial as u64)
}

/// `n_trials` episodes with seeds `base_seed, base_seed + 1, …`, run in
/// parallel on the current rayon pool. Results are ordered by trial index.
pub fn run_batch(
    scenario: &Scenario,
    mode: Mode,
    n_trials: usize,
    base_seed: u64,
) -> Result<BatchMetrics> {
    run_batch_with(scenario, mode, n_trials, base_seed, |_, seed| {
        NoisyProvider {
            noise: scenario.trials.noise,
            seed,
        }
    })
}

pub fn run_batch_with<P, F>(
    scenario: &Scenario,
    mode: Mode,
    n_trials: usize,
    base_seed: u64,
    make_provider: F,
) -> Result<BatchMetrics>
where
    P: PerceptionProvider,
    F: Fn(usize, u64) -> P + Sync,
{
    if n_trials == 0 {
        return Err(Error::invalid("n_trials must be >= 1"));
    }
    let seeds: Vec<u64> = (0..n_trials).map(|i| trial_seed(base_seed, i)).collect();
    let results = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &seed)| {
            let mut provider = make_provider(i, seed);
            run_episode_with(scenario, mode, seed, &mut provider, |_| {})
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BatchMetrics::from_results(
        &scenario.name,
        mode,
        &seeds,
        results,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;

    fn square(cx: f64, cy: f64, half: f64) -> Hazard {
        Hazard {
            id: "h".into(),
            label: "pothole".into(),
            footprint: vec![
                Vec2::new(cx - half, cy - half),
                Vec2::new(cx + half, cy - half),
                Vec2::new(cx + half, cy + half),
                Vec2::new(cx - half, cy + half),
            ],
            depth_m: 0.1,
            base_context_score: 0.5,
        }
    }

    fn at(x: f64, y: f64, theta: f64) -> MotorcycleState {
        MotorcycleState {
            x,
            y,
            theta,
            ..MotorcycleState::default()
        }
    }

    #[test]
    fn body_inside_large_hazard() {
        assert!(footprint_intersects(
            &at(0.0, 0.0, 0.3),
            &square(0.0, 0.0, 5.0),
            BodyDims::default()
        ));
    }

    #[test]
    fn distant_hazard_does_not_touch() {
        assert!(!footprint_intersects(
            &at(0.0, 0.0, 0.0),
            &square(100.0, 0.0, 1.0),
            BodyDims::default()
        ));
    }

    #[test]
    fn corner_on_edge_counts() {
        // body spans x ∈ [-1, 1], y ∈ [-0.4, 0.4]; hazard's left edge at x = 1
        let h = Hazard {
            footprint: vec![
                Vec2::new(1.0, 0.4),
                Vec2::new(3.0, 0.4),
                Vec2::new(3.0, 2.0),
                Vec2::new(1.0, 2.0),
            ],
            ..square(0.0, 0.0, 1.0)
        };
        assert!(footprint_intersects(
            &at(0.0, 0.0, 0.0),
            &h,
            BodyDims::default()
        ));
        let shifted = Hazard {
            footprint: h
                .footprint
                .iter()
                .map(|p| Vec2::new(p.x + 0.001, p.y))
                .collect(),
            ..h
        };
        assert!(!footprint_intersects(
            &at(0.0, 0.0, 0.0),
            &shifted,
            BodyDims::default()
        ));
    }

    #[test]
    fn heading_matters_for_contact() {
        let h = square(0.0, 0.9, 0.2);
        assert!(!footprint_intersects(
            &at(0.0, 0.0, 0.0),
            &h,
            BodyDims::default()
        ));
        assert!(footprint_intersects(
            &at(0.0, 0.0, std::f64::consts::FRAC_PI_2),
            &h,
            BodyDims::default()
        ));
    }

    #[test]
    fn exposure_cases() {
        let h = square(0.0, 0.0, 0.5);
        assert_eq!(
            hazard_exposure(&[at(0.0, 0.0, 0.0)], std::slice::from_ref(&h)),
            Some(0.0)
        );
        assert_eq!(
            hazard_exposure(&[at(3.0, 4.0, 0.0)], std::slice::from_ref(&h)),
            Some(5.0)
        );
        let far = Hazard {
            id: "far".into(),
            ..square(50.0, 0.0, 0.5)
        };
        assert_eq!(hazard_exposure(&[at(3.0, 4.0, 0.0)], &[h, far]), Some(5.0));
        assert_eq!(hazard_exposure(&[at(3.0, 4.0, 0.0)], &[]), None);
    }

    #[test]
    fn zero_control_at_rest_is_a_fixed_point() {
        let p = crate::planner::PlannerParams::default();
        let s = at(1.0, 2.0, 0.5);
        let c = crate::planner::ControlSample {
            a: 0.0,
            ddelta: 0.0,
        };
        assert_eq!(step(&s, &c, p.dt, &p), s);
    }

    #[test]
    fn mode_parsing() {
        for m in Mode::ALL {
            assert_eq!(m.as_str().parse::<Mode>().unwrap(), m);
        }
        assert!(matches!("fast".parse::<Mode>(), Err(Error::InvalidMode(_))));
    }

    #[test]
    fn success_rate_arithmetic() {
        let r = |success| EpisodeResult {
            success,
            reached_goal: true,
            hazard_exposure_distance: Some(1.0),
            trajectory: vec![],
            steps: 1,
            termination: Termination::Goal,
            contacts: vec![],
        };
        let m = BatchMetrics::from_results(
            "s",
            Mode::Ours,
            &[0, 1, 2, 3],
            vec![r(true), r(false), r(true), r(true)],
        );
        assert_eq!(m.success_rate, 75.0);
        assert_eq!(m.mean_hazard_exposure_distance, Some(1.0));
    }
}
