mod common;

use riskfield::geometry::Vec2;
use riskfield::perception::OracleProvider;
use riskfield::planner::step;
use riskfield::scene::{load_scenario, MotorcycleState};
use riskfield::simulator::{
    footprint_intersects, hazard_exposure, run_batch, run_episode, run_episode_with, trial_seed,
    BodyDims, Mode, Termination,
};

fn state_at(x: f64, y: f64) -> MotorcycleState {
    MotorcycleState {
        x,
        y,
        theta: 0.0,
        v: 0.0,
        delta: 0.0,
        phi: 0.0,
    }
}

#[test]
fn hazard_free_scenario_reaches_the_goal_in_every_mode() {
    let s = common::scenario("[]");
    for mode in Mode::ALL {
        let r = run_episode(&s, mode, 3).unwrap();
        assert!(r.reached_goal, "{mode}: {:?}", r.termination);
        assert!(r.success);
        assert_eq!(r.termination, Termination::Goal);
        assert_eq!(r.hazard_exposure_distance, None);
    }
}

#[test]
fn same_seed_gives_identical_episodes() {
    let s = load_scenario(common::bundled(3)).unwrap();
    let a = run_episode(&s, Mode::Ours, 11).unwrap();
    let b = run_episode(&s, Mode::Ours, 11).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn executed_step_matches_the_planned_first_waypoint() {
    let h = common::square("p", "pothole", 14.0, -1.75, 0.6, 0.9, 0.1);
    let s = common::scenario(&format!("[{h}]"));
    let mut planned = Vec::new();
    let mut provider = OracleProvider;
    let r = run_episode_with(&s, Mode::Ours, 0, &mut provider, |f| {
        planned.push(f.plan.best_trajectory.states[0]);
        assert_eq!(
            f.plan.best_trajectory.states[0],
            step(
                f.state,
                &f.plan.best,
                s.planner_params.dt,
                &s.planner_params
            )
        );
    })
    .unwrap();
    assert_eq!(planned.len(), r.steps);
    assert_eq!(&r.trajectory[1..], &planned[..]);
}

#[test]
fn exposure_examples() {
    let sq = common::square("h", "pothole", 0.0, 0.0, 1.0, 0.5, 0.0);
    let s = common::scenario(&format!(
        "[{}]",
        common::square("far", "pothole", 30.0, -1.75, 0.5, 0.5, 0.0)
    ));
    let mut hazards = s.hazards.clone();
    let near: riskfield::scene::Hazard = serde_json::from_str(&sq).unwrap();
    assert_eq!(
        hazard_exposure(&[state_at(3.0, 4.0)], std::slice::from_ref(&near)),
        Some(5.0)
    );
    assert_eq!(
        hazard_exposure(&[state_at(0.0, 0.0)], std::slice::from_ref(&near)),
        Some(0.0)
    );
    hazards.push(near.clone());
    let one = hazard_exposure(&[state_at(3.0, 4.0)], std::slice::from_ref(&near)).unwrap();
    let both = hazard_exposure(&[state_at(3.0, 4.0)], &hazards).unwrap();
    assert!(both <= one);
    assert_eq!(hazard_exposure(&[state_at(3.0, 4.0)], &[]), None);
}

#[test]
fn body_footprint_contact() {
    let h: riskfield::scene::Hazard =
        serde_json::from_str(&common::square("h", "pothole", 5.0, 0.0, 0.5, 0.5, 0.0)).unwrap();
    let body = BodyDims {
        length: 2.0,
        width: 0.8,
    };
    assert!(footprint_intersects(&state_at(3.6, 0.0), &h, body));
    assert!(!footprint_intersects(&state_at(3.4, 0.0), &h, body));
    assert!(footprint_intersects(&state_at(5.0, 0.85), &h, body));
    assert!(!footprint_intersects(&state_at(5.0, 0.95), &h, body));
    assert!(h.contains(Vec2::new(5.5, 0.5)));
}

#[test]
fn baseline_drives_over_the_road_center_pothole() {
    let s = load_scenario(common::bundled(2)).unwrap();
    let m = run_batch(&s, Mode::Baseline, 6, 0).unwrap();
    assert!(m.success_rate < 50.0, "baseline success {}", m.success_rate);
    for r in &m.results {
        assert!(!r.success);
        assert_eq!(r.contacts, ["pothole_1"]);
    }
}

#[test]
fn batch_metrics_aggregate_trials() {
    let s = common::scenario("[]");
    let m = run_batch(&s, Mode::Ours, 1, 5).unwrap();
    assert!(m.success_rate == 0.0 || m.success_rate == 100.0);
    assert_eq!(m.trials[0].seed, trial_seed(5, 0));

    let h = common::square("p", "pothole", 14.0, -1.75, 0.6, 0.9, 0.1);
    let s = common::scenario(&format!("[{h}]"));
    let m = run_batch(&s, Mode::NoVlm, 4, 9).unwrap();
    let successes = m.results.iter().filter(|r| r.success).count();
    assert_eq!(m.success_rate, 100.0 * successes as f64 / 4.0);
    let mean = m
        .results
        .iter()
        .map(|r| r.hazard_exposure_distance.unwrap())
        .sum::<f64>()
        / 4.0;
    assert!((m.mean_hazard_exposure_distance.unwrap() - mean).abs() < 1e-12);
    // No randomization: every trial repeats the first.
    assert!(m.results.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn trial_seeds_are_consecutive() {
    assert_eq!(trial_seed(100, 0), 100);
    assert_eq!(trial_seed(100, 7), 107);
}
