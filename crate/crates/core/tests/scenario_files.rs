mod common;

use riskfield::scene::{load_scenario, parse_scenario};
use riskfield::Error;

#[test]
fn bundled_scenarios_load() {
    let s1 = load_scenario(common::bundled(1)).unwrap();
    assert_eq!(s1.hazards.len(), 1);
    assert_eq!(s1.hazards[0].label, "pothole");

    let s2 = load_scenario(common::bundled(2)).unwrap();
    assert_eq!(s2.hazards.len(), 1);
    assert_eq!(s2.hazards[0].label, "pothole");

    let s3 = load_scenario(common::bundled(3)).unwrap();
    let mut labels: Vec<_> = s3.hazards.iter().map(|h| h.label.as_str()).collect();
    labels.sort();
    assert_eq!(labels, ["cone", "pothole"]);
}

#[test]
fn bundled_large_potholes_are_larger() {
    let area = |n| {
        let s = load_scenario(common::bundled(n)).unwrap();
        let h = s
            .hazards
            .iter()
            .find(|h| h.label == "pothole")
            .unwrap()
            .clone();
        riskfield::geometry::signed_area(&h.footprint).abs()
    };
    assert!(area(2) > area(1));
    assert!(area(3) > area(1));
}

#[test]
fn empty_hazard_list_is_valid() {
    let s = common::scenario("[]");
    assert!(s.hazards.is_empty());
}

#[test]
fn goal_outside_corridor_is_rejected() {
    let text =
        common::scenario_json("[]", 96, 72).replace("\"goal\": [40, -1.75]", "\"goal\": [40, 9]");
    match parse_scenario(&text) {
        Err(Error::Validation(msg)) => assert!(msg.contains("goal outside corridor"), "{msg}"),
        other => panic!("expected validation error, got {other:?}"),
    }
}

#[test]
fn start_inside_hazard_is_rejected() {
    let h = common::square("h", "pothole", 0.0, -1.75, 0.5, 0.5, 0.0);
    let err = parse_scenario(&common::scenario_json(&format!("[{h}]"), 96, 72)).unwrap_err();
    assert!(err.to_string().contains("start inside hazard"), "{err}");
}

#[test]
fn duplicate_hazard_ids_are_rejected() {
    let a = common::square("h", "pothole", 10.0, -1.75, 0.5, 0.5, 0.0);
    let b = common::square("h", "puddle", 20.0, -1.75, 0.5, 0.5, 0.0);
    let err = parse_scenario(&common::scenario_json(&format!("[{a}, {b}]"), 96, 72)).unwrap_err();
    assert!(matches!(err, Error::Validation(_)), "{err}");
}

#[test]
fn unknown_keys_are_rejected() {
    let text =
        common::scenario_json("[]", 96, 72).replacen("\"name\"", "\"colour\": 1, \"name\"", 1);
    assert!(matches!(parse_scenario(&text), Err(Error::Parse { .. })));
}

#[test]
fn bad_ranges_are_rejected() {
    let bad_ctx = common::square("h", "pothole", 10.0, -1.75, 0.5, 1.5, 0.0);
    assert!(parse_scenario(&common::scenario_json(&format!("[{bad_ctx}]"), 96, 72)).is_err());
    let bad_depth = common::square("h", "pothole", 10.0, -1.75, 0.5, 0.5, -0.1);
    assert!(parse_scenario(&common::scenario_json(&format!("[{bad_depth}]"), 96, 72)).is_err());
    let text = common::scenario_json("[]", 96, 72).replace("\"width\": 96", "\"width\": 0");
    assert!(parse_scenario(&text).is_err());
}

#[test]
fn scenario_roundtrips_through_json() {
    let s = load_scenario(common::bundled(3)).unwrap();
    let text = serde_json::to_string(&s).unwrap();
    assert_eq!(parse_scenario(&text).unwrap(), s);
}
