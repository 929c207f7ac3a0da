use proptest::prelude::*;
use riskfield::grid::{Grid, Mask};
use riskfield::perception::HazardDetection;
use riskfield::riskmap::{
    build_risk_map, fuse, hazard_cost_map, obstacle_risk_map, HazardScores, RiskParams,
};

const W: usize = 12;
const H: usize = 9;

fn mask_strategy() -> impl Strategy<Value = Mask> {
    prop::collection::vec(any::<bool>(), W * H).prop_map(|bits| Mask::from_vec(W, H, bits).unwrap())
}

fn detection_strategy() -> impl Strategy<Value = HazardDetection> {
    (mask_strategy(), 0.0..=1.0f64, 0.0..=1.0f64, 0.0..0.5f64).prop_map(
        |(mask, c_vlm, confidence, depth_m)| HazardDetection {
            hazard_id: "h".into(),
            label: "pothole".into(),
            c_vlm,
            confidence,
            mask,
            depth_m,
        },
    )
}

fn grid_strategy() -> impl Strategy<Value = Grid> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0..=1.0f64], W * H)
        .prop_map(|v| Grid::from_vec(W, H, v).unwrap())
}

fn cost(d: &HazardDetection, p: &RiskParams) -> f64 {
    HazardScores::compute(d, p).unwrap().cost(p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fused_values_stay_in_range(dets in prop::collection::vec(detection_strategy(), 0..5)) {
        let dets: Vec<_> = dets.into_iter().enumerate().map(|(i, mut d)| { d.hazard_id = format!("h{i}"); d }).collect();
        let p = RiskParams::default();
        let map = build_risk_map(&dets, &p, W, H).unwrap();
        prop_assert!(map.grid().values().iter().all(|&v| (0.0..=p.c_max).contains(&v)));
    }

    #[test]
    fn cost_is_monotone_in_each_factor(
        d in detection_strategy(),
        bump in 0.0..1.0f64,
        m in 0..W,
        n in 0..H,
    ) {
        let p = RiskParams::default();
        let base = cost(&d, &p);

        let mut up = d.clone();
        up.c_vlm = (d.c_vlm + bump).min(1.0);
        prop_assert!(cost(&up, &p) >= base);

        let mut up = d.clone();
        up.confidence = (d.confidence + bump).min(1.0);
        prop_assert!(cost(&up, &p) >= base);

        let mut up = d.clone();
        up.depth_m = d.depth_m + bump;
        prop_assert!(cost(&up, &p) >= base);

        let mut up = d.clone();
        up.mask.set(m, n, true);
        prop_assert!(cost(&up, &p) >= base);
    }

    #[test]
    fn cost_map_is_constant_on_the_mask(d in detection_strategy()) {
        let p = RiskParams::default();
        let g = hazard_cost_map(&d, &p).unwrap();
        let c = cost(&d, &p);
        for n in 0..H {
            for m in 0..W {
                prop_assert_eq!(g.get(m, n), if d.mask.get(m, n) { c } else { 0.0 });
            }
        }
    }

    #[test]
    fn fusion_is_commutative_and_associative(a in grid_strategy(), b in grid_strategy(), c in grid_strategy()) {
        let f = |gs: &[Grid]| fuse(gs, W, H, 1.0).unwrap().grid().clone();
        let ab = f(&[a.clone(), b.clone()]);
        prop_assert_eq!(&ab, &f(&[b.clone(), a.clone()]));
        let ab_c = f(&[ab.clone(), c.clone()]);
        let bc = f(&[b.clone(), c.clone()]);
        prop_assert_eq!(&ab_c, &f(&[a.clone(), bc]));
        prop_assert_eq!(&f(&[a.clone(), a.clone()]), &a);
        prop_assert_eq!(&f(&[a.clone(), Grid::zeros(W, H)]), &a);
    }

    #[test]
    fn context_ablation_keeps_weight_sum(
        a in 0.0..2.0f64, b in 0.0..2.0f64, c in 0.0..2.0f64, d in 0.01..2.0f64,
    ) {
        let p = RiskParams { alpha_vlm: a, alpha_area: b, alpha_conf: c, alpha_depth: d, ..RiskParams::default() };
        let q = p.without_context();
        prop_assert_eq!(q.alpha_vlm, 0.0);
        prop_assert!((q.weight_sum() - p.weight_sum()).abs() < 1e-12);
        prop_assert!((q.alpha_area * d - q.alpha_depth * b).abs() < 1e-12);
    }
}

#[test]
fn no_detections_give_a_zero_map() {
    let map = build_risk_map(&[], &RiskParams::default(), W, H).unwrap();
    assert!(map.grid().values().iter().all(|&v| v == 0.0));
    assert!(map.to_ppm().ends_with(&[0u8; W * H * 3]));
}

#[test]
fn ablated_weights_match_defaults() {
    let q = RiskParams::default().without_context();
    assert_eq!(q.alpha_vlm, 0.0);
    assert!((q.alpha_area - 0.4).abs() < 1e-15);
    assert!((q.alpha_conf - 0.2).abs() < 1e-15);
    assert!((q.alpha_depth - 0.4).abs() < 1e-15);
}

#[test]
fn obstacle_map_uses_only_obstacle_labels() {
    let full = Mask::from_fn(W, H, |_, _| true);
    let mk = |id: &str, label: &str, mask: Mask| HazardDetection {
        hazard_id: id.into(),
        label: label.into(),
        c_vlm: 0.9,
        confidence: 1.0,
        mask,
        depth_m: 0.1,
    };
    let cone_mask = Mask::from_fn(W, H, |m, _| m < 3);
    let dets = vec![mk("p", "pothole", full), mk("c", "cone", cone_mask.clone())];
    let map = obstacle_risk_map(&dets, &["cone".to_string()], 1.0, W, H).unwrap();
    for n in 0..H {
        for m in 0..W {
            assert_eq!(map.get(m, n), if cone_mask.get(m, n) { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn mismatched_grid_sizes_are_rejected() {
    let err = fuse(&[Grid::zeros(W, H), Grid::zeros(W + 1, H)], W, H, 1.0).unwrap_err();
    assert!(matches!(err, riskfield::Error::DimensionMismatch(_)));
}
