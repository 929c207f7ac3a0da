#![allow(dead_code)]

use std::path::PathBuf;

use riskfield::scene::{parse_scenario, Scenario};

pub fn bundled(n: usize) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("scenario{n}.json"))
}

/// Straight two-lane road with a forward camera and the given hazards.
pub fn scenario_json(hazards: &str, width: usize, height: usize) -> String {
    let f = width as f64 * 0.75;
    format!(
        r#"{{
  "name": "test",
  "road": {{ "centerline": [[-10, 0], [80, 0]], "width": 7 }},
  "hazards": {hazards},
  "start": {{ "x": 0, "y": -1.75, "theta": 0, "v": 6 }},
  "goal": [40, -1.75],
  "camera": {{
    "intrinsics": {{ "fx": {f}, "fy": {f}, "cx": {cx}, "cy": {cy} }},
    "width": {width}, "height": {height},
    "mount": {{ "translation": [0.2, 0, 1.3], "roll": 0, "pitch": 0.15, "yaw": 0 }}
  }},
  "trials": {{ "lateral_offset": 0.0 }},
  "sim": {{ "max_steps": 200 }}
}}"#,
        cx = width as f64 / 2.0,
        cy = height as f64 / 2.0,
    )
}

pub fn scenario(hazards: &str) -> Scenario {
    parse_scenario(&scenario_json(hazards, 96, 72)).expect("test scenario is valid")
}

pub fn square(id: &str, label: &str, x: f64, y: f64, half: f64, ctx: f64, depth: f64) -> String {
    format!(
        r#"{{"id": "{id}", "label": "{label}", "footprint": [[{x0}, {y0}], [{x1}, {y0}], [{x1}, {y1}], [{x0}, {y1}]], "depth_m": {depth}, "base_context_score": {ctx}}}"#,
        x0 = x - half,
        x1 = x + half,
        y0 = y - half,
        y1 = y + half,
    )
}

/// Winding number of `poly` around `p`; nonzero means inside.
pub fn winding(poly: &[riskfield::geometry::Vec2], p: riskfield::geometry::Vec2) -> i32 {
    let mut wn = 0;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let cross = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
        if a.y <= p.y {
            if b.y > p.y && cross > 0.0 {
                wn += 1;
            }
        } else if b.y <= p.y && cross < 0.0 {
            wn -= 1;
        }
    }
    wn
}

/// Every pixel ray intersected with z = 0 using the inverted 4x4 pose.
pub fn brute_force_mask(
    hazard: &riskfield::scene::Hazard,
    camera: &riskfield::scene::CameraModel,
) -> riskfield::grid::Mask {
    use nalgebra::Vector4;
    let k = camera.intrinsics;
    let t_wc = camera
        .t_cw
        .to_matrix()
        .try_inverse()
        .expect("rigid pose inverts");
    let origin = t_wc * Vector4::new(0.0, 0.0, 0.0, 1.0);
    riskfield::grid::Mask::from_fn(k.width, k.height, |m, n| {
        let ray_c = Vector4::new((m as f64 - k.cx) / k.fx, (n as f64 - k.cy) / k.fy, 1.0, 0.0);
        let ray_w = t_wc * ray_c;
        if ray_w.z >= 0.0 {
            return false;
        }
        let s = -origin.z / ray_w.z;
        let hit = riskfield::geometry::Vec2::new(origin.x + s * ray_w.x, origin.y + s * ray_w.y);
        winding(&hazard.footprint, hit) != 0
    })
}
