//! Planar geometry on the ground plane: polygons, oriented rectangles and
//! the closed-set intersection tests used for hazard contact.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dist(self, other: Vec2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(v: [f64; 2]) -> Self {
        Vec2::new(v[0], v[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

/// Twice the signed area of triangle (a, b, c); positive when counter-clockwise.
#[inline]
pub fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed segment intersection: touching endpoints and collinear overlap count.
pub fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

fn edges(vertices: &[Vec2]) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
    let n = vertices.len();
    (0..n).map(move |i| (vertices[i], vertices[(i + 1) % n]))
}

/// Even-odd containment. Boundary points may land on either side.
pub fn point_in_polygon(vertices: &[Vec2], p: Vec2) -> bool {
    let mut inside = false;
    for (a, b) in edges(vertices) {
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

/// Containment including the boundary.
pub fn point_in_polygon_closed(vertices: &[Vec2], p: Vec2) -> bool {
    edges(vertices).any(|(a, b)| orient(a, b, p) == 0.0 && on_segment(a, b, p))
        || point_in_polygon(vertices, p)
}

/// Closed-set polygon intersection (shared boundary points count).
pub fn polygons_intersect(a: &[Vec2], b: &[Vec2]) -> bool {
    if edges(a).any(|(p, q)| edges(b).any(|(r, s)| segments_intersect(p, q, r, s))) {
        return true;
    }
    // no edge crossings: either disjoint or one inside the other
    point_in_polygon_closed(b, a[0]) || point_in_polygon_closed(a, b[0])
}

pub fn signed_area(vertices: &[Vec2]) -> f64 {
    0.5 * edges(vertices)
        .map(|(a, b)| a.x * b.y - b.x * a.y)
        .sum::<f64>()
}

/// Area centroid of a simple polygon.
pub fn centroid(vertices: &[Vec2]) -> Vec2 {
    let area = signed_area(vertices);
    let (mut cx, mut cy) = (0.0, 0.0);
    for (a, b) in edges(vertices) {
        let cross = a.x * b.y - b.x * a.y;
        cx += (a.x + b.x) * cross;
        cy += (a.y + b.y) * cross;
    }
    Vec2::new(cx / (6.0 * area), cy / (6.0 * area))
}

/// True when no two non-adjacent edges touch and no vertex repeats.
pub fn is_simple(vertices: &[Vec2]) -> bool {
    let n = vertices.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if vertices[i] == vertices[j] {
                return false;
            }
        }
    }
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let (c, d) = (vertices[j], vertices[(j + 1) % n]);
            if adjacent {
                // adjacent edges may only share their common vertex
                let shared = if j == i + 1 { b } else { a };
                let (far_self, far_other) = if j == i + 1 { (a, d) } else { (b, c) };
                if orient(a, b, far_other) == 0.0
                    && on_segment(a, b, far_other)
                    && far_other != shared
                {
                    return false;
                }
                if orient(c, d, far_self) == 0.0 && on_segment(c, d, far_self) && far_self != shared
                {
                    return false;
                }
            } else if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    signed_area(vertices) != 0.0
}

/// Rectangle centered at `center`, `length` along `heading`, `width` across it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRect {
    pub center: Vec2,
    pub heading: f64,
    pub length: f64,
    pub width: f64,
}

impl OrientedRect {
    /// Corners in counter-clockwise order.
    pub fn corners(&self) -> [Vec2; 4] {
        let (s, c) = self.heading.sin_cos();
        let hl = 0.5 * self.length;
        let hw = 0.5 * self.width;
        let at = |l: f64, w: f64| {
            Vec2::new(self.center.x + c * l - s * w, self.center.y + s * l + c * w)
        };
        [at(hl, hw), at(-hl, hw), at(-hl, -hw), at(hl, -hw)]
    }
}

/// Distance from `p` to segment `ab`.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.dist(Vec2::new(a.x + t * dx, a.y + t * dy))
}
