//! Multi-factor hazard cost and per-pixel max fusion into a dense risk map.
//!
//! Each detection contributes a constant cost over its mask:
//!
//! ```text
//! C_i = min(c_max, α_vlm·c_vlm + α_area·c_area + α_conf·c_conf + α_depth·c_depth)
//! ```
//!
//! with `c_area = σ(κ_a·(|M|/(H·W) − η_a))`, `c_conf = p` and
//! `c_depth = min(1, d / d_ref)`. The risk map is the pixel-wise maximum over
//! all hazards.

use serde::{Deserialize, Serialize};

use crate::colormap::RISK_COLORMAP;
use crate::error::{Error, Result};
use crate::grid::{Grid, Mask};
use crate::perception::HazardDetection;
use crate::pnm;
use crate::projection::PixelSample;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RiskParams {
    pub alpha_vlm: f64,
    pub alpha_area: f64,
    pub alpha_conf: f64,
    pub alpha_depth: f64,
    pub kappa_a: f64,
    pub eta_a: f64,
    pub d_ref: f64,
    pub c_max: f64,
}

impl Default for RiskParams {
    fn default() -> Self {
        RiskParams {
            alpha_vlm: 0.5,
            alpha_area: 0.2,
            alpha_conf: 0.1,
            alpha_depth: 0.2,
            kappa_a: 50.0,
            eta_a: 0.05,
            d_ref: 0.15,
            c_max: 1.0,
        }
    }
}

impl RiskParams {
    pub fn validate(&self) -> Result<()> {
        let weights = [
            self.alpha_vlm,
            self.alpha_area,
            self.alpha_conf,
            self.alpha_depth,
        ];
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::invalid("risk weights must be finite and >= 0"));
        }
        if !(self.d_ref > 0.0) {
            return Err(Error::invalid("risk d_ref must be > 0"));
        }
        if !(self.c_max > 0.0 && self.c_max.is_finite()) {
            return Err(Error::invalid("risk c_max must be > 0"));
        }
        if !(self.kappa_a.is_finite() && self.eta_a.is_finite()) {
            return Err(Error::invalid("risk kappa_a and eta_a must be finite"));
        }
        Ok(())
    }

    pub fn weight_sum(&self) -> f64 {
        self.alpha_vlm + self.alpha_area + self.alpha_conf + self.alpha_depth
    }

    /// Drops the contextual term and rescales the remaining weights so their
    /// sum equals the original total weight.
    pub fn without_context(&self) -> RiskParams {
        let total = self.weight_sum();
        let rest = self.alpha_area + self.alpha_conf + self.alpha_depth;
        let scale = if rest > 0.0 { total / rest } else { 0.0 };
        RiskParams {
            alpha_vlm: 0.0,
            alpha_area: self.alpha_area * scale,
            alpha_conf: self.alpha_conf * scale,
            alpha_depth: self.alpha_depth * scale,
            ..*self
        }
    }
}

#[inline]
fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `σ(κ_a · (|M| / (H·W) − η_a))`.
pub fn area_score(mask: &Mask, params: &RiskParams) -> f64 {
    let ratio = mask.count() as f64 / (mask.width() * mask.height()) as f64;
    logistic(params.kappa_a * (ratio - params.eta_a))
}

pub fn depth_score(depth_m: f64, params: &RiskParams) -> f64 {
    (depth_m / params.d_ref).min(1.0)
}

/// Identity on detection confidence.
pub fn confidence_score(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("confidence {p} outside [0, 1]")));
    }
    Ok(p)
}

/// The four per-hazard factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HazardScores {
    pub vlm: f64,
    pub area: f64,
    pub conf: f64,
    pub depth: f64,
}

impl HazardScores {
    pub fn compute(det: &HazardDetection, params: &RiskParams) -> Result<Self> {
        Ok(HazardScores {
            vlm: det.c_vlm,
            area: area_score(&det.mask, params),
            conf: confidence_score(det.confidence)?,
            depth: depth_score(det.depth_m, params),
        })
    }

    /// Weighted sum, clamped to `c_max`.
    pub fn cost(&self, params: &RiskParams) -> f64 {
        let raw = params.alpha_vlm * self.vlm
            + params.alpha_area * self.area
            + params.alpha_conf * self.conf
            + params.alpha_depth * self.depth;
        raw.min(params.c_max)
    }
}

/// Cost grid for one detection: constant cost on the mask, zero elsewhere.
pub fn hazard_cost_map(det: &HazardDetection, params: &RiskParams) -> Result<Grid> {
    det.validate()?;
    let cost = HazardScores::compute(det, params)?.cost(params);
    Ok(fill_mask(&det.mask, cost))
}

fn fill_mask(mask: &Mask, cost: f64) -> Grid {
    let mut grid = Grid::zeros(mask.width(), mask.height());
    for (out, &on) in grid.values_mut().iter_mut().zip(mask.as_slice()) {
        if on {
            *out = cost;
        }
    }
    grid
}

/// Dense per-pixel risk in `[0, c_max]`, aligned with the camera image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskMap {
    grid: Grid,
    c_max: f64,
}

impl RiskMap {
    pub fn zeros(width: usize, height: usize, c_max: f64) -> Self {
        RiskMap {
            grid: Grid::zeros(width, height),
            c_max,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn c_max(&self) -> f64 {
        self.c_max
    }

    pub fn width(&self) -> usize {
        self.grid.width()
    }

    pub fn height(&self) -> usize {
        self.grid.height()
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.grid.get(m, n)
    }

    /// Linear greyscale: 0 ↦ 0, c_max ↦ 255.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.grid
            .values()
            .iter()
            .map(|&v| ((v / self.c_max).clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect()
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        pnm::encode_pgm(self.width(), self.height(), &self.to_bytes())
    }

    pub fn to_colors(&self) -> Vec<[u8; 3]> {
        self.to_bytes()
            .iter()
            .map(|&b| RISK_COLORMAP[b as usize])
            .collect()
    }

    /// False-color PPM through [`RISK_COLORMAP`].
    pub fn to_ppm(&self) -> Vec<u8> {
        pnm::encode_ppm(self.width(), self.height(), &self.to_colors())
    }

    /// False-color PPM with valid trajectory samples drawn in white.
    pub fn overlay_ppm(&self, samples: &[PixelSample]) -> Vec<u8> {
        let mut px = self.to_colors();
        for s in samples {
            if let Some((m, n)) = s.index() {
                px[n * self.width() + m] = [255, 255, 255];
            }
        }
        pnm::encode_ppm(self.width(), self.height(), &px)
    }
}

/// Pixel-wise maximum over hazard cost grids. No grids gives an all-zero map.
pub fn fuse(maps: &[Grid], width: usize, height: usize, c_max: f64) -> Result<RiskMap> {
    let mut out = Grid::zeros(width, height);
    for (i, g) in maps.iter().enumerate() {
        if g.dims() != (width, height) {
            return Err(Error::DimensionMismatch(format!(
                "cost map {i} is {}x{}, expected {width}x{height}",
                g.width(),
                g.height()
            )));
        }
        for (o, &v) in out.values_mut().iter_mut().zip(g.values()) {
            if v > *o {
                *o = v;
            }
        }
    }
    for o in out.values_mut() {
        *o = o.min(c_max);
    }
    Ok(RiskMap { grid: out, c_max })
}

/// Full pipeline: per-detection cost maps fused by maximum.
pub fn build_risk_map(
    detections: &[HazardDetection],
    params: &RiskParams,
    width: usize,
    height: usize,
) -> Result<RiskMap> {
    let maps = detections
        .iter()
        .map(|d| {
            if d.mask.dims() != (width, height) {
                return Err(Error::DimensionMismatch(format!(
                    "mask of detection '{}' is {}x{}, expected {width}x{height}",
                    d.hazard_id,
                    d.mask.width(),
                    d.mask.height()
                )));
            }
            hazard_cost_map(d, params)
        })
        .collect::<Result<Vec<_>>>()?;
    fuse(&maps, width, height, params.c_max)
}

/// Map with `c_max` on the masks of detections whose label is in `labels`,
/// ignoring every other detection.
pub fn obstacle_risk_map(
    detections: &[HazardDetection],
    labels: &[String],
    c_max: f64,
    width: usize,
    height: usize,
) -> Result<RiskMap> {
    let maps: Vec<Grid> = detections
        .iter()
        .filter(|d| labels.iter().any(|l| l == &d.label))
        .map(|d| fill_mask(&d.mask, c_max))
        .collect();
    fuse(&maps, width, height, c_max)
}
