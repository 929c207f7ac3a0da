//! Hazard perception providers.
//!
//! A provider turns a scene snapshot into [`HazardDetection`]s: a label, a
//! contextual score, a detection confidence, an image mask and a depth
//! deviation per hazard. The oracle reads ground truth, the noisy provider
//! perturbs the oracle deterministically per seed, and the external provider
//! exchanges files with another process.

mod external;

pub use external::{
    echo_provider, external_perceive, read_response, write_request, Endpoint, ExternalProvider,
    MaskRef, PerceptionRequest, RequestState, ResponseDetection, ResponseFile, SceneSnapshot,
    CAMERA_FILE, PROTOCOL, REQUEST_FILE, RESPONSE_FILE, SCENE_FILE,
};

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Mask;
use crate::projection::rasterize_footprint;
use crate::scene::{CameraModel, MotorcycleState, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub struct HazardDetection {
    pub hazard_id: String,
    pub label: String,
    /// Contextual severity in [0, 1].
    pub c_vlm: f64,
    /// Detection confidence in [0, 1].
    pub confidence: f64,
    pub mask: Mask,
    /// Depth deviation below the road plane, meters.
    pub depth_m: f64,
}

impl HazardDetection {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.c_vlm) {
            return Err(Error::invalid(format!(
                "detection '{}': c_vlm {} outside [0, 1]",
                self.hazard_id, self.c_vlm
            )));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(Error::invalid(format!(
                "detection '{}': confidence {} outside [0, 1]",
                self.hazard_id, self.confidence
            )));
        }
        if !(self.depth_m >= 0.0 && self.depth_m.is_finite()) {
            return Err(Error::invalid(format!(
                "detection '{}': depth_m must be >= 0",
                self.hazard_id
            )));
        }
        Ok(())
    }
}

/// Checks per-detection ranges, mask size and id uniqueness.
pub fn validate_detections(
    detections: &[HazardDetection],
    width: usize,
    height: usize,
) -> Result<()> {
    let mut seen = HashSet::new();
    for d in detections {
        d.validate()?;
        if d.mask.dims() != (width, height) {
            return Err(Error::DimensionMismatch(format!(
                "detection '{}': mask is {}x{}, camera is {width}x{height}",
                d.hazard_id,
                d.mask.width(),
                d.mask.height()
            )));
        }
        if !seen.insert(d.hazard_id.as_str()) {
            return Err(Error::invalid(format!(
                "duplicate detection id '{}'",
                d.hazard_id
            )));
        }
    }
    Ok(())
}

/// Ground-truth detections: one per hazard with a nonempty mask.
///
/// The state (including lean angle) does not influence the result.
pub fn oracle_perceive(
    scenario: &Scenario,
    camera: &CameraModel,
    _state: &MotorcycleState,
) -> Vec<HazardDetection> {
    scenario
        .hazards
        .iter()
        .filter_map(|h| {
            let mask = rasterize_footprint(h, camera);
            (!mask.is_empty()).then(|| HazardDetection {
                hazard_id: h.id.clone(),
                label: h.label.clone(),
                c_vlm: h.base_context_score,
                confidence: 1.0,
                mask,
                depth_m: h.depth_m,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseParams {
    /// Std-dev of additive Gaussian noise on confidence.
    pub confidence_std: f64,
    /// Std-dev of additive Gaussian noise on c_vlm.
    pub c_vlm_std: f64,
    /// Probability that a hazard is missed entirely.
    pub dropout: f64,
    /// Masks are dilated or eroded by a radius drawn uniformly from
    /// `[-mask_radius, mask_radius]` pixels.
    pub mask_radius: u32,
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.confidence_std >= 0.0 && self.c_vlm_std >= 0.0) {
            return Err(Error::invalid("noise standard deviations must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.dropout) {
            return Err(Error::invalid("noise dropout must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        *self == NoiseParams::default()
    }
}

/// Per-hazard perturbation, fixed for a given (seed, hazard index).
#[derive(Debug, Clone, Copy, PartialEq)]
struct Perturbation {
    dropped: bool,
    c_vlm_offset: f64,
    confidence_offset: f64,
    radius: i32,
}

fn perturbation(noise: &NoiseParams, seed: u64, hazard_index: usize) -> Perturbation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(hazard_index as u64);
    let u: f64 = rng.random();
    let z_vlm: f64 = StandardNormal.sample(&mut rng);
    let z_conf: f64 = StandardNormal.sample(&mut rng);
    let r = noise.mask_radius as i32;
    let radius = rng.random_range(-r..=r);
    Perturbation {
        dropped: u < noise.dropout,
        c_vlm_offset: noise.c_vlm_std * z_vlm,
        confidence_offset: noise.confidence_std * z_conf,
        radius,
    }
}

/// Oracle detections with seeded perturbations.
///
/// Randomness is drawn per hazard from the seed and the hazard's index in the
/// scenario, so for a fixed seed a hazard keeps the same scores, dropout
/// decision and mask radius from every viewpoint.
pub fn noisy_perceive(
    scenario: &Scenario,
    camera: &CameraModel,
    state: &MotorcycleState,
    noise: &NoiseParams,
    seed: u64,
) -> Vec<HazardDetection> {
    let mut out = Vec::new();
    let oracle = oracle_perceive(scenario, camera, state);
    for det in oracle {
        let index = scenario
            .hazards
            .iter()
            .position(|h| h.id == det.hazard_id)
            .expect("oracle detections come from scenario hazards");
        let p = perturbation(noise, seed, index);
        if p.dropped {
            continue;
        }
        let mask = det.mask.morph(p.radius);
        if mask.is_empty() {
            continue;
        }
        out.push(HazardDetection {
            c_vlm: (det.c_vlm + p.c_vlm_offset).clamp(0.0, 1.0),
            confidence: (det.confidence + p.confidence_offset).clamp(0.0, 1.0),
            mask,
            ..det
        });
    }
    out
}

/// Anything that can produce detections for a frame.
pub trait PerceptionProvider {
    fn perceive(
        &mut self,
        scenario: &Scenario,
        camera: &CameraModel,
        state: &MotorcycleState,
    ) -> Result<Vec<HazardDetection>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OracleProvider;

impl PerceptionProvider for OracleProvider {
    fn perceive(
        &mut self,
        scenario: &Scenario,
        camera: &CameraModel,
        state: &MotorcycleState,
    ) -> Result<Vec<HazardDetection>> {
        Ok(oracle_perceive(scenario, camera, state))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NoisyProvider {
    pub noise: NoiseParams,
    pub seed: u64,
}

impl PerceptionProvider for NoisyProvider {
    fn perceive(
        &mut self,
        scenario: &Scenario,
        camera: &CameraModel,
        state: &MotorcycleState,
    ) -> Result<Vec<HazardDetection>> {
        Ok(noisy_perceive(
            scenario,
            camera,
            state,
            &self.noise,
            self.seed,
        ))
    }
}
