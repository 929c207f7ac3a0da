//! File-exchange protocol for out-of-process perception providers.
//!
//! For each query a work directory receives:
//!
//! * `request.json` – [`RequestFile`]: protocol tag, prompt, motorcycle state
//!   and the names of the sidecars below.
//! * `camera.json` – [`CameraDescription`] (intrinsics plus row-major `t_cw`).
//! * `scene.json` – optional [`SceneSnapshot`] with ground-truth hazards.
//!
//! The provider answers with `response.json` ([`ResponseFile`]) and, for
//! masks given as `{"pgm": "<file>"}`, binary P5 sidecars in the same
//! directory holding 0 (background) or 255 (hazard). Masks may instead be
//! inlined as `{"rle": [...]}`: row-major run lengths alternating
//! background/hazard, starting with background.

use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{validate_detections, HazardDetection, PerceptionProvider};
use crate::error::{Error, Result};
use crate::grid::Mask;
use crate::pnm;
use crate::projection::rasterize_footprint;
use crate::scene::{CameraDescription, CameraModel, Hazard, MotorcycleState, Scenario};

pub const PROTOCOL: &str = "riskfield-perception/1";
pub const REQUEST_FILE: &str = "request.json";
pub const RESPONSE_FILE: &str = "response.json";
pub const CAMERA_FILE: &str = "camera.json";
pub const SCENE_FILE: &str = "scene.json";

pub const DEFAULT_PROMPT: &str = "You are assisting a motorcycle rider. Think step by step: describe the road \
surface, list every object or surface condition that could endanger a two-wheeled vehicle at the given speed \
and lean angle, then rate each one from 0 (no risk) to 10 (high risk).";

pub type RequestState = MotorcycleState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSnapshot {
    pub name: String,
    pub hazards: Vec<Hazard>,
}

/// In-memory form of one perception query.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptionRequest {
    pub scene: Option<SceneSnapshot>,
    pub state: MotorcycleState,
    pub prompt: String,
    pub camera: CameraModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestFile {
    pub protocol: String,
    pub prompt: String,
    pub state: RequestState,
    pub camera_file: String,
    pub scene_file: Option<String>,
    pub response_file: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaskRef {
    Pgm(String),
    Rle(Vec<usize>),
}

impl MaskRef {
    pub fn rle_from(mask: &Mask) -> MaskRef {
        let mut runs = Vec::new();
        let mut current = false;
        let mut len = 0usize;
        for &b in mask.as_slice() {
            if b == current {
                len += 1;
            } else {
                runs.push(len);
                current = b;
                len = 1;
            }
        }
        runs.push(len);
        MaskRef::Rle(runs)
    }
}

fn decode_rle(runs: &[usize], width: usize, height: usize) -> Result<Mask> {
    let total: usize = runs.iter().sum();
    if total != width * height {
        return Err(Error::DimensionMismatch(format!(
            "run lengths cover {total} pixels, expected {}",
            width * height
        )));
    }
    let mut bits = Vec::with_capacity(total);
    for (i, &len) in runs.iter().enumerate() {
        bits.extend(std::iter::repeat_n(i % 2 == 1, len));
    }
    Mask::from_vec(width, height, bits)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseDetection {
    pub hazard_id: String,
    pub label: String,
    pub c_vlm: f64,
    pub confidence: f64,
    #[serde(default)]
    pub depth_m: f64,
    pub mask: MaskRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseFile {
    pub width: usize,
    pub height: usize,
    /// `c_vlm` values are divided by this; use 10 for a 0–10 rating scale.
    #[serde(default = "unit_scale")]
    pub c_vlm_scale: f64,
    pub detections: Vec<ResponseDetection>,
}

fn unit_scale() -> f64 {
    1.0
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::parse(path.display().to_string(), e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("protocol types serialize");
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `request.json` and its sidecars into `dir` (created if needed).
pub fn write_request(dir: &Path, request: &PerceptionRequest) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_json(
        &dir.join(CAMERA_FILE),
        &CameraDescription::from(&request.camera),
    )?;
    if let Some(scene) = &request.scene {
        write_json(&dir.join(SCENE_FILE), scene)?;
    }
    let file = RequestFile {
        protocol: PROTOCOL.to_string(),
        prompt: request.prompt.clone(),
        state: request.state,
        camera_file: CAMERA_FILE.to_string(),
        scene_file: request.scene.as_ref().map(|_| SCENE_FILE.to_string()),
        response_file: RESPONSE_FILE.to_string(),
    };
    write_json(&dir.join(REQUEST_FILE), &file)
}

/// Parses and validates a response file against the expected image size.
/// Mask sidecars resolve relative to the response's directory.
pub fn read_response(path: &Path, width: usize, height: usize) -> Result<Vec<HazardDetection>> {
    if !path.exists() {
        return Err(Error::Protocol(format!(
            "missing response file {}",
            path.display()
        )));
    }
    let dir = path.parent().unwrap_or(Path::new("."));
    let resp: ResponseFile = read_json(path)?;
    if (resp.width, resp.height) != (width, height) {
        return Err(Error::DimensionMismatch(format!(
            "response is {}x{}, camera is {width}x{height}",
            resp.width, resp.height
        )));
    }
    if !(resp.c_vlm_scale > 0.0 && resp.c_vlm_scale.is_finite()) {
        return Err(Error::Protocol("c_vlm_scale must be positive".into()));
    }
    let mut out = Vec::with_capacity(resp.detections.len());
    for d in resp.detections {
        let mask = match &d.mask {
            MaskRef::Pgm(name) => {
                let mask_path = dir.join(name);
                let bytes = std::fs::read(&mask_path).map_err(|_| {
                    Error::Protocol(format!(
                        "detection '{}': missing mask file {}",
                        d.hazard_id,
                        mask_path.display()
                    ))
                })?;
                pnm::mask_from_pgm(&bytes)
                    .map_err(|e| Error::Protocol(format!("detection '{}': {e}", d.hazard_id)))?
            }
            MaskRef::Rle(runs) => decode_rle(runs, width, height).map_err(|e| {
                Error::DimensionMismatch(format!("detection '{}': {e}", d.hazard_id))
            })?,
        };
        out.push(HazardDetection {
            hazard_id: d.hazard_id,
            label: d.label,
            c_vlm: d.c_vlm / resp.c_vlm_scale,
            confidence: d.confidence,
            mask,
            depth_m: d.depth_m,
        });
    }
    validate_detections(&out, width, height)?;
    Ok(out)
}

/// How to reach an external provider.
#[derive(Debug, Clone, PartialEq)]
pub enum Endpoint {
    /// Run `program args... <work_dir>` and wait for it to exit.
    Command {
        program: PathBuf,
        args: Vec<String>,
        timeout: Duration,
    },
    /// Leave the request in the work directory and wait for some other
    /// process to drop `response.json` next to it.
    Directory { timeout: Duration, poll: Duration },
}

impl Endpoint {
    pub fn command(program: impl Into<PathBuf>, args: Vec<String>) -> Self {
        Endpoint::Command {
            program: program.into(),
            args,
            timeout: Duration::from_secs(30),
        }
    }

    fn timeout(&self) -> Duration {
        match self {
            Endpoint::Command { timeout, .. } | Endpoint::Directory { timeout, .. } => *timeout,
        }
    }
}

/// Runs one query through the file protocol in `work_dir`.
pub fn external_perceive(
    request: &PerceptionRequest,
    endpoint: &Endpoint,
    work_dir: &Path,
) -> Result<Vec<HazardDetection>> {
    let response_path = work_dir.join(RESPONSE_FILE);
    if response_path.exists() {
        std::fs::remove_file(&response_path).map_err(|e| Error::io(&response_path, e))?;
    }
    write_request(work_dir, request)?;
    let started = Instant::now();
    match endpoint {
        Endpoint::Command {
            program,
            args,
            timeout,
        } => {
            let mut child = Command::new(program)
                .args(args)
                .arg(work_dir)
                .stdin(Stdio::null())
                .stdout(Stdio::null())
                .stderr(Stdio::piped())
                .spawn()
                .map_err(|e| Error::io(program, e))?;
            let status = loop {
                if let Some(status) = child.try_wait().map_err(|e| Error::io(program, e))? {
                    break status;
                }
                if started.elapsed() > *timeout {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(Error::Timeout(*timeout));
                }
                std::thread::sleep(Duration::from_millis(1));
            };
            if !status.success() {
                let mut stderr = String::new();
                if let Some(mut pipe) = child.stderr.take() {
                    use std::io::Read;
                    let _ = pipe.read_to_string(&mut stderr);
                }
                return Err(Error::Protocol(format!(
                    "provider exited with {status}: {}",
                    stderr.trim()
                )));
            }
        }
        Endpoint::Directory { poll, .. } => {
            while !response_path.exists() {
                if started.elapsed() > endpoint.timeout() {
                    return Err(Error::Timeout(endpoint.timeout()));
                }
                std::thread::sleep(*poll);
            }
        }
    }
    read_response(
        &response_path,
        request.camera.width(),
        request.camera.height(),
    )
}

/// Provider that sends each frame through an [`Endpoint`].
///
/// Every query gets its own `frame_NNNNNN` directory under `work_root`; the
/// directory is removed after a successful read unless `keep_files` is set.
#[derive(Debug, Clone)]
pub struct ExternalProvider {
    pub endpoint: Endpoint,
    pub work_root: PathBuf,
    pub prompt: String,
    pub include_geometry: bool,
    pub keep_files: bool,
    frame: usize,
}

impl ExternalProvider {
    pub fn new(endpoint: Endpoint, work_root: impl Into<PathBuf>) -> Self {
        ExternalProvider {
            endpoint,
            work_root: work_root.into(),
            prompt: DEFAULT_PROMPT.to_string(),
            include_geometry: true,
            keep_files: false,
            frame: 0,
        }
    }
}

impl PerceptionProvider for ExternalProvider {
    fn perceive(
        &mut self,
        scenario: &Scenario,
        camera: &CameraModel,
        state: &MotorcycleState,
    ) -> Result<Vec<HazardDetection>> {
        let dir = self.work_root.join(format!("frame_{:06}", self.frame));
        self.frame += 1;
        let request = PerceptionRequest {
            scene: self.include_geometry.then(|| SceneSnapshot {
                name: scenario.name.clone(),
                hazards: scenario.hazards.clone(),
            }),
            state: *state,
            prompt: self.prompt.clone(),
            camera: *camera,
        };
        let detections = external_perceive(&request, &self.endpoint, &dir)?;
        if !self.keep_files {
            let _ = std::fs::remove_dir_all(&dir);
        }
        Ok(detections)
    }
}

/// Reference provider: answers a request with ground-truth detections
/// computed from the scene sidecar, masks written as PGM files.
pub fn echo_provider(dir: &Path) -> Result<()> {
    let request: RequestFile = read_json(&dir.join(REQUEST_FILE))?;
    if request.protocol != PROTOCOL {
        return Err(Error::Protocol(format!(
            "unsupported protocol '{}'",
            request.protocol
        )));
    }
    let desc: CameraDescription = read_json(&dir.join(&request.camera_file))?;
    let camera = CameraModel::try_from(&desc)?;
    let scene_file = request.scene_file.as_ref().ok_or_else(|| {
        Error::Protocol("echo provider needs scene geometry in the request".into())
    })?;
    let scene: SceneSnapshot = read_json(&dir.join(scene_file))?;
    let mut detections = Vec::new();
    for (i, h) in scene.hazards.iter().enumerate() {
        let mask = rasterize_footprint(h, &camera);
        if mask.is_empty() {
            continue;
        }
        let name = format!("mask_{i:03}.pgm");
        pnm::write_file(&dir.join(&name), &pnm::mask_to_pgm(&mask))?;
        detections.push(ResponseDetection {
            hazard_id: h.id.clone(),
            label: h.label.clone(),
            c_vlm: h.base_context_score,
            confidence: 1.0,
            depth_m: h.depth_m,
            mask: MaskRef::Pgm(name),
        });
    }
    let resp = ResponseFile {
        width: camera.width(),
        height: camera.height(),
        c_vlm_scale: 1.0,
        detections,
    };
    write_json(&dir.join(&request.response_file), &resp)
}
