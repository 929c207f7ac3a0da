//! C ABI for `riskfield`.
//!
//! Objects cross the boundary as opaque handles created by `rf_*_load` /
//! `rf_*_build` and released with the matching `rf_*_free`. Fallible calls
//! return an [`RfStatus`]; on failure [`rf_last_error`] describes the cause
//! for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use riskfield::perception::{OracleProvider, PerceptionProvider};
use riskfield::planner::plan;
use riskfield::riskmap::RiskMap;
use riskfield::scene::{camera_pose_at, load_scenario, parse_scenario, MotorcycleState, Scenario};
use riskfield::simulator::{risk_map_for_mode, run_episode, Mode, Termination};
use riskfield::Error;

/// Result codes. `RF_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    Validation = 5,
    Protocol = 6,
    Timeout = 7,
    DimensionMismatch = 8,
    EmptyControlSet = 9,
    InvalidMode = 10,
    UnknownParameter = 11,
    Image = 12,
    OutOfRange = 13,
    Panic = 14,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfMode {
    Ours = 0,
    NoVlm = 1,
    Baseline = 2,
}

impl From<RfMode> for Mode {
    fn from(m: RfMode) -> Self {
        match m {
            RfMode::Ours => Mode::Ours,
            RfMode::NoVlm => Mode::NoVlm,
            RfMode::Baseline => Mode::Baseline,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfTermination {
    Goal = 0,
    HazardContact = 1,
    Timeout = 2,
    OffRoad = 3,
}

impl From<Termination> for RfTermination {
    fn from(t: Termination) -> Self {
        match t {
            Termination::Goal => RfTermination::Goal,
            Termination::HazardContact => RfTermination::HazardContact,
            Termination::Timeout => RfTermination::Timeout,
            Termination::OffRoad => RfTermination::OffRoad,
        }
    }
}

/// Motorcycle state: position (m), heading (rad), speed (m/s), steering
/// angle (rad) and lean angle (rad).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v: f64,
    pub delta: f64,
    pub phi: f64,
}

impl From<RfState> for MotorcycleState {
    fn from(s: RfState) -> Self {
        MotorcycleState {
            x: s.x,
            y: s.y,
            theta: s.theta,
            v: s.v,
            delta: s.delta,
            phi: s.phi,
        }
    }
}

impl From<MotorcycleState> for RfState {
    fn from(s: MotorcycleState) -> Self {
        RfState {
            x: s.x,
            y: s.y,
            theta: s.theta,
            v: s.v,
            delta: s.delta,
            phi: s.phi,
        }
    }
}

/// Acceleration (m/s²) and steering rate (rad/s).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfControl {
    pub a: f64,
    pub ddelta: f64,
}

/// Episode outcome. `exposure_distance` is meaningful only when
/// `has_exposure` is true.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfEpisodeSummary {
    pub success: bool,
    pub reached_goal: bool,
    pub has_exposure: bool,
    pub exposure_distance: f64,
    pub steps: u64,
    pub termination: RfTermination,
}

/// Opaque scenario handle.
pub struct RfScenario(Scenario);

/// Opaque risk-map handle.
pub struct RfRiskMap(RiskMap);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("nul bytes removed"));
}

fn status_of(err: &Error) -> RfStatus {
    match err {
        Error::Io { .. } => RfStatus::Io,
        Error::Parse { .. } => RfStatus::Parse,
        Error::Validation(_) => RfStatus::Validation,
        Error::Protocol(_) => RfStatus::Protocol,
        Error::Timeout(_) => RfStatus::Timeout,
        Error::DimensionMismatch(_) => RfStatus::DimensionMismatch,
        Error::EmptyControlSet => RfStatus::EmptyControlSet,
        Error::InvalidMode(_) => RfStatus::InvalidMode,
        Error::UnknownParameter(_) => RfStatus::UnknownParameter,
        Error::Image(_) => RfStatus::Image,
    }
}

struct Failure(RfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RfStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(RfStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(RfStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message for the most recent failure on this thread. Empty when no call
/// has failed. The pointer stays valid until the next failing call on the
/// same thread.
#[no_mangle]
pub extern "C" fn rf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads and validates a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_scenario_load(
    path: *const c_char,
    out: *mut *mut RfScenario,
) -> RfStatus {
    guard(|| {
        let path = c_str(path, "path")?;
        let scenario = load_scenario(Path::new(path))?;
        store(out, RfScenario(scenario))
    })
}

/// Parses and validates a scenario from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_scenario_from_json(
    json: *const c_char,
    out: *mut *mut RfScenario,
) -> RfStatus {
    guard(|| {
        let text = c_str(json, "json")?;
        store(out, RfScenario(parse_scenario(text)?))
    })
}

/// # Safety
/// `scenario` must come from `rf_scenario_load`/`rf_scenario_from_json` and
/// not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rf_scenario_free(scenario: *mut RfScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Number of hazards; 0 for a null handle.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_scenario_hazard_count(scenario: *const RfScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.0.hazards.len())
}

/// # Safety
/// `scenario` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rf_scenario_start(
    scenario: *const RfScenario,
    out: *mut RfState,
) -> RfStatus {
    guard(|| {
        let s = borrow(scenario, "scenario")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = s.0.start.into();
        Ok(())
    })
}

/// Risk map seen from `state` with ground-truth perception.
///
/// # Safety
/// `scenario` and `state` must be valid pointers and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rf_risk_map_build(
    scenario: *const RfScenario,
    state: *const RfState,
    mode: RfMode,
    out: *mut *mut RfRiskMap,
) -> RfStatus {
    guard(|| {
        let s = &borrow(scenario, "scenario")?.0;
        let state: MotorcycleState = (*borrow(state, "state")?).into();
        let camera = camera_pose_at(&state, &s.rig());
        let detections = OracleProvider.perceive(s, &camera, &state)?;
        let map = risk_map_for_mode(s, mode.into(), &detections, &camera)?;
        store(out, RfRiskMap(map))
    })
}

/// # Safety
/// `map` must come from `rf_risk_map_build` and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rf_risk_map_free(map: *mut RfRiskMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// # Safety
/// `map` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_risk_map_width(map: *const RfRiskMap) -> usize {
    map.as_ref().map_or(0, |m| m.0.width())
}

/// # Safety
/// `map` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_risk_map_height(map: *const RfRiskMap) -> usize {
    map.as_ref().map_or(0, |m| m.0.height())
}

/// Risk at pixel column `m`, row `n`.
///
/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rf_risk_map_get(
    map: *const RfRiskMap,
    m: usize,
    n: usize,
    out: *mut f64,
) -> RfStatus {
    guard(|| {
        let map = &borrow(map, "map")?.0;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if m >= map.width() || n >= map.height() {
            return Err(Failure(
                RfStatus::OutOfRange,
                format!("pixel ({m}, {n}) outside {}x{}", map.width(), map.height()),
            ));
        }
        *out = map.get(m, n);
        Ok(())
    })
}

/// Copies the map row-major into `buf`, which must hold `width * height`
/// values.
///
/// # Safety
/// `buf` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rf_risk_map_copy(
    map: *const RfRiskMap,
    buf: *mut f64,
    len: usize,
) -> RfStatus {
    guard(|| {
        let map = &borrow(map, "map")?.0;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let values = map.grid().values();
        if len < values.len() {
            return Err(Failure(
                RfStatus::OutOfRange,
                format!("buffer holds {len} values, map has {}", values.len()),
            ));
        }
        std::ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
        Ok(())
    })
}

/// Best control from `state` against `map` toward the scenario goal.
///
/// # Safety
/// All pointers must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rf_plan(
    scenario: *const RfScenario,
    state: *const RfState,
    map: *const RfRiskMap,
    out: *mut RfControl,
) -> RfStatus {
    guard(|| {
        let s = &borrow(scenario, "scenario")?.0;
        let state: MotorcycleState = (*borrow(state, "state")?).into();
        let map = &borrow(map, "map")?.0;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let camera = camera_pose_at(&state, &s.rig());
        let outcome = plan(&state, map, &camera, s.goal, &s.planner_params)?;
        *out = RfControl {
            a: outcome.best.a,
            ddelta: outcome.best.ddelta,
        };
        Ok(())
    })
}

/// Runs one closed-loop episode with the scenario's seeded perception noise.
///
/// # Safety
/// `scenario` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rf_run_episode(
    scenario: *const RfScenario,
    mode: RfMode,
    seed: u64,
    out: *mut RfEpisodeSummary,
) -> RfStatus {
    guard(|| {
        let s = &borrow(scenario, "scenario")?.0;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = run_episode(s, mode.into(), seed)?;
        *out = RfEpisodeSummary {
            success: r.success,
            reached_goal: r.reached_goal,
            has_exposure: r.hazard_exposure_distance.is_some(),
            exposure_distance: r.hazard_exposure_distance.unwrap_or(0.0),
            steps: r.steps as u64,
            termination: r.termination.into(),
        };
        Ok(())
    })
}
