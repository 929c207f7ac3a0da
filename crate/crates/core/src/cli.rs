//! `riskfield` command line: `run`, `batch`, `render`, `validate` and the
//! reference `provider-echo` used by the external-provider protocol.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::perception::{
    echo_provider, read_response, Endpoint, ExternalProvider, NoisyProvider, OracleProvider,
    PerceptionProvider,
};
use crate::planner::{plan, write_candidates_csv};
use crate::pnm;
use crate::projection::project_trajectory;
use crate::riskmap::HazardScores;
use crate::scene::{camera_pose_at, load_scenario, MotorcycleState, Scenario};
use crate::simulator::{
    risk_map_for_mode, run_batch_with, run_episode_with, BatchMetrics, EpisodeResult, Mode,
};

#[derive(Debug, Parser)]
#[command(
    name = "riskfield",
    version,
    about = "Hazard risk maps and risk-aware motorcycle planning"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one closed-loop episode.
    Run(RunArgs),
    /// Run seeded trials for every (scenario, mode) pair and summarize.
    Batch(BatchArgs),
    /// Write hazard masks and the fused risk map for one state.
    Render(RenderArgs),
    /// Validate a scenario file or an external-provider response.
    Validate { path: PathBuf },
    /// Reference external provider: answer `DIR/request.json` with
    /// ground-truth detections.
    #[command(hide = true)]
    ProviderEcho { dir: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Ours,
    #[value(name = "no_vlm")]
    NoVlm,
    Baseline,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Ours => Mode::Ours,
            ModeArg::NoVlm => Mode::NoVlm,
            ModeArg::Baseline => Mode::Baseline,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Oracle,
    Noisy,
    External,
}

#[derive(Debug, Clone, Args)]
pub struct ProviderArgs {
    /// Perception provider. `noisy` uses the scenario's trial noise and is
    /// exact when that noise is zero.
    #[arg(long, value_enum, default_value = "noisy")]
    pub provider: ProviderKind,
    /// External provider program (invoked with the work directory as its
    /// last argument), or `dir:` to exchange files with a watcher.
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Extra argument passed to the endpoint program before the directory.
    #[arg(long = "endpoint-arg", allow_hyphen_values = true)]
    pub endpoint_args: Vec<String>,
    /// Provider timeout per frame, seconds.
    #[arg(long, default_value_t = 30.0)]
    pub provider_timeout: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Parameter override `section.field=value` with section one of
    /// riskmap, planner, sim, trials. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, value_enum, default_value = "ours")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write per-frame risk maps, trajectory overlays and planner dumps.
    #[arg(long)]
    pub render: bool,
    #[command(flatten)]
    pub provider: ProviderArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BatchArgs {
    /// Scenario file. Repeatable.
    #[arg(long = "scenario", required = true)]
    pub scenarios: Vec<PathBuf>,
    /// Mode. Repeatable; all three when omitted.
    #[arg(long = "mode", value_enum)]
    pub modes: Vec<ModeArg>,
    /// Trials per (scenario, mode); defaults to the scenario's `trials.count`.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base seed; defaults to the scenario's `trials.base_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Skip the per-trial trajectory CSVs.
    #[arg(long)]
    pub no_trajectories: bool,
    #[command(flatten)]
    pub provider: ProviderArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, value_enum, default_value = "ours")]
    pub mode: ModeArg,
    /// Pose `x,y,theta[,v]`; the scenario start when omitted.
    #[arg(long, value_name = "X,Y,THETA[,V]")]
    pub state: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub provider: ProviderArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Exit code for an error: 2 for usage problems, 1 for data problems.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::UnknownParameter(_) | Error::InvalidMode(_) => 2,
        _ => 1,
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Batch(args) => with_thread_cap(|| cmd_batch(&args)),
        Command::Render(args) => cmd_render(&args),
        Command::Validate { path } => cmd_validate(&path).map(|summary| println!("{summary}")),
        Command::ProviderEcho { dir } => echo_provider(&dir),
    }
}

fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let threads = std::env::var("RISKFIELD_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok());
    match threads {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .unwrap_or_else(|e| panic!("cannot build thread pool: {e}")),
        _ => f(),
    }
}

/// Applies `section.field=value` overrides. Values parse as JSON, falling
/// back to a plain string.
pub fn apply_overrides(scenario: &mut Scenario, overrides: &[String]) -> Result<()> {
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| Error::UnknownParameter(format!("{item} (expected key=value)")))?;
        let (section, field) = key
            .split_once('.')
            .ok_or_else(|| Error::UnknownParameter(key.to_string()))?;
        let value: Value =
            serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let unknown = || Error::UnknownParameter(key.to_string());
        macro_rules! patch {
            ($target:expr) => {{
                let mut obj = serde_json::to_value(&$target).expect("params serialize");
                let slot = obj.get_mut(field).ok_or_else(unknown)?;
                *slot = value;
                $target = serde_json::from_value(obj)
                    .map_err(|e| Error::parse(format!("override {key}"), e))?;
            }};
        }
        match section {
            "riskmap" | "risk_params" => patch!(scenario.risk_params),
            "planner" | "planner_params" => patch!(scenario.planner_params),
            "sim" => patch!(scenario.sim),
            "trials" => patch!(scenario.trials),
            _ => return Err(unknown()),
        }
    }
    scenario.validate()
}

fn load_with_overrides(path: &Path, overrides: &[String]) -> Result<Scenario> {
    let mut scenario = load_scenario(path)?;
    apply_overrides(&mut scenario, overrides)?;
    Ok(scenario)
}

fn parse_endpoint(args: &ProviderArgs) -> Result<Endpoint> {
    let raw = args.endpoint.as_deref().ok_or_else(|| {
        Error::UnknownParameter("--endpoint is required with --provider external".into())
    })?;
    let timeout = std::time::Duration::from_secs_f64(args.provider_timeout);
    Ok(if raw == "dir:" {
        Endpoint::Directory {
            timeout,
            poll: std::time::Duration::from_millis(5),
        }
    } else {
        Endpoint::Command {
            program: PathBuf::from(raw),
            args: args.endpoint_args.clone(),
            timeout,
        }
    })
}

fn make_provider(
    args: &ProviderArgs,
    scenario: &Scenario,
    seed: u64,
    work_root: &Path,
) -> Result<Box<dyn PerceptionProvider + Send>> {
    Ok(match args.provider {
        ProviderKind::Oracle => Box::new(OracleProvider),
        ProviderKind::Noisy => Box::new(NoisyProvider {
            noise: scenario.trials.noise,
            seed,
        }),
        ProviderKind::External => Box::new(ExternalProvider::new(parse_endpoint(args)?, work_root)),
    })
}

impl PerceptionProvider for Box<dyn PerceptionProvider + Send> {
    fn perceive(
        &mut self,
        scenario: &Scenario,
        camera: &crate::scene::CameraModel,
        state: &MotorcycleState,
    ) -> Result<Vec<crate::perception::HazardDetection>> {
        (**self).perceive(scenario, camera, state)
    }
}

#[derive(Debug, Serialize)]
struct ProviderConfig<'a> {
    kind: ProviderKind,
    endpoint: Option<&'a str>,
    endpoint_args: &'a [String],
}

impl<'a> From<&'a ProviderArgs> for ProviderConfig<'a> {
    fn from(a: &'a ProviderArgs) -> Self {
        ProviderConfig {
            kind: a.provider,
            endpoint: a.endpoint.as_deref(),
            endpoint_args: &a.endpoint_args,
        }
    }
}

#[derive(Debug, Serialize)]
struct RunConfig<'a> {
    scenario_path: &'a Path,
    mode: Mode,
    seed: u64,
    provider: ProviderConfig<'a>,
    overrides: &'a [String],
    scenario: &'a Scenario,
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("outputs serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `t,x,y,theta,v,delta` per visited state.
pub fn trajectory_csv(states: &[MotorcycleState], dt: f64) -> String {
    let mut out = String::from("t,x,y,theta,v,delta\n");
    for (i, s) in states.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            i as f64 * dt,
            s.x,
            s.y,
            s.theta,
            s.v,
            s.delta
        );
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn cmd_run(args: &RunArgs) -> Result<()> {
    let scenario = load_with_overrides(&args.scenario, &args.common.overrides)?;
    let out = &args.common.out;
    create_dir(out)?;
    let mode: Mode = args.mode.into();
    let mut provider = make_provider(&args.provider, &scenario, args.seed, &out.join("provider"))?;

    let frames_dir = out.join("frames");
    if args.render {
        create_dir(&frames_dir)?;
    }
    let mut render_error: Option<Error> = None;
    let result = run_episode_with(&scenario, mode, args.seed, &mut provider, |frame| {
        if !args.render || render_error.is_some() {
            return;
        }
        let stem = frames_dir.join(format!("frame_{:05}", frame.step));
        let samples = project_trajectory(
            &frame.plan.best_trajectory.states,
            frame.camera,
            scenario.planner_params.ground_offset,
        );
        let mut csv = Vec::new();
        let written = pnm::write_file(&stem.with_extension("risk.pgm"), &frame.risk.to_pgm())
            .and_then(|_| pnm::write_file(&stem.with_extension("risk.ppm"), &frame.risk.to_ppm()))
            .and_then(|_| {
                pnm::write_file(
                    &stem.with_extension("overlay.ppm"),
                    &frame.risk.overlay_ppm(&samples),
                )
            })
            .and_then(|_| {
                write_candidates_csv(&mut csv, &frame.plan.candidates)
                    .map_err(|e| Error::Image(e.to_string()))?;
                pnm::write_file(&stem.with_extension("candidates.csv"), &csv)
            });
        if let Err(e) = written {
            render_error = Some(e);
        }
    })?;
    if let Some(e) = render_error {
        return Err(e);
    }

    #[derive(Serialize)]
    struct RunOutput<'a> {
        effective_config: RunConfig<'a>,
        result: &'a EpisodeResult,
    }
    let config = RunConfig {
        scenario_path: &args.scenario,
        mode,
        seed: args.seed,
        provider: (&args.provider).into(),
        overrides: &args.common.overrides,
        scenario: &scenario,
    };
    write_json(
        &out.join("result.json"),
        &RunOutput {
            effective_config: config,
            result: &result,
        },
    )?;
    write_text(
        &out.join("trajectory.csv"),
        &trajectory_csv(&result.trajectory, scenario.planner_params.dt),
    )?;
    println!(
        "{} [{}] seed {}: success={} reached_goal={} termination={} steps={} exposure={}",
        scenario.name,
        mode,
        args.seed,
        result.success,
        result.reached_goal,
        result.termination.as_str(),
        result.steps,
        fmt_opt(result.hazard_exposure_distance)
    );
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into())
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn cmd_batch(args: &BatchArgs) -> Result<()> {
    let modes: Vec<Mode> = if args.modes.is_empty() {
        Mode::ALL.to_vec()
    } else {
        args.modes.iter().map(|&m| m.into()).collect()
    };
    if args.provider.provider == ProviderKind::External {
        parse_endpoint(&args.provider)?;
    }
    let out = &args.common.out;
    create_dir(out)?;
    let traj_dir = out.join("trajectories");
    if !args.no_trajectories {
        create_dir(&traj_dir)?;
    }

    let scenarios = args
        .scenarios
        .iter()
        .map(|p| load_with_overrides(p, &args.common.overrides))
        .collect::<Result<Vec<_>>>()?;

    let mut all = Vec::new();
    for scenario in &scenarios {
        let n = args.trials.unwrap_or(scenario.trials.count);
        let base = args.seed.unwrap_or(scenario.trials.base_seed);
        for &mode in &modes {
            let root = out
                .join("provider")
                .join(format!("{}_{}", sanitize(&scenario.name), mode));
            let metrics = run_batch_with(scenario, mode, n, base, |trial, seed| {
                make_provider(
                    &args.provider,
                    scenario,
                    seed,
                    &root.join(format!("trial_{trial:03}")),
                )
                .expect("provider arguments checked before the batch")
            })?;
            if !args.no_trajectories {
                for (t, r) in metrics.trials.iter().zip(&metrics.results) {
                    let name = format!("{}_{}_{:03}.csv", sanitize(&scenario.name), mode, t.trial);
                    write_text(
                        &traj_dir.join(name),
                        &trajectory_csv(&r.trajectory, scenario.planner_params.dt),
                    )?;
                }
            }
            all.push(metrics);
        }
    }
    pnm::write_file(&out.join("batch.csv"), &batch_csv(&all))?;

    #[derive(Serialize)]
    struct BatchConfig<'a> {
        scenario_paths: &'a [PathBuf],
        modes: &'a [Mode],
        trials: Option<usize>,
        base_seed: Option<u64>,
        provider: ProviderConfig<'a>,
        overrides: &'a [String],
        scenarios: &'a [Scenario],
    }
    #[derive(Serialize)]
    struct BatchOutput<'a> {
        effective_config: BatchConfig<'a>,
        metrics: &'a [BatchMetrics],
    }
    write_json(
        &out.join("summary.json"),
        &BatchOutput {
            effective_config: BatchConfig {
                scenario_paths: &args.scenarios,
                modes: &modes,
                trials: args.trials,
                base_seed: args.seed,
                provider: (&args.provider).into(),
                overrides: &args.common.overrides,
                scenarios: &scenarios,
            },
            metrics: &all,
        },
    )?;
    print!("{}", summary_table(&all));
    Ok(())
}

/// `trial,mode,scenario,success,exposure_distance,steps,termination`, one
/// row per trial in batch order. Missing exposure is an empty field.
pub fn batch_csv(metrics: &[BatchMetrics]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = [
        "trial",
        "mode",
        "scenario",
        "success",
        "exposure_distance",
        "steps",
        "termination",
    ];
    w.write_record(header).expect("in-memory write");
    for m in metrics {
        for t in &m.trials {
            w.write_record([
                t.trial.to_string(),
                m.mode.to_string(),
                m.scenario.clone(),
                t.success.to_string(),
                t.exposure_distance
                    .map(|d| d.to_string())
                    .unwrap_or_default(),
                t.steps.to_string(),
                t.termination.as_str().to_string(),
            ])
            .expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory flush")
}

/// One row per (scenario, mode): success rate and mean exposure distance.
pub fn summary_table(metrics: &[BatchMetrics]) -> String {
    let mut out = format!(
        "{:<24} {:<9} {:>7} {:>12} {:>14}\n",
        "scenario", "mode", "trials", "success_%", "exposure_m"
    );
    for m in metrics {
        let _ = writeln!(
            out,
            "{:<24} {:<9} {:>7} {:>12.1} {:>14}",
            m.scenario,
            m.mode.as_str(),
            m.n_trials,
            m.success_rate,
            fmt_opt(m.mean_hazard_exposure_distance)
        );
    }
    out
}

fn parse_state(raw: &str, template: &MotorcycleState) -> Result<MotorcycleState> {
    let parts: Vec<f64> = raw
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::UnknownParameter(format!("--state {raw}")))?;
    if !(3..=4).contains(&parts.len()) {
        return Err(Error::UnknownParameter(format!(
            "--state {raw} (expected x,y,theta[,v])"
        )));
    }
    Ok(MotorcycleState {
        x: parts[0],
        y: parts[1],
        theta: crate::scene::normalize_angle(parts[2]),
        v: parts.get(3).copied().unwrap_or(template.v),
        ..*template
    })
}

pub fn cmd_render(args: &RenderArgs) -> Result<()> {
    let scenario = load_with_overrides(&args.scenario, &args.common.overrides)?;
    let state = match &args.state {
        Some(raw) => parse_state(raw, &scenario.start)?,
        None => scenario.start,
    };
    state.validate(scenario.planner_params.delta_max)?;
    let out = &args.common.out;
    create_dir(out)?;
    let mode: Mode = args.mode.into();
    let camera = camera_pose_at(&state, &scenario.rig());
    let mut provider = make_provider(&args.provider, &scenario, args.seed, &out.join("provider"))?;
    let detections = provider.perceive(&scenario, &camera, &state)?;
    let risk = risk_map_for_mode(&scenario, mode, &detections, &camera)?;

    #[derive(Serialize)]
    struct DetectionInfo {
        hazard_id: String,
        label: String,
        mask_file: String,
        mask_pixels: usize,
        scores: HazardScores,
        cost: f64,
    }
    let params = match mode {
        Mode::NoVlm => scenario.risk_params.without_context(),
        _ => scenario.risk_params,
    };
    let mut infos = Vec::new();
    for d in &detections {
        let file = format!("mask_{}.pgm", sanitize(&d.hazard_id));
        pnm::write_file(&out.join(&file), &pnm::mask_to_pgm(&d.mask))?;
        let scores = HazardScores::compute(d, &params)?;
        infos.push(DetectionInfo {
            hazard_id: d.hazard_id.clone(),
            label: d.label.clone(),
            mask_file: file,
            mask_pixels: d.mask.count(),
            cost: scores.cost(&params),
            scores,
        });
    }
    pnm::write_file(&out.join("risk.pgm"), &risk.to_pgm())?;
    pnm::write_file(&out.join("risk.ppm"), &risk.to_ppm())?;
    let outcome = plan(
        &state,
        &risk,
        &camera,
        scenario.goal,
        &scenario.planner_params,
    )?;
    let samples = project_trajectory(
        &outcome.best_trajectory.states,
        &camera,
        scenario.planner_params.ground_offset,
    );
    pnm::write_file(&out.join("overlay.ppm"), &risk.overlay_ppm(&samples))?;

    #[derive(Serialize)]
    struct RenderOutput<'a> {
        effective_config: RunConfig<'a>,
        state: MotorcycleState,
        detections: Vec<DetectionInfo>,
        risk_max: f64,
    }
    write_json(
        &out.join("render.json"),
        &RenderOutput {
            effective_config: RunConfig {
                scenario_path: &args.scenario,
                mode,
                seed: args.seed,
                provider: (&args.provider).into(),
                overrides: &args.common.overrides,
                scenario: &scenario,
            },
            state,
            detections: infos,
            risk_max: risk.grid().max_value(),
        },
    )?;
    println!(
        "{}: {} detections, max risk {:.3}",
        scenario.name,
        detections.len(),
        risk.grid().max_value()
    );
    Ok(())
}

/// Validates a scenario or a provider response and returns a one-line summary.
pub fn cmd_validate(path: &Path) -> Result<String> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e))?;
    if value.get("detections").is_some() {
        let dim = |k: &str| value.get(k).and_then(Value::as_u64).map(|v| v as usize);
        let (w, h) = dim("width")
            .zip(dim("height"))
            .ok_or_else(|| Error::Protocol("response needs integer width and height".into()))?;
        let dets = read_response(path, w, h)?;
        Ok(format!(
            "valid provider response: {} detections ({w}x{h})",
            dets.len()
        ))
    } else {
        let s = load_scenario(path)?;
        Ok(format!(
            "valid scenario '{}': {} hazards",
            s.name,
            s.hazards.len()
        ))
    }
}
