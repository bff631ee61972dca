//! Command-line front end: flag parsing, `key=value` config files, point
//! resolution, and CSV / metadata output.
//!
//! Every flag has a config-file key of the same name with `-` replaced by
//! `_`. Values on the command line override the file; the seed falls back to
//! `SIM_SEED` and then to 0.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::evolve::{ideal_gate_u2, one_cycle_gate};
use crate::exec::with_workers;
use crate::fidelity::{Adaptive, ControlMode, EstimatorConfig};
use crate::model::{self, Branch, ControlBit, DriveParams, TwoQubitParams};
use crate::noise::{InputMeasure, NoiseSpec};
use crate::qmath::GateMatrix;
use crate::sweep::{
    self, fmt_num, linspace, sweep_generic, Fig1, Fig2, Fig3, Fig4, PointGate, SweepConfig, SweepPoint, SweepResult,
};

pub const SEED_ENV: &str = "SIM_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "geogate",
    version,
    about = "Fidelity of rotating-field geometric/dynamic qubit gates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print phases, axis angle and ideal gate at one control point.
    Gate(PointArgs),
    /// Monte Carlo fidelity at one control point.
    Fidelity(PointArgs),
    /// Fidelity along one axis of control space.
    Sweep(SweepArgs),
    /// Run a figure preset and write CSV plus metadata.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug, Default, Clone)]
pub struct PointArgs {
    /// Total phase is fixed at −βπ; ω is solved for.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long)]
    pub omega1: Option<f64>,
    /// Offset Δ of ω1 from the zero-dynamic line (absolute units).
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub coupling_j: Option<f64>,
    #[arg(long)]
    pub delta0: Option<f64>,
    #[arg(long)]
    pub delta1: Option<f64>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = ControlMode::from_str)]
    pub control_mode: Option<ControlMode>,
    #[arg(long, value_parser = Branch::from_str)]
    pub branch: Option<Branch>,
    /// Haar-random input states instead of uniform θ, φ.
    #[arg(long)]
    pub haar: bool,
    /// Put ω1 on the zero-dynamic line.
    #[arg(long)]
    pub zero_dynamic: bool,
    #[arg(long)]
    pub two_qubit: bool,
    /// Add input states in batches of `n` until the stderr drops below this.
    #[arg(long)]
    pub target_stderr: Option<f64>,
    #[arg(long)]
    pub max_states: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub axis: Option<Axis>,
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[command(flatten)]
    pub point: PointArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub figure: Figure,
    /// Main axis of the preset (Δ/ω0 for fig1/fig2, ω0 for fig4).
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    /// Points on the main axis; points per axis for fig3.
    #[arg(long)]
    pub steps: Option<usize>,
    #[command(flatten)]
    pub point: PointArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    /// Δ/ω0, offset from the zero-dynamic line.
    DeltaOverOmega0,
    Omega0,
    Omega1,
}

impl Axis {
    fn name(self) -> &'static str {
        match self {
            Axis::DeltaOverOmega0 => "delta-over-omega0",
            Axis::Omega0 => "omega0",
            Axis::Omega1 => "omega1",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl Figure {
    fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
        }
    }
}

/// Every setting a run can take, as read from flags and/or a config file.
/// `None` means "not given".
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub command: Option<String>,
    pub figure: Option<String>,
    pub beta: Option<f64>,
    pub omega: Option<f64>,
    pub omega0: Option<f64>,
    pub omega1: Option<f64>,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    pub coupling_j: Option<f64>,
    pub delta0: Option<f64>,
    pub delta1: Option<f64>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub control_mode: Option<ControlMode>,
    pub branch: Option<Branch>,
    pub haar: Option<bool>,
    pub zero_dynamic: Option<bool>,
    pub two_qubit: Option<bool>,
    pub target_stderr: Option<f64>,
    pub max_states: Option<usize>,
    pub axis: Option<String>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub steps: Option<usize>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

fn parse_value<T: FromStr>(key: &str, raw: &str, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse()
        .map_err(|e| Error::Config(format!("line {line}: bad value `{raw}` for `{key}`: {e}")))
}

/// Keys with this prefix are provenance written next to outputs; the config
/// reader skips them so a metadata sidecar can be fed back with `--config`.
pub const META_PREFIX: &str = "meta.";

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line}: expected key=value, got `{body}`")))?;
            let (key, v) = (key.trim(), value.trim());
            if key.starts_with(META_PREFIX) {
                continue;
            }
            match key {
                "command" => c.command = Some(v.to_string()),
                "figure" => c.figure = Some(v.to_string()),
                "beta" => c.beta = Some(parse_value(key, v, line)?),
                "omega" => c.omega = Some(parse_value(key, v, line)?),
                "omega0" => c.omega0 = Some(parse_value(key, v, line)?),
                "omega1" => c.omega1 = Some(parse_value(key, v, line)?),
                "delta" => c.delta = Some(parse_value(key, v, line)?),
                "alpha" => c.alpha = Some(parse_value(key, v, line)?),
                "coupling_j" => c.coupling_j = Some(parse_value(key, v, line)?),
                "delta0" => c.delta0 = Some(parse_value(key, v, line)?),
                "delta1" => c.delta1 = Some(parse_value(key, v, line)?),
                "m" => c.m = Some(parse_value(key, v, line)?),
                "n" => c.n = Some(parse_value(key, v, line)?),
                "seed" => c.seed = Some(parse_value(key, v, line)?),
                "control_mode" => c.control_mode = Some(parse_value(key, v, line)?),
                "branch" => c.branch = Some(parse_value(key, v, line)?),
                "haar" => c.haar = Some(parse_value(key, v, line)?),
                "zero_dynamic" => c.zero_dynamic = Some(parse_value(key, v, line)?),
                "two_qubit" => c.two_qubit = Some(parse_value(key, v, line)?),
                "target_stderr" => c.target_stderr = Some(parse_value(key, v, line)?),
                "max_states" => c.max_states = Some(parse_value(key, v, line)?),
                "axis" => c.axis = Some(v.to_string()),
                "from" => c.from = Some(parse_value(key, v, line)?),
                "to" => c.to = Some(parse_value(key, v, line)?),
                "steps" => c.steps = Some(parse_value(key, v, line)?),
                "workers" => c.workers = Some(parse_value(key, v, line)?),
                "out" => c.out = Some(PathBuf::from(v)),
                other => return Err(Error::Config(format!("line {line}: unknown key `{other}`"))),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::parse(&text)
    }

    /// `key=value` lines for every setting that is present. Floats use the
    /// shortest representation that parses back to the same bits.
    pub fn to_config_string(&self) -> String {
        self.entries(true)
            .into_iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    /// Settings that determine output bytes (no `workers`, no `out`).
    fn entries(&self, with_runtime: bool) -> Vec<(&'static str, String)> {
        let mut e: Vec<(&'static str, String)> = Vec::new();
        macro_rules! put {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field { e.push((stringify!($field), v.to_string())); })*
            };
        }
        put!(command, figure, beta, omega, omega0, omega1, delta, alpha, coupling_j, delta0, delta1, m, n, seed);
        if let Some(v) = self.control_mode {
            e.push(("control_mode", v.name().to_string()));
        }
        put!(
            branch,
            haar,
            zero_dynamic,
            two_qubit,
            target_stderr,
            max_states,
            axis,
            from,
            to,
            steps
        );
        if with_runtime {
            put!(workers);
            if let Some(p) = &self.out {
                e.push(("out", p.display().to_string()));
            }
        }
        e
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($field:ident),*) => { RunConfig { $($field: over.$field.or(self.$field)),* } };
        }
        pick!(
            command,
            figure,
            beta,
            omega,
            omega0,
            omega1,
            delta,
            alpha,
            coupling_j,
            delta0,
            delta1,
            m,
            n,
            seed,
            control_mode,
            branch,
            haar,
            zero_dynamic,
            two_qubit,
            target_stderr,
            max_states,
            axis,
            from,
            to,
            steps,
            workers,
            out
        )
    }

    pub fn noise(&self) -> Result<NoiseSpec> {
        NoiseSpec::new(self.delta0.unwrap_or(0.0), self.delta1.unwrap_or(0.0))
    }

    pub fn estimator(&self) -> Result<EstimatorConfig> {
        let mut est = EstimatorConfig::with_counts(self.m.unwrap_or(500), self.n.unwrap_or(500));
        if self.haar == Some(true) {
            est.measure = InputMeasure::Haar;
        }
        if let Some(t) = self.target_stderr {
            est.adaptive = Some(Adaptive {
                target_stderr: t,
                max_states: self.max_states.unwrap_or(100 * est.n),
            });
        }
        Ok(est)
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        Ok(SweepConfig {
            estimator: self.estimator()?,
            seed: self.seed.unwrap_or(0),
        })
    }

    fn is_two_qubit(&self) -> bool {
        self.two_qubit == Some(true) || self.alpha.is_some() || self.coupling_j.is_some()
    }

    fn need(v: Option<f64>, flag: &str) -> Result<f64> {
        v.ok_or_else(|| Error::InvalidParameter(format!("--{flag} is required here")))
    }

    /// Control point described by this config.
    pub fn resolve_point(&self) -> Result<SweepPoint> {
        let spec = self.noise()?;
        if self.is_two_qubit() {
            self.resolve_two_qubit(spec)
        } else {
            self.resolve_single(spec)
        }
    }

    fn resolve_single(&self, spec: NoiseSpec) -> Result<SweepPoint> {
        let omega0 = Self::need(self.omega0, "omega0")?;
        let branch = self.branch.unwrap_or_default();
        if let Some(beta) = self.beta {
            if self.omega.is_some() {
                return Err(Error::InvalidParameter(
                    "give either --omega or --beta, not both".into(),
                ));
            }
            let line = model::zero_dynamic_omega1(omega0, beta)?;
            let omega1 = match (self.zero_dynamic == Some(true), self.omega1, self.delta) {
                (true, None, None) => line,
                (false, Some(w1), None) => w1,
                (false, None, Some(d)) => line + d,
                (false, None, None) => line,
                _ => {
                    return Err(Error::InvalidParameter(
                        "give at most one of --omega1, --delta, --zero-dynamic".into(),
                    ))
                }
            };
            let omega = model::omega_for_beta(omega0, omega1, beta, branch)?;
            let p = DriveParams::new(omega, omega0, omega1)?;
            return Ok(single_point(p, (omega1 - line) / omega0, spec));
        }
        let omega = Self::need(self.omega, "omega (or --beta)")?;
        let omega1 = Self::need(self.omega1, "omega1")?;
        let p = DriveParams::new(omega, omega0, omega1)?;
        // Offset from the zero-dynamic line of the same total phase, when one exists.
        let beta = -model::phases(&p)?.gamma / std::f64::consts::PI;
        let offset = model::zero_dynamic_omega1(omega0, beta).map_or(f64::NAN, |line| (omega1 - line) / omega0);
        Ok(single_point(p, offset, spec))
    }

    fn resolve_two_qubit(&self, spec: NoiseSpec) -> Result<SweepPoint> {
        let omega0 = Self::need(self.omega0, "omega0")?;
        let mode = self.control_mode.unwrap_or_default();
        if let Some(alpha) = self.alpha {
            if self.omega.is_some() || self.coupling_j.is_some() {
                return Err(Error::InvalidParameter(
                    "--alpha fixes ω and J; drop --omega / --coupling-j".into(),
                ));
            }
            let line = (1.0 + alpha * alpha).sqrt() * omega0;
            let omega1 = match (self.omega1, self.delta) {
                (Some(_), Some(_)) => {
                    return Err(Error::InvalidParameter("give at most one of --omega1, --delta".into()))
                }
                (Some(w1), None) => w1,
                (None, Some(d)) => line + d,
                (None, None) => {
                    model::two_qubit_geometric_point(omega0, alpha)?;
                    line
                }
            };
            let point = sweep::family_point(omega0, omega1, alpha, mode, spec);
            return match &point.gate {
                PointGate::Infeasible { reason } => Err(Error::InvalidParameter(reason.clone())),
                _ => Ok(point),
            };
        }
        let coupling_j = Self::need(self.coupling_j, "alpha (or --coupling-j)")?;
        let omega = Self::need(self.omega, "omega")?;
        let omega1 = Self::need(self.omega1, "omega1")?;
        let target = DriveParams::new(omega, omega0, omega1)?;
        let params = TwoQubitParams {
            target,
            coupling_j,
            alpha: None,
        };
        Ok(SweepPoint {
            omega0,
            omega1,
            delta_over_omega0: f64::NAN,
            alpha: None,
            gate: PointGate::TwoQubit { params, mode },
            spec,
        })
    }
}

fn single_point(p: DriveParams, delta_over_omega0: f64, spec: NoiseSpec) -> SweepPoint {
    SweepPoint {
        omega0: p.omega0,
        omega1: p.omega1,
        delta_over_omega0,
        alpha: None,
        gate: PointGate::Single(p),
        spec,
    }
}

impl PointArgs {
    fn to_config(&self) -> RunConfig {
        let flag = |b: bool| b.then_some(true);
        RunConfig {
            beta: self.beta,
            omega: self.omega,
            omega0: self.omega0,
            omega1: self.omega1,
            delta: self.delta,
            alpha: self.alpha,
            coupling_j: self.coupling_j,
            delta0: self.delta0,
            delta1: self.delta1,
            m: self.m,
            n: self.n,
            seed: self.seed,
            control_mode: self.control_mode,
            branch: self.branch,
            haar: flag(self.haar),
            zero_dynamic: flag(self.zero_dynamic),
            two_qubit: flag(self.two_qubit),
            target_stderr: self.target_stderr,
            max_states: self.max_states,
            workers: self.workers,
            out: self.out.clone(),
            ..Default::default()
        }
    }
}

/// Effective config: file values, overridden by flags, with the seed falling
/// back to `env_seed`.
pub fn effective_config(command: &Command, env_seed: Option<&str>) -> Result<RunConfig> {
    let (name, point, extra) = match command {
        Command::Gate(p) => ("gate", p, RunConfig::default()),
        Command::Fidelity(p) => ("fidelity", p, RunConfig::default()),
        Command::Sweep(s) => (
            "sweep",
            &s.point,
            RunConfig {
                axis: s.axis.map(|a| a.name().to_string()),
                from: s.from,
                to: s.to,
                steps: s.steps,
                ..Default::default()
            },
        ),
        Command::Reproduce(r) => (
            "reproduce",
            &r.point,
            RunConfig {
                figure: Some(r.figure.name().to_string()),
                from: r.from,
                to: r.to,
                steps: r.steps,
                ..Default::default()
            },
        ),
    };
    let file = match &point.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let flags = RunConfig {
        command: Some(name.to_string()),
        ..point.to_config()
    }
    .overlay(extra);
    let mut cfg = file.overlay(flags);
    if cfg.seed.is_none() {
        if let Some(raw) = env_seed {
            cfg.seed = Some(
                raw.trim()
                    .parse()
                    .map_err(|e| Error::Config(format!("{SEED_ENV}=`{raw}` is not a u64: {e}")))?,
            );
        }
    }
    Ok(cfg)
}

/// Parses `args` (including the program name) and runs the command, writing
/// reports to `stdout`.
pub fn run_from_args<I, T>(args: I, stdout: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Config(e.to_string()))?;
    let env_seed = std::env::var(SEED_ENV).ok();
    let cfg = effective_config(&cli.command, env_seed.as_deref())?;
    run(&cfg, stdout)
}

pub fn run(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let out = |e: std::io::Error| Error::io("<stdout>", e);
    let text = with_workers(cfg.workers, || match cfg.command.as_deref() {
        Some("gate") => cmd_gate(cfg),
        Some("fidelity") => cmd_fidelity(cfg),
        Some("sweep") => cmd_sweep(cfg),
        Some("reproduce") => cmd_reproduce(cfg),
        other => Err(Error::Config(format!("unknown command {other:?}"))),
    })?;
    stdout.write_all(text.as_bytes()).map_err(out)
}

fn write_gate<const N: usize>(s: &mut String, name: &str, g: &GateMatrix<N>) {
    for i in 0..N {
        for j in 0..N {
            let z = g[(i, j)];
            let _ = writeln!(s, "{name}[{i}][{j}] = ({}, {})", fmt_num(z.re), fmt_num(z.im));
        }
    }
}

fn write_block(s: &mut String, suffix: &str, p: &DriveParams) -> Result<()> {
    let ph = model::phases(p)?;
    for (k, v) in [
        ("omega1", p.omega1),
        ("Omega", model::big_omega(p)),
        ("chi", model::chi_angle(p)),
        ("gamma", ph.gamma),
        ("gamma_g", ph.gamma_g),
        ("gamma_d", ph.gamma_d),
    ] {
        let _ = writeln!(s, "{k}{suffix} = {}", fmt_num(v));
    }
    Ok(())
}

/// Phases, axis angle and ideal gate entries at the configured point.
pub fn cmd_gate(cfg: &RunConfig) -> Result<String> {
    let point = cfg.resolve_point()?;
    let mut s = String::new();
    match &point.gate {
        PointGate::Single(p) => {
            let _ = writeln!(s, "omega = {}", fmt_num(p.omega));
            let _ = writeln!(s, "omega0 = {}", fmt_num(p.omega0));
            write_block(&mut s, "", p)?;
            write_gate(&mut s, "U", &one_cycle_gate(p)?);
        }
        PointGate::TwoQubit { params, .. } => {
            let _ = writeln!(s, "omega = {}", fmt_num(params.target.omega));
            let _ = writeln!(s, "omega0 = {}", fmt_num(params.target.omega0));
            let _ = writeln!(s, "omega1 = {}", fmt_num(params.target.omega1));
            let _ = writeln!(s, "J = {}", fmt_num(params.coupling_j));
            for bit in ControlBit::BOTH {
                let suffix = if bit == ControlBit::Zero { "_0" } else { "_1" };
                write_block(&mut s, suffix, &model::shifted_target(params, bit))?;
            }
            write_gate(&mut s, "U", &ideal_gate_u2(params)?);
        }
        PointGate::Infeasible { reason } => return Err(Error::InvalidParameter(reason.clone())),
    }
    Ok(s)
}

fn finish(cfg: &RunConfig, res: &SweepResult, csv_name: Option<&str>) -> Result<String> {
    let csv = csv_string(res);
    if let Some(out) = &cfg.out {
        let path = match csv_name {
            Some(name) => out.join(name),
            None => out.clone(),
        };
        write_outputs(&path, res, cfg)?;
    }
    Ok(csv)
}

/// One CSV row plus a `mean ± stderr` summary line.
pub fn cmd_fidelity(cfg: &RunConfig) -> Result<String> {
    let point = cfg.resolve_point()?;
    let res = sweep_generic(std::slice::from_ref(&point), "fidelity", &cfg.sweep_config()?);
    let row = &res.rows[0];
    let est = row
        .estimate
        .ok_or_else(|| Error::InvalidParameter(row.error.clone().unwrap_or_default()))?;
    let mut s = finish(cfg, &res, None)?;
    let _ = writeln!(
        s,
        "F = {:.6} ± {:.6} (n = {}, m = {})",
        est.mean, est.stderr, est.n_states, est.n_shots
    );
    Ok(s)
}

/// Points along `axis` from `from` to `to`, everything else held at the
/// configured values. Points that fail to resolve are kept as infeasible rows.
pub fn sweep_points(cfg: &RunConfig) -> Result<Vec<SweepPoint>> {
    let axis = match cfg.axis.as_deref() {
        None | Some("delta-over-omega0") => Axis::DeltaOverOmega0,
        Some("omega0") => Axis::Omega0,
        Some("omega1") => Axis::Omega1,
        Some(other) => return Err(Error::Config(format!("unknown sweep axis `{other}`"))),
    };
    let from = RunConfig::need(cfg.from, "from")?;
    let to = RunConfig::need(cfg.to, "to")?;
    let spec = cfg.noise()?;
    let mut points = Vec::new();
    for x in linspace(from, to, cfg.steps.unwrap_or(11)) {
        let mut c = RunConfig {
            zero_dynamic: None,
            ..cfg.clone()
        };
        match axis {
            Axis::Omega0 => c.omega0 = Some(x),
            Axis::Omega1 => {
                c.omega1 = Some(x);
                c.delta = None;
            }
            Axis::DeltaOverOmega0 => {
                c.delta = Some(x * RunConfig::need(cfg.omega0, "omega0")?);
                c.omega1 = None;
            }
        }
        points.push(c.resolve_point().unwrap_or_else(|e| SweepPoint {
            omega0: c.omega0.unwrap_or(f64::NAN),
            omega1: c.omega1.unwrap_or(f64::NAN),
            delta_over_omega0: if axis == Axis::DeltaOverOmega0 { x } else { f64::NAN },
            alpha: c.alpha,
            gate: PointGate::Infeasible { reason: e.to_string() },
            spec,
        }));
    }
    Ok(points)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<String> {
    let points = sweep_points(cfg)?;
    let res = sweep_generic(&points, "sweep", &cfg.sweep_config()?);
    finish(cfg, &res, None)
}

/// Preset results after applying overrides from `cfg`.
pub fn reproduce_results(cfg: &RunConfig) -> Result<Vec<SweepResult>> {
    let sc = cfg.sweep_config()?;
    let axis = |default: Vec<f64>| match (cfg.from, cfg.to, cfg.steps) {
        (None, None, None) => default,
        (f, t, s) => linspace(
            f.unwrap_or(default[0]),
            t.unwrap_or(default[default.len() - 1]),
            s.unwrap_or(default.len()),
        ),
    };
    let spec_or = |d: NoiseSpec| -> Result<NoiseSpec> {
        NoiseSpec::new(cfg.delta0.unwrap_or(d.delta0), cfg.delta1.unwrap_or(d.delta1))
    };
    match cfg.figure.as_deref() {
        Some("fig1") => {
            let d = Fig1::default();
            let fig = Fig1 {
                omega0_grid: cfg.omega0.map_or(d.omega0_grid.clone(), |w| vec![w]),
                delta_over_omega0_grid: axis(d.delta_over_omega0_grid.clone()),
                beta: cfg.beta.unwrap_or(d.beta),
                branch: cfg.branch.unwrap_or(d.branch),
                spec: spec_or(d.spec)?,
            };
            Ok(vec![sweep::sweep_fig1(&fig, &sc)])
        }
        Some("fig2") => {
            let d = Fig2::default();
            let fig = Fig2 {
                delta_over_omega0_grid: axis(d.delta_over_omega0_grid.clone()),
                delta1_list: cfg.delta1.map_or(d.delta1_list.clone(), |x| vec![x]),
                omega0: cfg.omega0.unwrap_or(d.omega0),
                beta: cfg.beta.unwrap_or(d.beta),
                branch: cfg.branch.unwrap_or(d.branch),
                delta0: cfg.delta0.unwrap_or(d.delta0),
            };
            Ok(sweep::sweep_fig2(&fig, &sc))
        }
        Some("fig3") => {
            if cfg.from.is_some() || cfg.to.is_some() {
                return Err(Error::Config("fig3 grid is set with --steps only".into()));
            }
            let d = Fig3::with_size(cfg.steps.unwrap_or(31));
            let fig = Fig3 {
                alpha: cfg.alpha.unwrap_or(d.alpha),
                spec: spec_or(d.spec)?,
                mode: cfg.control_mode.unwrap_or(d.mode),
                ..d
            };
            Ok(vec![sweep::sweep_fig3(&fig, &sc)])
        }
        Some("fig4") => {
            let d = Fig4::default();
            let fig = Fig4 {
                omega0_grid: axis(d.omega0_grid.clone()),
                alpha_list: cfg.alpha.map_or(d.alpha_list.clone(), |a| vec![a]),
                omega1: cfg.omega1.unwrap_or(d.omega1),
                spec: spec_or(d.spec)?,
                mode: cfg.control_mode.unwrap_or(d.mode),
            };
            Ok(vec![sweep::sweep_fig4(&fig, &sc)])
        }
        other => Err(Error::Config(format!("unknown figure {other:?}"))),
    }
}

/// Runs a preset and writes `<preset>.csv` and `<preset>.meta` into `out`
/// (default `out/`). Returns a short listing of the files written.
pub fn cmd_reproduce(cfg: &RunConfig) -> Result<String> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut s = String::new();
    for res in reproduce_results(cfg)? {
        let path = dir.join(format!("{}.csv", res.preset));
        write_outputs(&path, &res, cfg)?;
        let feasible = res.rows.iter().filter(|r| r.feasible()).count();
        let _ = writeln!(s, "{}: {} rows ({} feasible)", path.display(), res.rows.len(), feasible);
    }
    Ok(s)
}

const SINGLE_COLUMNS: [&str; 14] = [
    "omega0",
    "delta_over_omega0",
    "omega1",
    "omega",
    "feasible",
    "F_mean",
    "F_stderr",
    "gamma",
    "gamma_g",
    "gamma_d",
    "chi",
    "m",
    "n",
    "seed",
];

const TWO_QUBIT_COLUMNS: [&str; 7] = ["alpha", "J", "gamma_d_0", "gamma_d_1", "chi_0", "chi_1", "control_mode"];

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// CSV text of a sweep. Infeasible rows keep their coordinates and leave the
/// estimate and phase columns empty.
pub fn csv_string(res: &SweepResult) -> String {
    let mut header: Vec<&str> = SINGLE_COLUMNS.to_vec();
    if res.two_qubit {
        header.extend(TWO_QUBIT_COLUMNS);
    }
    let mut s = header.join(",");
    s.push('\n');
    for r in &res.rows {
        let p = &r.point;
        let b0 = r.blocks.first();
        let mut cells = vec![
            fmt_num(p.omega0),
            fmt_num(p.delta_over_omega0),
            fmt_num(p.omega1),
            opt(r.omega()),
            u8::from(r.feasible()).to_string(),
            opt(r.estimate.map(|e| e.mean)),
            opt(r.estimate.map(|e| e.stderr)),
            opt(b0.map(|b| b.phases.gamma)),
            opt(b0.map(|b| b.phases.gamma_g)),
            opt(b0.map(|b| b.phases.gamma_d)),
            opt(b0.map(|b| b.chi)),
            res.m.to_string(),
            res.n.to_string(),
            res.seed.to_string(),
        ];
        if res.two_qubit {
            let (j, mode) = match &p.gate {
                PointGate::TwoQubit { params, mode } => (Some(params.coupling_j), mode.name()),
                _ => (None, ""),
            };
            let b1 = r.blocks.get(1);
            cells.extend([
                opt(p.alpha),
                opt(j),
                opt(b0.map(|b| b.phases.gamma_d)),
                opt(b1.map(|b| b.phases.gamma_d)),
                opt(b0.map(|b| b.chi)),
                opt(b1.map(|b| b.chi)),
                mode.to_string(),
            ]);
        }
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Sidecar text: the run's settings (minus worker count and output path)
/// followed by the sweep's provenance under [`META_PREFIX`].
pub fn metadata_string(res: &SweepResult, cfg: &RunConfig) -> String {
    let mut s = String::new();
    for (k, v) in cfg.entries(false) {
        let _ = writeln!(s, "{k}={v}");
    }
    for (k, v) in &res.meta {
        let _ = writeln!(s, "{META_PREFIX}{k}={v}");
    }
    s
}

pub fn metadata_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta")
}

/// Writes `csv` and its `.meta` sidecar.
pub fn write_outputs(csv: &Path, res: &SweepResult, cfg: &RunConfig) -> Result<()> {
    if let Some(parent) = csv.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(csv, csv_string(res)).map_err(|e| Error::io(csv, e))?;
    let meta = metadata_path(csv);
    std::fs::write(&meta, metadata_string(res, cfg)).map_err(|e| Error::io(&meta, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg_from(args: &[&str]) -> RunConfig {
        let cli = Cli::try_parse_from(std::iter::once("geogate").chain(args.iter().copied())).unwrap();
        effective_config(&cli.command, None).unwrap()
    }

    #[test]
    fn gate_on_zero_dynamic_line() {
        let out = cmd_gate(&cfg_from(&[
            "gate",
            "--beta",
            "1.5",
            "--omega0",
            "1e5",
            "--zero-dynamic",
        ]))
        .unwrap();
        let get = |k: &str| -> f64 {
            out.lines()
                .find_map(|l| l.strip_prefix(&format!("{k} = ")))
                .unwrap()
                .parse()
                .unwrap()
        };
        assert!(get("gamma_d").abs() <= 1e-9);
        assert!((get("omega1") - 3f64.sqrt() * 1e5).abs() <= 1e-6);
    }

    #[test]
    fn gate_below_line_names_constraint() {
        let err = cmd_gate(&cfg_from(&[
            "gate", "--beta", "1.5", "--omega0", "1e5", "--omega1", "1e5",
        ]))
        .unwrap_err();
        assert!(err.to_string().contains("reality constraint ηω0² ≤ (1−η)ω1²"), "{err}");
    }

    #[test]
    fn two_qubit_gate_report() {
        let out = cmd_gate(&cfg_from(&[
            "gate",
            "--two-qubit",
            "--alpha",
            "1.7320508",
            "--omega0",
            "30",
        ]))
        .unwrap();
        let get = |k: &str| -> f64 {
            out.lines()
                .find_map(|l| l.strip_prefix(&format!("{k} = ")))
                .unwrap()
                .parse()
                .unwrap()
        };
        assert!((get("omega1") - 60.0).abs() < 1e-5);
        assert!((get("omega") - 120.0).abs() < 1e-5);
        assert!((get("J") - 51.96).abs() < 1e-2);
    }

    #[test]
    fn noiseless_fidelity_summary() {
        let out = cmd_fidelity(&cfg_from(&[
            "fidelity", "--beta", "1.5", "--omega0", "1e5", "--delta", "2e4", "--m", "5", "--n", "5",
        ]))
        .unwrap();
        assert!(out.contains("F = 1.000000 ± 0.000000"), "{out}");
        assert_eq!(out.lines().count(), 3);
    }

    #[test]
    fn flags_override_file_and_env_is_last() {
        let file = RunConfig::parse("seed = 9\nm=10 # comment\n# all comment\n\nomega0=2\n").unwrap();
        assert_eq!(file.seed, Some(9));
        let merged = file.clone().overlay(RunConfig {
            m: Some(3),
            ..Default::default()
        });
        assert_eq!((merged.m, merged.seed, merged.omega0), (Some(3), Some(9), Some(2.0)));

        let cli = Cli::try_parse_from(["geogate", "gate", "--omega0", "1"]).unwrap();
        assert_eq!(effective_config(&cli.command, Some("17")).unwrap().seed, Some(17));
        let cli = Cli::try_parse_from(["geogate", "gate", "--seed", "4"]).unwrap();
        assert_eq!(effective_config(&cli.command, Some("17")).unwrap().seed, Some(4));
    }

    #[test]
    fn config_errors_carry_line_numbers() {
        let e = RunConfig::parse("m=3\nbogus=1\n").unwrap_err();
        assert!(e.to_string().contains("line 2"));
        let e = RunConfig::parse("m=x\n").unwrap_err();
        assert!(e.to_string().contains("`m`"));
        assert!(RunConfig::parse("just words\n").is_err());
    }

    #[test]
    fn csv_marks_infeasible_rows() {
        let cfg = cfg_from(&[
            "sweep", "--beta", "1.5", "--omega0", "1", "--from", "-1", "--to", "1", "--steps", "3", "--m", "2", "--n",
            "2", "--delta0", "0.1", "--delta1", "0.1",
        ]);
        let csv = cmd_sweep(&cfg).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SINGLE_COLUMNS.join(","));
        assert_eq!(lines.len(), 4);
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first[4], "0");
        assert_eq!(first[5], "");
        let last: Vec<&str> = lines[3].split(',').collect();
        assert_eq!(last[4], "1");
        assert!(last[5].contains('e'));
    }

    fn arb_f64() -> impl Strategy<Value = Option<f64>> {
        prop_oneof![
            Just(None),
            any::<f64>().prop_filter("finite", |x| x.is_finite()).prop_map(Some)
        ]
    }

    proptest! {
        #[test]
        fn config_round_trips(
            beta in arb_f64(), omega0 in arb_f64(), delta in arb_f64(), alpha in arb_f64(),
            m in proptest::option::of(1usize..1_000_000), seed in proptest::option::of(any::<u64>()),
            haar in proptest::option::of(any::<bool>()),
            mode in proptest::option::of(prop_oneof![
                Just(ControlMode::Fixed0), Just(ControlMode::Fixed1), Just(ControlMode::Unfixed)
            ]),
            branch in proptest::option::of(prop_oneof![Just(Branch::Plus), Just(Branch::Minus)]),
            workers in proptest::option::of(1usize..64),
        ) {
            let c = RunConfig {
                command: Some("fidelity".into()), beta, omega0, delta, alpha, m, seed, haar,
                control_mode: mode, branch, workers, out: Some(PathBuf::from("a/b.csv")),
                ..Default::default()
            };
            let back = RunConfig::parse(&c.to_config_string()).unwrap();
            prop_assert_eq!(&back, &c);
            for (a, b) in [(back.beta, c.beta), (back.omega0, c.omega0), (back.delta, c.delta)] {
                prop_assert_eq!(a.map(f64::to_bits), b.map(f64::to_bits));
            }
        }
    }
}
