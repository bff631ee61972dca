//! Grid scans over control parameters, with presets for the four standard
//! scans (single-qubit fidelity vs. offset from the zero-dynamic line, its
//! noise dependence, and the two two-qubit scans).
//!
//! Every point draws from its own random stream keyed by the preset name and
//! the point's parameters, so a row's values do not depend on where the point
//! sits in the grid, on the grid's shape, or on the number of workers.

use crate::error::Result;
use crate::exec::Executor;
use crate::fidelity::{estimate_single, estimate_two_qubit, ControlMode, EstimatorConfig, FidelityEstimate};
use crate::model::{self, Branch, ControlBit, DriveParams, PhaseTriple, TwoQubitParams};
use crate::noise::{path_key, tag, NoiseSpec, RngStream};

/// What a grid point evaluates.
#[derive(Clone, Debug, PartialEq)]
pub enum PointGate {
    Single(DriveParams),
    TwoQubit {
        params: TwoQubitParams,
        mode: ControlMode,
    },
    /// Parameters violate a model precondition; recorded, never estimated.
    Infeasible {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub omega0: f64,
    pub omega1: f64,
    /// Offset of `omega1` from the zero-dynamic line, in units of `omega0`.
    pub delta_over_omega0: f64,
    /// Two-qubit family generator; `None` for single-qubit points.
    pub alpha: Option<f64>,
    pub gate: PointGate,
    pub spec: NoiseSpec,
}

/// Nominal (noise-free) phases and axis angle of one target block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockPhases {
    pub phases: PhaseTriple,
    pub chi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub estimate: Option<FidelityEstimate>,
    /// One entry for single-qubit points, blocks `δ = 0, 1` for two-qubit.
    pub blocks: Vec<BlockPhases>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn feasible(&self) -> bool {
        self.estimate.is_some()
    }

    pub fn omega(&self) -> Option<f64> {
        match &self.point.gate {
            PointGate::Single(p) => Some(p.omega),
            PointGate::TwoQubit { params, .. } => Some(params.target.omega),
            PointGate::Infeasible { .. } => None,
        }
    }

    pub fn mean(&self) -> f64 {
        self.estimate.map_or(f64::NAN, |e| e.mean)
    }

    pub fn stderr(&self) -> f64 {
        self.estimate.map_or(f64::NAN, |e| e.stderr)
    }

    pub fn gamma_d(&self, block: usize) -> Option<f64> {
        self.blocks.get(block).map(|b| b.phases.gamma_d)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub preset: String,
    pub two_qubit: bool,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub rows: Vec<SweepRow>,
    /// Ordered `key=value` provenance entries.
    pub meta: Vec<(String, String)>,
}

impl SweepResult {
    /// Index of the feasible row with the largest mean fidelity.
    pub fn argmax(&self) -> Option<usize> {
        argmax_rows(&self.rows, |_| true)
    }

    /// Rows whose `alpha` equals `alpha` (bitwise), in order.
    pub fn curve_for_alpha(&self, alpha: f64) -> Vec<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.point.alpha.map(f64::to_bits) == Some(alpha.to_bits()))
            .collect()
    }
}

/// Largest-mean feasible row among those accepted by `keep`; ties go to the
/// earliest row.
pub fn argmax_rows(rows: &[SweepRow], keep: impl Fn(&SweepRow) -> bool) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, r) in rows.iter().enumerate() {
        if let (true, Some(e)) = (keep(r), r.estimate) {
            if best.is_none_or(|(_, m)| e.mean > m) {
                best = Some((i, e.mean));
            }
        }
    }
    best.map(|(i, _)| i)
}

/// Seed, counts and executor shared by every point of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepConfig {
    pub estimator: EstimatorConfig,
    pub seed: u64,
}

impl SweepConfig {
    pub fn new(m: usize, n: usize, seed: u64) -> Self {
        SweepConfig {
            estimator: EstimatorConfig::with_counts(m, n),
            seed,
        }
    }
}

fn point_stream(seed: u64, experiment: &str, point: &SweepPoint) -> RngStream {
    let mut parts = vec![
        point.omega0.to_bits(),
        point.omega1.to_bits(),
        point.spec.delta0.to_bits(),
        point.spec.delta1.to_bits(),
    ];
    match &point.gate {
        PointGate::Single(p) => parts.extend([0, p.omega.to_bits()]),
        PointGate::TwoQubit { params, mode } => parts.extend([
            1,
            params.target.omega.to_bits(),
            params.coupling_j.to_bits(),
            tag(mode.name()),
        ]),
        PointGate::Infeasible { .. } => parts.push(2),
    }
    RngStream::new(seed)
        .with_experiment(tag(experiment))
        .with_point(path_key(&parts))
}

fn block_phases(p: &DriveParams) -> Result<BlockPhases> {
    Ok(BlockPhases {
        phases: model::phases(p)?,
        chi: model::chi_angle(p),
    })
}

fn evaluate(point: &SweepPoint, experiment: &str, cfg: &SweepConfig) -> SweepRow {
    let stream = point_stream(cfg.seed, experiment, point);
    let outcome: Result<(FidelityEstimate, Vec<BlockPhases>)> = match &point.gate {
        PointGate::Single(p) => {
            block_phases(p).and_then(|b| Ok((estimate_single(p, &point.spec, &cfg.estimator, stream)?, vec![b])))
        }
        PointGate::TwoQubit { params, mode } => ControlBit::BOTH
            .iter()
            .map(|&bit| block_phases(&model::shifted_target(params, bit)))
            .collect::<Result<Vec<_>>>()
            .and_then(|b| {
                Ok((
                    estimate_two_qubit(params, &point.spec, &cfg.estimator, stream, *mode)?,
                    b,
                ))
            }),
        PointGate::Infeasible { reason } => {
            return SweepRow {
                point: point.clone(),
                estimate: None,
                blocks: vec![],
                error: Some(reason.clone()),
            }
        }
    };
    match outcome {
        Ok((est, blocks)) => SweepRow {
            point: point.clone(),
            estimate: Some(est),
            blocks,
            error: None,
        },
        Err(e) => SweepRow {
            point: point.clone(),
            estimate: None,
            blocks: vec![],
            error: Some(e.to_string()),
        },
    }
}

/// Evaluates every point under `experiment`'s random streams. Rows come back in
/// point order.
pub fn sweep_generic(points: &[SweepPoint], experiment: &str, cfg: &SweepConfig) -> SweepResult {
    let rows = cfg
        .estimator
        .executor
        .map(points.len(), |i| evaluate(&points[i], experiment, cfg));
    let two_qubit = points.iter().any(|p| p.alpha.is_some());
    let mut meta = vec![
        ("preset".to_string(), experiment.to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("seed".to_string(), cfg.seed.to_string()),
        ("m".to_string(), cfg.estimator.m.to_string()),
        ("n".to_string(), cfg.estimator.n.to_string()),
        ("input_measure".to_string(), cfg.estimator.measure.name().to_string()),
    ];
    if let Some(ad) = cfg.estimator.adaptive {
        meta.push(("target_stderr".to_string(), fmt_num(ad.target_stderr)));
        meta.push(("max_states".to_string(), ad.max_states.to_string()));
    }
    SweepResult {
        preset: experiment.to_string(),
        two_qubit,
        seed: cfg.seed,
        m: cfg.estimator.m,
        n: cfg.estimator.n,
        rows,
        meta,
    }
}

/// Number format used in every output file: scientific, 15 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(",")
}

/// `steps` evenly spaced values from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![start],
        _ => (0..steps)
            .map(|i| {
                if i == steps - 1 {
                    end
                } else {
                    start + (end - start) * i as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}

/// Single-qubit point on the fixed-total-phase family.
pub fn beta_point(omega0: f64, delta_over_omega0: f64, beta: f64, branch: Branch, spec: NoiseSpec) -> SweepPoint {
    let line = model::zero_dynamic_omega1(omega0, beta);
    let omega1 = line.as_ref().map_or(f64::NAN, |w1| w1 + delta_over_omega0 * omega0);
    let gate = match line.and_then(|_| model::beta_family_point(omega0, delta_over_omega0 * omega0, beta, branch)) {
        Ok(p) => PointGate::Single(p),
        Err(e) => PointGate::Infeasible { reason: e.to_string() },
    };
    SweepPoint {
        omega0,
        omega1,
        delta_over_omega0,
        alpha: None,
        gate,
        spec,
    }
}

/// Two-qubit point of the `J = αω0`, `ω = ω1 + √(1+α²)ω0` family.
pub fn family_point(omega0: f64, omega1: f64, alpha: f64, mode: ControlMode, spec: NoiseSpec) -> SweepPoint {
    let line = (1.0 + alpha * alpha).sqrt() * omega0;
    let gate = match model::two_qubit_family(omega0, omega1, alpha) {
        Ok(params) => PointGate::TwoQubit { params, mode },
        Err(e) => PointGate::Infeasible { reason: e.to_string() },
    };
    SweepPoint {
        omega0,
        omega1,
        delta_over_omega0: (omega1 - line) / omega0,
        alpha: Some(alpha),
        gate,
        spec,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig1 {
    pub omega0_grid: Vec<f64>,
    pub delta_over_omega0_grid: Vec<f64>,
    pub beta: f64,
    pub branch: Branch,
    pub spec: NoiseSpec,
}

impl Default for Fig1 {
    fn default() -> Self {
        Fig1 {
            omega0_grid: (1..=8).map(|k| 0.25e5 * k as f64).collect(),
            delta_over_omega0_grid: linspace(0.0, 4.0, 41),
            beta: 1.5,
            branch: Branch::Minus,
            spec: NoiseSpec {
                delta0: 0.1,
                delta1: 0.1,
            },
        }
    }
}

/// Fidelity over `(ω0, Δ)` at fixed total phase `−βπ`.
pub fn sweep_fig1(fig: &Fig1, cfg: &SweepConfig) -> SweepResult {
    let points: Vec<SweepPoint> = fig
        .omega0_grid
        .iter()
        .flat_map(|&w0| {
            fig.delta_over_omega0_grid
                .iter()
                .map(move |&r| beta_point(w0, r, fig.beta, fig.branch, fig.spec))
        })
        .collect();
    let mut res = sweep_generic(&points, "fig1", cfg);
    res.meta.extend([
        ("beta".to_string(), fmt_num(fig.beta)),
        ("branch".to_string(), fig.branch.to_string()),
        ("delta0".to_string(), fmt_num(fig.spec.delta0)),
        ("delta1".to_string(), fmt_num(fig.spec.delta1)),
        ("omega0_grid".to_string(), fmt_list(&fig.omega0_grid)),
        (
            "delta_over_omega0_grid".to_string(),
            fmt_list(&fig.delta_over_omega0_grid),
        ),
    ]);
    res
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig2 {
    pub delta_over_omega0_grid: Vec<f64>,
    pub delta1_list: Vec<f64>,
    pub omega0: f64,
    pub beta: f64,
    pub branch: Branch,
    pub delta0: f64,
}

impl Default for Fig2 {
    fn default() -> Self {
        Fig2 {
            delta_over_omega0_grid: linspace(0.0, 5.0, 51),
            delta1_list: vec![0.01, 0.02, 0.04, 0.06, 0.1],
            omega0: 1e5,
            beta: 1.5,
            branch: Branch::Minus,
            delta0: 0.1,
        }
    }
}

/// One fidelity curve over `Δ` per `δ1`, at fixed `ω0` and `δ0`.
pub fn sweep_fig2(fig: &Fig2, cfg: &SweepConfig) -> Vec<SweepResult> {
    fig.delta1_list
        .iter()
        .map(|&d1| {
            let spec = NoiseSpec {
                delta0: fig.delta0,
                delta1: d1,
            };
            let points: Vec<SweepPoint> = fig
                .delta_over_omega0_grid
                .iter()
                .map(|&r| beta_point(fig.omega0, r, fig.beta, fig.branch, spec))
                .collect();
            let mut res = sweep_generic(&points, "fig2", cfg);
            res.preset = format!("fig2_delta1_{d1}");
            res.meta.extend([
                ("curve".to_string(), res.preset.clone()),
                ("beta".to_string(), fmt_num(fig.beta)),
                ("branch".to_string(), fig.branch.to_string()),
                ("omega0".to_string(), fmt_num(fig.omega0)),
                ("delta0".to_string(), fmt_num(fig.delta0)),
                ("delta1".to_string(), fmt_num(d1)),
                (
                    "delta_over_omega0_grid".to_string(),
                    fmt_list(&fig.delta_over_omega0_grid),
                ),
            ]);
            res
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig3 {
    pub log_omega0_grid: Vec<f64>,
    pub log_omega1_grid: Vec<f64>,
    pub alpha: f64,
    pub spec: NoiseSpec,
    pub mode: ControlMode,
}

impl Fig3 {
    /// `ω0` over one decade from 10 to 100 and `ω1` over two decades centred
    /// on the zero-dynamic line `ω1 = √(1+α²)ω0`, `size` points per axis.
    pub fn with_size(size: usize) -> Self {
        let alpha = 3f64.sqrt();
        let shift = (1.0 + alpha * alpha).sqrt().log10();
        Fig3 {
            log_omega0_grid: linspace(1.0, 2.0, size),
            log_omega1_grid: linspace(0.5 + shift, 2.5 + shift, size),
            alpha,
            spec: NoiseSpec {
                delta0: 0.1,
                delta1: 0.1,
            },
            mode: ControlMode::Fixed0,
        }
    }
}

impl Default for Fig3 {
    fn default() -> Self {
        Fig3::with_size(31)
    }
}

/// Two-qubit fidelity over a log-spaced `(ω0, ω1)` grid.
pub fn sweep_fig3(fig: &Fig3, cfg: &SweepConfig) -> SweepResult {
    let points: Vec<SweepPoint> = fig
        .log_omega0_grid
        .iter()
        .flat_map(|&l0| {
            fig.log_omega1_grid
                .iter()
                .map(move |&l1| family_point(10f64.powf(l0), 10f64.powf(l1), fig.alpha, fig.mode, fig.spec))
        })
        .collect();
    let mut res = sweep_generic(&points, "fig3", cfg);
    res.meta.extend([
        ("alpha".to_string(), fmt_num(fig.alpha)),
        ("control_mode".to_string(), fig.mode.name().to_string()),
        ("delta0".to_string(), fmt_num(fig.spec.delta0)),
        ("delta1".to_string(), fmt_num(fig.spec.delta1)),
        ("log_omega0_grid".to_string(), fmt_list(&fig.log_omega0_grid)),
        ("log_omega1_grid".to_string(), fmt_list(&fig.log_omega1_grid)),
    ]);
    res
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig4 {
    pub omega0_grid: Vec<f64>,
    pub alpha_list: Vec<f64>,
    pub omega1: f64,
    pub spec: NoiseSpec,
    pub mode: ControlMode,
}

impl Default for Fig4 {
    fn default() -> Self {
        Fig4 {
            omega0_grid: linspace(2.0, 40.0, 39),
            alpha_list: [3.0f64, 8.0, 15.0, 35.0, 143.0].iter().map(|a| a.sqrt()).collect(),
            omega1: 60.0,
            spec: NoiseSpec {
                delta0: 0.05,
                delta1: 0.05,
            },
            mode: ControlMode::Unfixed,
        }
    }
}

/// One two-qubit fidelity curve over `ω0` per `α`, at fixed `ω1`.
pub fn sweep_fig4(fig: &Fig4, cfg: &SweepConfig) -> SweepResult {
    let points: Vec<SweepPoint> = fig
        .alpha_list
        .iter()
        .flat_map(|&a| {
            fig.omega0_grid
                .iter()
                .map(move |&w0| family_point(w0, fig.omega1, a, fig.mode, fig.spec))
        })
        .collect();
    let mut res = sweep_generic(&points, "fig4", cfg);
    res.meta.extend([
        ("omega1".to_string(), fmt_num(fig.omega1)),
        ("control_mode".to_string(), fig.mode.name().to_string()),
        ("delta0".to_string(), fmt_num(fig.spec.delta0)),
        ("delta1".to_string(), fmt_num(fig.spec.delta1)),
        ("alpha_list".to_string(), fmt_list(&fig.alpha_list)),
        ("omega0_grid".to_string(), fmt_list(&fig.omega0_grid)),
    ]);
    res
}

/// Copy of `cfg` whose point- and state-level work runs on `executor`.
pub fn with_executor(cfg: &SweepConfig, executor: Executor) -> SweepConfig {
    let mut c = *cfg;
    c.estimator.executor = executor;
    c
}
