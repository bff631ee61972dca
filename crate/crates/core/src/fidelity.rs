//! Monte Carlo average gate fidelity under quasi-static field noise.
//!
//! For each of `n` random input states the squared overlap between the ideal
//! and the noisy output is averaged over `m` noise configurations; the
//! estimate is the mean of those per-state averages, with the standard error
//! taken over them.

use crate::error::{Error, Result};
use crate::evolve::{ideal_gate_u2, one_cycle_gate, one_cycle_gate_unchecked};
use crate::exec::{pairwise_sum, Executor};
use crate::model::{ControlBit, DriveParams, TwoQubitParams};
use crate::noise::{sample_input_state, sample_two_qubit_input, InputMeasure, NoiseSpec, RngStream};
use crate::qmath::{block_diag, mat_adjoint, mat_apply, overlap, GateMatrix, Qubit, StateVec, TwoQubit};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_states: usize,
    pub n_shots: usize,
    pub seed: u64,
}

/// Which control-qubit inputs a two-qubit estimate samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ControlMode {
    /// Control fixed in `|0>`.
    Fixed0,
    /// Control fixed in `|1>`.
    Fixed1,
    /// Control drawn like the target.
    #[default]
    Unfixed,
}

impl ControlMode {
    pub fn name(self) -> &'static str {
        match self {
            ControlMode::Fixed0 => "fixed0",
            ControlMode::Fixed1 => "fixed1",
            ControlMode::Unfixed => "unfixed",
        }
    }
}

impl std::str::FromStr for ControlMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed0" => Ok(ControlMode::Fixed0),
            "fixed1" => Ok(ControlMode::Fixed1),
            "unfixed" => Ok(ControlMode::Unfixed),
            other => Err(Error::InvalidParameter(format!("unknown control mode `{other}`"))),
        }
    }
}

/// Stop adding input states once the standard error is below `target_stderr`
/// or `max_states` have been used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Adaptive {
    pub target_stderr: f64,
    pub max_states: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorConfig {
    /// Noise configurations per input state.
    pub m: usize,
    /// Input states (batch size when adaptive).
    pub n: usize,
    pub measure: InputMeasure,
    pub executor: Executor,
    pub adaptive: Option<Adaptive>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            m: 500,
            n: 500,
            measure: InputMeasure::UniformTheta,
            executor: Executor::Parallel,
            adaptive: None,
        }
    }
}

impl EstimatorConfig {
    pub fn with_counts(m: usize, n: usize) -> Self {
        EstimatorConfig {
            m,
            n,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidParameter(format!(
                "need m >= 1 and n >= 1 (got m = {}, n = {})",
                self.m, self.n
            )));
        }
        Ok(())
    }
}

/// `|<ψ_in| U_ideal† U_noisy |ψ_in>|²`
pub fn shot_fidelity<const N: usize>(psi_in: &StateVec<N>, u_ideal: &GateMatrix<N>, u_noisy: &GateMatrix<N>) -> f64 {
    let out = mat_apply(u_noisy, psi_in);
    let back = mat_apply(&mat_adjoint(u_ideal), &out);
    overlap(psi_in, &back).norm_sqr().min(1.0)
}

/// Same quantity as [`shot_fidelity`] with the ideal image `U_ideal|ψ_in>`
/// precomputed once per input state.
#[inline]
fn image_fidelity<const N: usize>(ideal_image: &StateVec<N>, u_noisy: &GateMatrix<N>, psi_in: &StateVec<N>) -> f64 {
    overlap(ideal_image, &mat_apply(u_noisy, psi_in)).norm_sqr().min(1.0)
}

fn summarize(per_state: &[f64], m: usize, seed: u64) -> FidelityEstimate {
    let n = per_state.len();
    let mean = pairwise_sum(per_state) / n as f64;
    let stderr = if n > 1 {
        let dev: Vec<f64> = per_state.iter().map(|x| (x - mean) * (x - mean)).collect();
        (pairwise_sum(&dev) / (n - 1) as f64 / n as f64).sqrt()
    } else {
        0.0
    };
    FidelityEstimate {
        mean: mean.clamp(0.0, 1.0),
        stderr,
        n_states: n,
        n_shots: m,
        seed,
    }
}

/// Runs `per_state(j)` for `j` in `0..n` (or in growing batches when adaptive).
fn run_states<F>(cfg: &EstimatorConfig, seed: u64, per_state: F) -> Result<FidelityEstimate>
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    cfg.validate()?;
    let mut means = cfg.executor.map(cfg.n, |j| per_state(j as u64));
    if let Some(ad) = cfg.adaptive {
        let mut est = summarize(&means, cfg.m, seed);
        while est.stderr >= ad.target_stderr && means.len() < ad.max_states {
            let start = means.len();
            let batch = cfg.n.min(ad.max_states - start);
            means.extend(cfg.executor.map(batch, |j| per_state((start + j) as u64)));
            est = summarize(&means, cfg.m, seed);
        }
    }
    Ok(summarize(&means, cfg.m, seed))
}

/// Average fidelity of the one-cycle gate at `p` when `ω0` and `ω1` fluctuate
/// per `spec` (`ω` is held at its nominal value).
pub fn estimate_single(
    p: &DriveParams,
    spec: &NoiseSpec,
    cfg: &EstimatorConfig,
    stream: RngStream,
) -> Result<FidelityEstimate> {
    let ideal = one_cycle_gate(p)?;
    let (spec, m, measure) = (*spec, cfg.m, cfg.measure);
    run_states(cfg, stream.seed, |j| {
        let psi: Qubit = sample_input_state(&mut stream.state_rng(j), measure);
        let image = mat_apply(&ideal, &psi);
        let mut shots = stream.shots_rng(j);
        let mut acc = 0.0;
        for _ in 0..m {
            let q = spec.perturb(p, &mut shots);
            acc += image_fidelity(&image, &one_cycle_gate_unchecked(&q), &psi);
        }
        acc / m as f64
    })
}

#[inline]
fn conditional_gate(target: &DriveParams, coupling_j: f64) -> crate::qmath::Gate4 {
    let shifted = |bit: ControlBit| DriveParams {
        omega1: target.omega1 + bit.sign() * coupling_j,
        ..*target
    };
    block_diag(
        &one_cycle_gate_unchecked(&shifted(ControlBit::Zero)),
        &one_cycle_gate_unchecked(&shifted(ControlBit::One)),
    )
}

/// Average fidelity of the conditional gate. Both target blocks see the same
/// fluctuated `(ω0', ω1')`; the coupling `J` is not perturbed.
pub fn estimate_two_qubit(
    p2: &TwoQubitParams,
    spec: &NoiseSpec,
    cfg: &EstimatorConfig,
    stream: RngStream,
    mode: ControlMode,
) -> Result<FidelityEstimate> {
    let ideal = ideal_gate_u2(p2)?;
    let (spec, m, measure) = (*spec, cfg.m, cfg.measure);
    let target = p2.target;
    let j_coupling = p2.coupling_j;
    run_states(cfg, stream.seed, |j| {
        let mut rng = stream.state_rng(j);
        let psi: TwoQubit = match mode {
            ControlMode::Unfixed => sample_two_qubit_input(&mut rng, measure),
            ControlMode::Fixed0 => Qubit::basis(0).kron(&sample_input_state(&mut rng, measure)),
            ControlMode::Fixed1 => Qubit::basis(1).kron(&sample_input_state(&mut rng, measure)),
        };
        let image = mat_apply(&ideal, &psi);
        let mut shots = stream.shots_rng(j);
        let mut acc = 0.0;
        for _ in 0..m {
            let q = spec.perturb(&target, &mut shots);
            acc += image_fidelity(&image, &conditional_gate(&q, j_coupling), &psi);
        }
        acc / m as f64
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::{ideal_gate_u1, on_target};
    use crate::model::{beta_family_point, two_qubit_geometric_point, Branch};
    use crate::noise::tag;
    use crate::qmath::{sigma_x, Gate2};
    use num_complex::Complex64 as C64;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    fn cfg(m: usize, n: usize) -> EstimatorConfig {
        EstimatorConfig::with_counts(m, n)
    }

    #[test]
    fn shot_fidelity_examples() {
        let u = ideal_gate_u1(0.7, 1.1);
        let psi = Qubit::basis(0);
        assert!((shot_fidelity(&psi, &u, &u) - 1.0).abs() <= 1e-12);
        let shifted = u.scale(C64::from_polar(1.0, 0.37));
        assert!((shot_fidelity(&psi, &u, &shifted) - 1.0).abs() <= 1e-12);
        assert_eq!(shot_fidelity(&psi, &Gate2::identity(), &sigma_x()), 0.0);
    }

    #[test]
    fn noiseless_estimates_are_one() {
        let p = beta_family_point(1e5, 0.7e5, 1.5, Branch::Minus).unwrap();
        for (m, n, seed) in [(1, 1, 0), (7, 3, 5), (50, 40, 123)] {
            let e = estimate_single(&p, &NoiseSpec::NOISELESS, &cfg(m, n), RngStream::new(seed)).unwrap();
            assert!((e.mean - 1.0).abs() <= 1e-12, "{e:?}");
            assert!(e.stderr <= 1e-12);
            let g = two_qubit_geometric_point(30.0, SQRT3).unwrap();
            for mode in [ControlMode::Fixed0, ControlMode::Fixed1, ControlMode::Unfixed] {
                let e = estimate_two_qubit(&g, &NoiseSpec::NOISELESS, &cfg(m, n), RngStream::new(seed), mode).unwrap();
                assert!((e.mean - 1.0).abs() <= 1e-12, "{mode:?} {e:?}");
            }
        }
    }

    #[test]
    fn rejects_empty_sample_counts() {
        let p = DriveParams {
            omega: 1.0,
            omega0: 1.0,
            omega1: 1.0,
        };
        assert!(estimate_single(&p, &NoiseSpec::NOISELESS, &cfg(0, 5), RngStream::new(0)).is_err());
        assert!(estimate_single(&p, &NoiseSpec::NOISELESS, &cfg(5, 0), RngStream::new(0)).is_err());
        let bad = DriveParams { omega: 0.0, ..p };
        assert!(estimate_single(&bad, &NoiseSpec::NOISELESS, &cfg(5, 5), RngStream::new(0)).is_err());
    }

    #[test]
    fn executors_agree_bitwise() {
        let p = beta_family_point(1.0, 0.5, 1.5, Branch::Minus).unwrap();
        let spec = NoiseSpec::new(0.1, 0.1).unwrap();
        let stream = RngStream::new(3).with_experiment(tag("exec"));
        let mut c = cfg(40, 60);
        c.executor = Executor::Sequential;
        let a = estimate_single(&p, &spec, &c, stream).unwrap();
        c.executor = Executor::Parallel;
        let b = crate::exec::with_workers(Some(3), || estimate_single(&p, &spec, &c, stream).unwrap());
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn loop_order_exchange_is_bit_identical() {
        let p = beta_family_point(1.0, 0.3, 1.5, Branch::Minus).unwrap();
        let spec = NoiseSpec::new(0.1, 0.05).unwrap();
        let stream = RngStream::new(11);
        let (m, n) = (25, 30);
        let est = estimate_single(&p, &spec, &cfg(m, n), stream).unwrap();

        // noise-outer: every shot regenerated by seeking its own position
        let ideal = one_cycle_gate(&p).unwrap();
        let psis: Vec<Qubit> = (0..n as u64)
            .map(|j| sample_input_state(&mut stream.state_rng(j), InputMeasure::UniformTheta))
            .collect();
        let images: Vec<Qubit> = psis.iter().map(|psi| mat_apply(&ideal, psi)).collect();
        let mut sums = vec![0.0; n];
        for k in 0..m as u64 {
            for j in 0..n {
                let q = spec.perturb(&p, &mut stream.shot_rng(j as u64, k));
                sums[j] += image_fidelity(&images[j], &one_cycle_gate_unchecked(&q), &psis[j]);
            }
        }
        let means: Vec<f64> = sums.iter().map(|s| s / m as f64).collect();
        let other = summarize(&means, m, 11);
        assert_eq!(est.mean.to_bits(), other.mean.to_bits());
        assert_eq!(est.stderr.to_bits(), other.stderr.to_bits());
    }

    #[test]
    fn adaptive_stops_at_target() {
        let p = beta_family_point(1.0, 0.3, 1.5, Branch::Minus).unwrap();
        let spec = NoiseSpec::new(0.1, 0.1).unwrap();
        let mut c = cfg(20, 10);
        c.adaptive = Some(Adaptive {
            target_stderr: 5e-4,
            max_states: 5000,
        });
        let e = estimate_single(&p, &spec, &c, RngStream::new(1)).unwrap();
        assert!(e.stderr < 5e-4 || e.n_states == 5000);
        assert!(e.n_states > 10 && e.n_states.is_multiple_of(10));
        // the first batch is the fixed-count estimate's prefix
        let fixed = estimate_single(&p, &spec, &cfg(20, e.n_states), RngStream::new(1)).unwrap();
        assert_eq!(fixed.mean.to_bits(), e.mean.to_bits());
    }

    #[test]
    fn two_qubit_noiseless_blocks_match_shifted_single() {
        let g = two_qubit_geometric_point(20.0, 8f64.sqrt()).unwrap();
        let u = conditional_gate(&g.target, g.coupling_j);
        assert!(u.max_abs_diff(&ideal_gate_u2(&g).unwrap()) <= 1e-12);
        let p2 = TwoQubitParams { coupling_j: 0.0, ..g };
        let local = on_target(&one_cycle_gate(&g.target).unwrap());
        assert!(ideal_gate_u2(&p2).unwrap().max_abs_diff(&local) <= 1e-12);
    }

    #[test]
    fn estimates_lie_in_unit_interval() {
        let p = beta_family_point(1.0, 2.0, 1.5, Branch::Minus).unwrap();
        let spec = NoiseSpec::new(0.9, 0.9).unwrap();
        let e = estimate_single(&p, &spec, &cfg(30, 30), RngStream::new(2)).unwrap();
        assert!((0.0..=1.0).contains(&e.mean));
        assert!(e.stderr >= 0.0);
    }
}
