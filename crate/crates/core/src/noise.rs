//! Seedable sampling of field fluctuations and random input states.
//!
//! Every random draw is addressed by `(seed, experiment, point, state, shot)`.
//! A [`RngStream`] fixes the first three; the state index selects a ChaCha
//! stream and the shot index a fixed word offset inside it, so any draw can be
//! regenerated independently of evaluation order or thread count.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::DriveParams;
use crate::qmath::{Qubit, StateVec, TwoQubit};

/// Relative half-widths of the flat fluctuation windows of `ω0` and `ω1`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NoiseSpec {
    pub delta0: f64,
    pub delta1: f64,
}

impl NoiseSpec {
    pub const NOISELESS: NoiseSpec = NoiseSpec {
        delta0: 0.0,
        delta1: 0.0,
    };

    pub fn new(delta0: f64, delta1: f64) -> Result<Self> {
        for (name, d) in [("delta0", delta0), ("delta1", delta1)] {
            if !(0.0..1.0).contains(&d) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1), got {d}")));
            }
        }
        Ok(NoiseSpec { delta0, delta1 })
    }

    pub fn is_noiseless(&self) -> bool {
        self.delta0 == 0.0 && self.delta1 == 0.0
    }

    /// One quasi-static configuration: fresh `ω0'` then `ω1'`, `ω` untouched.
    /// Always consumes exactly two uniforms.
    #[inline]
    pub fn perturb<R: Rng + ?Sized>(&self, p: &DriveParams, rng: &mut R) -> DriveParams {
        let omega0 = sample_fluctuated(p.omega0, self.delta0, rng);
        let omega1 = sample_fluctuated(p.omega1, self.delta1, rng);
        DriveParams {
            omega: p.omega,
            omega0,
            omega1,
        }
    }
}

/// Distribution of the polar angle of sampled input states.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum InputMeasure {
    /// `θ` uniform on `[0, π]`.
    #[default]
    UniformTheta,
    /// `cos θ` uniform on `[−1, 1]` (uniform on the Bloch sphere).
    Haar,
}

impl InputMeasure {
    pub fn name(self) -> &'static str {
        match self {
            InputMeasure::UniformTheta => "uniform_theta",
            InputMeasure::Haar => "haar",
        }
    }
}

/// Generator handed out by [`RngStream`].
pub type StreamRng = ChaCha8Rng;

/// 32-bit words reserved at the head of each state stream for the input-state
/// draws; shot `k` starts at `STATE_WORDS + SHOT_WORDS * k`.
const STATE_WORDS: u128 = 16;
/// Two `f64` uniforms per shot.
const SHOT_WORDS: u128 = 4;

/// Seed plus the experiment/point part of the stream path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub experiment: u64,
    pub point: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            experiment: 0,
            point: 0,
        }
    }

    pub fn with_experiment(self, experiment: u64) -> Self {
        RngStream { experiment, ..self }
    }

    pub fn with_point(self, point: u64) -> Self {
        RngStream { point, ..self }
    }

    fn key(&self) -> [u8; 32] {
        let mut state = mix(self.seed ^ mix(self.experiment ^ mix(self.point)));
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            state = state.wrapping_add(GOLDEN);
            chunk.copy_from_slice(&mix(state).to_le_bytes());
        }
        key
    }

    /// Generator for input state `state`, positioned at its state draws.
    /// Reading past them continues into shot 0, 1, ... in order.
    pub fn state_rng(&self, state: u64) -> StreamRng {
        let mut rng = ChaCha8Rng::from_seed(self.key());
        rng.set_stream(state);
        rng
    }

    /// Generator for the first shot of input state `state`.
    pub fn shots_rng(&self, state: u64) -> StreamRng {
        self.shot_rng(state, 0)
    }

    /// Generator positioned at shot `shot` of input state `state`.
    pub fn shot_rng(&self, state: u64, shot: u64) -> StreamRng {
        let mut rng = self.state_rng(state);
        rng.set_word_pos(STATE_WORDS + SHOT_WORDS * shot as u128);
        rng
    }
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a sequence of words, for building stream paths.
pub fn path_key(parts: &[u64]) -> u64 {
    parts.iter().fold(0x243f_6a88_85a3_08d3, |acc, &x| mix(acc ^ mix(x)))
}

/// FNV-1a of a label, for experiment tags.
pub fn tag(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Uniform draw from `[(1 − δ)·nominal, (1 + δ)·nominal]`.
#[inline]
pub fn sample_fluctuated<R: Rng + ?Sized>(nominal: f64, delta: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    nominal * (1.0 + delta * (2.0 * u - 1.0))
}

/// `[cos(θ/2)e^{−iφ/2}, sin(θ/2)e^{iφ/2}]`, or its orthogonal partner
/// `[−sin(θ/2)e^{−iφ/2}, cos(θ/2)e^{iφ/2}]`.
pub fn input_state(theta: f64, phi: f64, partner: bool) -> Qubit {
    let (s, c) = (0.5 * theta).sin_cos();
    let em = C64::from_polar(1.0, -0.5 * phi);
    let ep = em.conj();
    if partner {
        StateVec([em * -s, ep * c])
    } else {
        StateVec([em * c, ep * s])
    }
}

/// Random input state: three uniforms for `θ`, `φ` and the choice between
/// the two orthogonal forms (probability ½ each).
pub fn sample_input_state<R: Rng + ?Sized>(rng: &mut R, measure: InputMeasure) -> Qubit {
    let u_theta: f64 = rng.random();
    let u_phi: f64 = rng.random();
    let u_form: f64 = rng.random();
    let theta = match measure {
        InputMeasure::UniformTheta => PI * u_theta,
        InputMeasure::Haar => (1.0 - 2.0 * u_theta).clamp(-1.0, 1.0).acos(),
    };
    input_state(theta, 2.0 * PI * u_phi, u_form < 0.5)
}

/// Product input `control ⊗ target`, control drawn first.
pub fn sample_two_qubit_input<R: Rng + ?Sized>(rng: &mut R, measure: InputMeasure) -> TwoQubit {
    let control = sample_input_state(rng, measure);
    let target = sample_input_state(rng, measure);
    control.kron(&target)
}

/// Raw 64-bit draw, for tests that compare streams.
pub fn next_word<R: RngCore + ?Sized>(rng: &mut R) -> u64 {
    rng.next_u64()
}
