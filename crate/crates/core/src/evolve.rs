//! Time evolution under the rotating-field Hamiltonian
//! `H(t) = (ω0 σx cos ωt + ω0 σy sin ωt + ω1 σz) / 2`.
//!
//! The production path is the closed-form rotating-frame solution
//! `U(t) = R(t) V(t)` with `R(t) = exp(−iωtσz/2)` and `V(t)` the Rabi
//! propagator of the static field `(ω0 σx + (ω1 − ω) σz)/2`. The Runge–Kutta
//! integrator and the energy quadrature below exist to cross-check it.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::model::{self, ControlBit, DriveParams, TwoQubitParams};
use crate::qmath::{block_diag, mat_apply, overlap, Gate2, Gate4, GateMatrix, Qubit, StateVec, I};

/// Rabi propagator `V(t) = cos(Ωt/2) I − i sin(Ωt/2) n·σ` of the static
/// rotating-frame field.
pub fn rotating_frame_propagator(p: &DriveParams, t: f64) -> Gate2 {
    let big = model::big_omega(p);
    let (s, c) = (0.5 * big * t).sin_cos();
    let nx = p.omega0 / big;
    let nz = p.detuning() / big;
    GateMatrix([
        [C64::new(c, -s * nz), C64::new(0.0, -s * nx)],
        [C64::new(0.0, -s * nx), C64::new(c, s * nz)],
    ])
}

/// Lab-frame propagator `U(t)` from `t = 0`.
pub fn propagator(p: &DriveParams, t: f64) -> Gate2 {
    let v = rotating_frame_propagator(p, t);
    let r0 = C64::from_polar(1.0, -0.5 * p.omega * t);
    let r1 = r0.conj();
    GateMatrix([[r0 * v[(0, 0)], r0 * v[(0, 1)]], [r1 * v[(1, 0)], r1 * v[(1, 1)]]])
}

/// Propagator over one full period `2π/ω`.
///
/// The frame rotation is exactly `−I` at the end of the period, so it is
/// applied as a sign rather than evaluated numerically.
pub fn one_cycle_gate(p: &DriveParams) -> Result<Gate2> {
    p.validate()?;
    Ok(one_cycle_gate_unchecked(p))
}

/// [`one_cycle_gate`] without parameter validation, for hot loops whose
/// inputs are known to be valid.
#[inline]
pub fn one_cycle_gate_unchecked(p: &DriveParams) -> Gate2 {
    let d = p.omega1 - p.omega;
    let big = p.omega0.hypot(d);
    let (s, c) = (PI * big / p.omega).sin_cos();
    let sx = s * p.omega0 / big;
    let sz = s * d / big;
    GateMatrix([
        [C64::new(-c, sz), C64::new(0.0, sx)],
        [C64::new(0.0, sx), C64::new(-c, -sz)],
    ])
}

/// Gate with cyclic states `[cos χ/2, sin χ/2]` and `[−sin χ/2, cos χ/2]`
/// picking up `e^{iγ}` and `e^{−iγ}`.
pub fn ideal_gate_u1(gamma: f64, chi: f64) -> Gate2 {
    let ep = C64::from_polar(1.0, gamma);
    let em = ep.conj();
    let (s2, c2) = {
        let (s, c) = (0.5 * chi).sin_cos();
        (s * s, c * c)
    };
    let off = I * (chi.sin() * gamma.sin());
    GateMatrix([[ep * c2 + em * s2, off], [off, ep * s2 + em * c2]])
}

/// The orthogonal pair `(|+>, |->)` for axis angle `chi`.
pub fn cyclic_states(chi: f64) -> (Qubit, Qubit) {
    let (s, c) = (0.5 * chi).sin_cos();
    (
        StateVec([C64::new(c, 0.0), C64::new(s, 0.0)]),
        StateVec([C64::new(-s, 0.0), C64::new(c, 0.0)]),
    )
}

/// Noise-free conditional gate: block `δ` is the one-cycle gate of the target
/// at `ω1 + (2δ − 1)J`.
pub fn ideal_gate_u2(p2: &TwoQubitParams) -> Result<Gate4> {
    let a = one_cycle_gate(&model::shifted_target(p2, ControlBit::Zero))?;
    let b = one_cycle_gate(&model::shifted_target(p2, ControlBit::One))?;
    Ok(block_diag(&a, &b))
}

/// `H(s)` in units where `ω = 1`.
fn scaled_hamiltonian(w0: f64, w1: f64, s: f64) -> Gate2 {
    let (sn, cs) = s.sin_cos();
    let off = C64::new(0.5 * w0 * cs, -0.5 * w0 * sn);
    GateMatrix([[C64::new(0.5 * w1, 0.0), off], [off.conj(), C64::new(-0.5 * w1, 0.0)]])
}

fn minus_i_h_times(h: &Gate2, u: &Gate2) -> Gate2 {
    (*h * *u).scale(-I)
}

fn axpy(u: &Gate2, k: &Gate2, h: f64) -> Gate2 {
    let mut out = *u;
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] += k[(i, j)] * h;
        }
    }
    out
}

/// Classic fourth-order Runge–Kutta integration of `dU/dt = −iH(t)U`,
/// `U(0) = I`, with `steps` equal steps. Frequencies are rescaled by `1/ω`
/// before integrating.
pub fn ode_oracle(p: &DriveParams, t: f64, steps: usize) -> Gate2 {
    assert!(steps >= 1, "ode_oracle needs at least one step");
    let q = p.rescaled();
    let (w0, w1) = (q.omega0, q.omega1);
    let s_end = p.omega * t;
    let h = s_end / steps as f64;
    let mut u = Gate2::identity();
    for k in 0..steps {
        let s = k as f64 * h;
        let hm = scaled_hamiltonian(w0, w1, s + 0.5 * h);
        let k1 = minus_i_h_times(&scaled_hamiltonian(w0, w1, s), &u);
        let k2 = minus_i_h_times(&hm, &axpy(&u, &k1, 0.5 * h));
        let k3 = minus_i_h_times(&hm, &axpy(&u, &k2, 0.5 * h));
        let k4 = minus_i_h_times(&scaled_hamiltonian(w0, w1, s + h), &axpy(&u, &k3, h));
        for i in 0..2 {
            for j in 0..2 {
                u[(i, j)] += (k1[(i, j)] + 2.0 * k2[(i, j)] + 2.0 * k3[(i, j)] + k4[(i, j)]) * (h / 6.0);
            }
        }
    }
    u
}

/// `−∫⟨ψ(t)|H(t)|ψ(t)⟩dt` over one period along `ψ(t) = U(t)|+>`, by composite
/// Simpson quadrature (`steps` is rounded up to an even count).
pub fn dynamic_phase_oracle(p: &DriveParams, steps: usize) -> f64 {
    assert!(steps >= 1, "dynamic_phase_oracle needs at least one step");
    let steps = steps + steps % 2;
    let q = p.rescaled();
    let (plus, _) = cyclic_states(model::chi_angle(&q));
    let energy = |s: f64| -> f64 {
        let psi = mat_apply(&propagator(&q, s), &plus);
        let h_psi = mat_apply(&scaled_hamiltonian(q.omega0, q.omega1, s), &psi);
        overlap(&psi, &h_psi).re
    };
    let h = 2.0 * PI / steps as f64;
    let mut acc = energy(0.0) + energy(2.0 * PI);
    for k in 1..steps {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * energy(k as f64 * h);
    }
    -acc * h / 3.0
}

/// `I ⊗ u`: the same target gate for either control state.
pub fn on_target(u: &Gate2) -> Gate4 {
    block_diag(u, u)
}
