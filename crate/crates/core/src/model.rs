//! Control parameters and the closed-form quantities derived from them.
//!
//! All frequencies are plain angular frequencies in arbitrary units; only their
//! ratios matter for the gates built from them.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Single-qubit rotating-field control point.
///
/// `omega` is the rotation rate of the transverse field, `omega0` its strength
/// and `omega1` the longitudinal field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveParams {
    pub omega: f64,
    pub omega0: f64,
    pub omega1: f64,
}

/// Phases accumulated by the `|+>` cyclic state over one drive period.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseTriple {
    pub gamma: f64,
    pub gamma_g: f64,
    pub gamma_d: f64,
}

/// Target-qubit drive plus the Ising coupling to the control qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitParams {
    pub target: DriveParams,
    pub coupling_j: f64,
    /// Set when the point was generated from the `J = alpha * omega0` family.
    pub alpha: Option<f64>,
}

/// Root of the quadratic for `omega` at fixed total phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    #[default]
    Minus,
}

impl std::str::FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            other => Err(Error::InvalidParameter(format!("unknown branch `{other}`"))),
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        })
    }
}

/// State of the control qubit, selecting which target block acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ControlBit {
    Zero,
    One,
}

impl ControlBit {
    pub const BOTH: [ControlBit; 2] = [ControlBit::Zero, ControlBit::One];

    /// `2δ − 1`
    pub fn sign(self) -> f64 {
        match self {
            ControlBit::Zero => -1.0,
            ControlBit::One => 1.0,
        }
    }
}

impl DriveParams {
    pub fn new(omega: f64, omega0: f64, omega1: f64) -> Result<Self> {
        let p = DriveParams { omega, omega0, omega1 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega0.is_finite() && self.omega1.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite frequency in {self:?}")));
        }
        if self.omega <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega must be > 0 (got {}); no drive cycle exists",
                self.omega
            )));
        }
        if self.omega0 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega0 must be > 0 (got {})",
                self.omega0
            )));
        }
        Ok(())
    }

    pub fn detuning(&self) -> f64 {
        self.omega1 - self.omega
    }

    /// Drive period `2π/ω`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    /// Copy with every frequency divided by `omega`, so the period becomes `2π`.
    pub fn rescaled(&self) -> DriveParams {
        DriveParams {
            omega: 1.0,
            omega0: self.omega0 / self.omega,
            omega1: self.omega1 / self.omega,
        }
    }
}

/// Effective Rabi frequency in the rotating frame.
pub fn big_omega(p: &DriveParams) -> f64 {
    p.omega0.hypot(p.detuning())
}

/// Polar angle of the rotating-frame field axis, in `(0, π)` for `omega0 > 0`.
pub fn chi_angle(p: &DriveParams) -> f64 {
    p.omega0.atan2(p.detuning())
}

pub fn phases(p: &DriveParams) -> Result<PhaseTriple> {
    if !(p.omega > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "omega must be > 0 (got {}); no drive cycle exists",
            p.omega
        )));
    }
    let big = big_omega(p);
    let d = p.detuning();
    let gamma = -PI * (1.0 + big / p.omega);
    let gamma_g = -PI * (1.0 - d / big);
    let gamma_d = -PI * (p.omega0 * p.omega0 + p.omega1 * d) / (p.omega * big);
    Ok(PhaseTriple {
        gamma,
        gamma_g,
        gamma_d,
    })
}

/// `η = 2β − β²`
pub fn eta(beta: f64) -> f64 {
    2.0 * beta - beta * beta
}

/// Drive frequency giving total phase `−βπ` for the given field strengths.
///
/// Only `1 < β < 2` is accepted: the quadratic in `ω` is symmetric under
/// `β → 2 − β`, and for `β < 1` its roots carry total phase `−(2 − β)π`.
pub fn omega_for_beta(omega0: f64, omega1: f64, beta: f64, branch: Branch) -> Result<f64> {
    let eta = eta(beta);
    if !(eta > 0.0 && eta <= 1.0) || !beta.is_finite() {
        return Err(Error::InvalidBeta {
            beta,
            reason: "need 0 < η = 2β − β² ≤ 1",
        });
    }
    if beta <= 1.0 {
        return Err(Error::InvalidBeta {
            beta,
            reason: "total phase −βπ needs Ω/ω = β − 1 > 0, i.e. 1 < β < 2",
        });
    }
    let scale = omega0 * omega0 + omega1 * omega1;
    let mut disc = omega1 * omega1 - eta * scale;
    // Zero-dynamic points sit exactly on disc = 0, where the square root
    // would blow rounding noise up to ~1e-8; snap to the double root there.
    if disc.abs() <= 8.0 * f64::EPSILON * scale {
        disc = 0.0;
    } else if disc < 0.0 {
        return Err(Error::RealityConstraint { eta, omega0, omega1 });
    }
    let root = disc.sqrt();
    let omega = match branch {
        Branch::Minus => (omega1 - root) / eta,
        Branch::Plus => (omega1 + root) / eta,
    };
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "{branch} branch gives non-positive omega {omega} for omega1 = {omega1}"
        )));
    }
    Ok(omega)
}

/// Longitudinal field at which the dynamic phase vanishes for total phase `−βπ`.
pub fn zero_dynamic_omega1(omega0: f64, beta: f64) -> Result<f64> {
    let eta = eta(beta);
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidBeta {
            beta,
            reason: "need 0 < η = 2β − β² < 1",
        });
    }
    Ok(omega0 * (eta / (1.0 - eta)).sqrt())
}

/// Fixed-total-phase point offset by `delta` from the zero-dynamic line:
/// `ω1 = ω1⁽⁰⁾(ω0, β) + Δ`, then `ω` from [`omega_for_beta`].
pub fn beta_family_point(omega0: f64, delta: f64, beta: f64, branch: Branch) -> Result<DriveParams> {
    let omega1 = zero_dynamic_omega1(omega0, beta)? + delta;
    let omega = omega_for_beta(omega0, omega1, beta, branch)?;
    DriveParams::new(omega, omega0, omega1)
}

/// Target parameters seen when the control qubit is in `bit`.
pub fn shifted_target(p2: &TwoQubitParams, bit: ControlBit) -> DriveParams {
    DriveParams {
        omega1: p2.target.omega1 + bit.sign() * p2.coupling_j,
        ..p2.target
    }
}

/// Member of the `ω = ω1 + √(1+α²)ω0`, `J = αω0` family at arbitrary `omega1`.
pub fn two_qubit_family(omega0: f64, omega1: f64, alpha: f64) -> Result<TwoQubitParams> {
    let s = (1.0 + alpha * alpha).sqrt();
    let target = DriveParams::new(omega1 + s * omega0, omega0, omega1)?;
    Ok(TwoQubitParams {
        target,
        coupling_j: alpha * omega0,
        alpha: Some(alpha),
    })
}

/// Point of the family where both control blocks have zero dynamic phase.
pub fn two_qubit_geometric_point(omega0: f64, alpha: f64) -> Result<TwoQubitParams> {
    if !(omega0 > 0.0 && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need omega0 > 0 and alpha > 0 (got {omega0}, {alpha})"
        )));
    }
    let omega1 = (1.0 + alpha * alpha).sqrt() * omega0;
    two_qubit_family(omega0, omega1, alpha)
}
