"""Deterministic reference values for the Monte Carlo fidelity estimators.

Gates come from scipy's matrix exponential of the rotating-frame Hamiltonian
(not the closed-form propagator), and every average (field noise, input angle,
control state) is done by Gauss-Legendre or periodic trapezoid quadrature.

    python3 fidelity_quadrature.py
"""
import numpy as np
from scipy.linalg import expm

SX = np.array([[0, 1], [1, 0]], complex)
SZ = np.array([[1, 0], [0, -1]], complex)


def gate(w, w0, w1):
    """One-cycle propagator U(2π/ω) = R(2π/ω) exp(-i H_rot 2π/ω)."""
    t = 2 * np.pi / w
    h_rot = 0.5 * (w0 * SX + (w1 - w) * SZ)
    r = expm(-0.5j * w * t * SZ)
    return r @ expm(-1j * h_rot * t)


def gl(n, lo, hi):
    x, wt = np.polynomial.legendre.leggauss(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * wt


def states(ntheta=24, nphi=8, haar=False):
    """Quadrature nodes/weights over the input measure, both orthogonal forms."""
    if haar:
        c, wc = gl(ntheta, -1, 1)
        th = np.arccos(c)
    else:
        th, wc = gl(ntheta, 0, np.pi)
        wc = wc / np.pi * 2
    wc = wc / wc.sum()
    ph = 2 * np.pi * np.arange(nphi) / nphi
    out, wts = [], []
    for t, a in zip(th, wc):
        for p in ph:
            em, ep = np.exp(-0.5j * p), np.exp(0.5j * p)
            for v in ([np.cos(t / 2) * em, np.sin(t / 2) * ep], [-np.sin(t / 2) * em, np.cos(t / 2) * ep]):
                out.append(v)
                wts.append(a / nphi / 2)
    return np.array(out), np.array(wts)


def noise_nodes(d0, d1, n=24):
    e, we = gl(n, -1, 1)
    return [(1 + d0 * a, 1 + d1 * b, wa * wb) for a, wa in zip(e, we) for b, wb in zip(e, we)]


def single(w, w0, w1, d0, d1, haar=False):
    psi, wp = states(haar=haar)
    ideal = gate(w, w0, w1)
    img = psi @ ideal.T
    f = 0.0
    for s0, s1, wn in noise_nodes(d0, d1):
        out = psi @ gate(w, w0 * s0, w1 * s1).T
        f += wn * np.sum(wp * np.abs(np.sum(img.conj() * out, axis=1)) ** 2)
    return f


def two_qubit(w, w0, w1, j, d0, d1, mode):
    psi, wp = states()
    if mode == "fixed0":
        ctrl, wc = np.array([[1, 0]], complex), np.array([1.0])
    else:
        ctrl, wc = states()
    p0 = np.abs(ctrl[:, 0]) ** 2
    i0, i1 = psi @ gate(w, w0, w1 - j).T, psi @ gate(w, w0, w1 + j).T
    f = 0.0
    for s0, s1, wn in noise_nodes(d0, d1):
        a0 = np.sum(i0.conj() * (psi @ gate(w, w0 * s0, w1 * s1 - j).T), axis=1)
        a1 = np.sum(i1.conj() * (psi @ gate(w, w0 * s0, w1 * s1 + j).T), axis=1)
        amp = p0[:, None] * a0[None, :] + (1 - p0)[:, None] * a1[None, :]
        f += wn * np.sum(wc[:, None] * wp[None, :] * np.abs(amp) ** 2)
    return f


def beta_point(w0, delta, beta=1.5):
    eta = 2 * beta - beta**2
    w1 = w0 * np.sqrt(eta / (1 - eta)) + delta
    return (w1 - np.sqrt(w1**2 - eta * (w0**2 + w1**2))) / eta, w0, w1


if __name__ == "__main__":
    a = np.sqrt(3.0)
    cases = {
        "SINGLE_LINE_UNIFORM": single(*beta_point(1e5, 0.0), 0.1, 0.1),
        "SINGLE_OFFSET_HAAR": single(*beta_point(1e5, 2e5), 0.1, 0.1, haar=True),
        "SINGLE_FAR_LOW_NOISE": single(*beta_point(1e5, 5e5), 0.1, 0.01),
        "TWO_GEOMETRIC_FIXED0": two_qubit(60 + 2 * 30, 30, 60, a * 30, 0.1, 0.1, "fixed0"),
        "TWO_OFFLINE_UNFIXED": two_qubit(60 + 3 * 12, 12, 60, np.sqrt(8) * 12, 0.05, 0.05, "unfixed"),
    }
    for k, v in cases.items():
        print(f"const {k}: f64 = {v:.15f};")
