"""
Independent analytic and numeric references used by the test and acceptance
suites: the exact steady-state current through a single resonant level, the
pure-dephasing coherence decay, and Gibbs states.
"""

from dataclasses import dataclass

import numpy as np
import scipy.integrate

__all__ = [
    "LandauerSpec",
    "landauer_current",
    "pure_dephasing_coherence",
    "gibbs_state",
]


@dataclass(frozen=True)
class LandauerSpec:
    """
    Single spin-less level at energy ``epsilon`` between two Lorentzian
    reservoirs, each described by ``(eta, width, mu)``, at inverse
    temperature ``beta``.
    """

    epsilon: float
    left: tuple
    right: tuple
    beta: float

    def __post_init__(self):
        for eta, width, _ in (self.left, self.right):
            if not (eta > 0 and width > 0):
                raise ValueError("lead eta and width must be positive")
        if not self.beta > 0:
            raise ValueError("beta must be positive")


def _fermi(x):
    # exp overflow-safe logistic
    return 0.5 * (1.0 - np.tanh(x / 2.0))


def landauer_current(spec, abs_tol=1e-10):
    """
    Steady-state current through the resonant level,

        I = int dw (2/pi) J_L J_R (f_L - f_R)
            / ((J_L + J_R)^2 + 4 (w - eps - lam_L - lam_R)^2),

    with each lead's Lorentzian coupling centred on its own chemical
    potential and Lamb shifts ``lam_K = (w - mu_K) J_K / (2 W_K)``.  The
    quadrature window is clipped to where the Fermi-function difference is
    above 1e-14.
    """
    eta_l, w_l, mu_l = spec.left
    eta_r, w_r, mu_r = spec.right
    beta = spec.beta

    if mu_l == mu_r:
        return 0.0

    def integrand(w):
        j_l = eta_l * w_l**2 / ((w - mu_l) ** 2 + w_l**2)
        j_r = eta_r * w_r**2 / ((w - mu_r) ** 2 + w_r**2)
        lam_l = (w - mu_l) * j_l / (2 * w_l)
        lam_r = (w - mu_r) * j_r / (2 * w_r)
        df = _fermi(beta * (w - mu_l)) - _fermi(beta * (w - mu_r))
        denom = (j_l + j_r) ** 2 + 4 * (w - spec.epsilon - lam_l - lam_r) ** 2
        return (2.0 / np.pi) * j_l * j_r * df / denom

    # |f_L - f_R| < 1e-14 outside +-33/beta of the bias window
    pad = 33.0 / beta
    lo = min(mu_l, mu_r) - pad
    hi = max(mu_l, mu_r) + pad
    points = sorted(p for p in (mu_l, mu_r, spec.epsilon) if lo < p < hi)
    val, err = scipy.integrate.quad(
        integrand, lo, hi, epsabs=abs_tol, epsrel=1e-12, limit=500,
        points=points or None,
    )
    if err > 100 * abs_tol:
        raise RuntimeError(
            f"Landauer quadrature error estimate {err:.2e} exceeds tolerance"
        )
    return val


def pure_dephasing_coherence(terms, epsilon, t, rho01_init=0.5, delta=0.0):
    """
    Coherence of a two-level system with ``H = epsilon/2 sigma_z`` coupled
    through ``Q = sigma_z`` (no tunnelling):

        rho01(t) = rho01(0) e^{-i eps t}
                   exp(-4 int_0^t dt2 int_0^t2 dt1 C_R(t1)).

    The double integral of each exponential ``c e^{-g t}`` is analytic,
    ``c (g t - 1 + e^{-g t}) / g^2``.  Only real-channel coefficients enter;
    the anticommutator contributions vanish on coherences for this coupling.
    """
    if delta != 0.0:
        raise ValueError(
            "pure-dephasing oracle requires a sigma_z-only Hamiltonian (delta=0)"
        )
    t = np.asarray(t, dtype=float)
    exponent = np.zeros(t.shape, dtype=complex)
    for term in terms:
        if term.kind == "I":
            continue
        g = term.rate
        exponent += term.coeff * (g * t - 1.0 + np.exp(-g * t)) / g**2
    out = rho01_init * np.exp(-1j * epsilon * t) * np.exp(-4.0 * exponent)
    return out if out.shape else complex(out)


def gibbs_state(h, beta):
    """``exp(-beta h) / Z`` computed through the eigenbasis (stable for large beta)."""
    h = np.asarray(h, dtype=complex)
    if not np.allclose(h, h.conj().T, atol=1e-12 * max(1.0, np.abs(h).max())):
        raise ValueError("Hamiltonian must be hermitian")
    energies, vectors = np.linalg.eigh(h)
    weights = np.exp(-beta * (energies - energies.min()))
    weights /= weights.sum()
    return (vectors * weights) @ vectors.conj().T
