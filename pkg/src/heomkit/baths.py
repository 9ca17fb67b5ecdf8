"""
Spectral-density models and their exponential correlation-function
decompositions.

A bath correlation function is split as ``C(t) = C_R(t) + i C_I(t)`` with
each channel expanded over decaying exponentials,

    C_R(t) = sum_k c_k^R exp(-gamma_k^R t),
    C_I(t) = sum_k c_k^I exp(-gamma_k^I t),

where coefficients and rates may be complex.  An :class:`ExponentTerm` of
kind ``"R"`` or ``"I"`` carries one term of the corresponding channel; kind
``"RI"`` carries a real-channel coefficient (``coeff``) and an
imaginary-channel coefficient (``coeff2``) sharing a single rate.  Merging
matching-rate R/I pairs into RI terms halves the number of hierarchy
indices those terms consume.

Decompositions provided here: Matsubara and Pade expansions of the
overdamped Drude-Lorentz bath, the Matsubara expansion of the underdamped
Brownian-motion bath, and direct numerical evaluation of ``C(t)`` and the
power spectrum for validation.
"""

from dataclasses import dataclass

import numpy as np
import scipy.integrate
from scipy.linalg import eigvalsh

from .operators import is_hermitian

__all__ = [
    "DrudeLorentz",
    "Underdamped",
    "OhmicExp",
    "Tabulated",
    "ExponentTerm",
    "BosonicBath",
    "matsubara_drude_lorentz",
    "pade_drude_lorentz",
    "matsubara_underdamped",
    "underdamped_terms_from_poles",
    "underdamped_residue_from_poles",
    "underdamped_terminator",
    "correlation_from_terms",
    "correlation_numeric",
    "ohmic_correlation",
    "power_spectrum_from_terms",
]


def _require_positive(**params):
    for name, value in params.items():
        if not value > 0:
            raise ValueError(f"{name} must be strictly positive, got {value}")


# ---------------------------------------------------------------------------
# Spectral densities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DrudeLorentz:
    """Overdamped bath ``J(w) = 2 lam gamma w / (gamma^2 + w^2)``."""

    lam: float
    gamma: float

    def __post_init__(self):
        _require_positive(gamma=self.gamma)
        if self.lam < 0:
            raise ValueError("lam must be non-negative")

    def value(self, w):
        w = np.asarray(w, dtype=float)
        return 2 * self.lam * self.gamma * w / (self.gamma**2 + w**2)


@dataclass(frozen=True)
class Underdamped:
    """
    Underdamped Brownian-motion bath
    ``J(w) = alpha^2 width w / ((w0^2 - w^2)^2 + width^2 w^2)``.
    """

    alpha: float
    width: float
    w0: float

    def __post_init__(self):
        _require_positive(width=self.width, w0=self.w0)
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")

    def value(self, w):
        w = np.asarray(w, dtype=float)
        return (
            self.alpha**2 * self.width * w
            / ((self.w0**2 - w**2) ** 2 + self.width**2 * w**2)
        )


@dataclass(frozen=True)
class OhmicExp:
    """Power law with exponential cutoff ``J(w) = alpha w^s wc^(1-s) exp(-w/wc)``."""

    alpha: float
    s: float
    wc: float

    def __post_init__(self):
        _require_positive(s=self.s, wc=self.wc)
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")

    def value(self, w):
        w = np.asarray(w, dtype=float)
        return self.alpha * w**self.s * self.wc ** (1 - self.s) * np.exp(-w / self.wc)


@dataclass(frozen=True)
class Tabulated:
    """Spectral density sampled on a frequency grid, linearly interpolated."""

    omega: tuple
    values: tuple

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        j = np.asarray(self.values, dtype=float)
        if w.ndim != 1 or w.shape != j.shape or w.size < 2:
            raise ValueError("omega and values must be matching 1-d grids")
        if np.any(np.diff(w) <= 0):
            raise ValueError("omega grid must be strictly increasing")
        if np.any(j[w >= 0] < 0):
            raise ValueError("tabulated J must be non-negative for omega >= 0")
        object.__setattr__(self, "omega", tuple(w))
        object.__setattr__(self, "values", tuple(j))

    def value(self, w):
        return np.interp(w, self.omega, self.values, left=0.0, right=0.0)


# ---------------------------------------------------------------------------
# Exponential terms and baths
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentTerm:
    """
    One exponential term of a decomposed bath correlation function.

    ``kind`` is ``"R"`` (real channel), ``"I"`` (imaginary channel) or
    ``"RI"`` (merged; ``coeff`` feeds the real channel and ``coeff2`` the
    imaginary one).  The decay rate must have a strictly positive real part.
    """

    kind: str
    coeff: complex
    rate: complex
    coeff2: complex = None

    def __post_init__(self):
        if self.kind not in ("R", "I", "RI"):
            raise ValueError(f"unknown exponent kind {self.kind!r}")
        if not complex(self.rate).real > 0:
            raise ValueError(f"exponent rate must decay, got {self.rate}")
        if self.kind == "RI" and self.coeff2 is None:
            raise ValueError("RI terms need both coefficients")
        if self.kind != "RI" and self.coeff2 is not None:
            raise ValueError("coeff2 is only meaningful for RI terms")


@dataclass
class BosonicBath:
    """
    A decomposed bosonic bath: hermitian coupling operator, exponential
    terms, optional truncation terminator coefficient and inverse
    temperature.
    """

    coupling: np.ndarray
    terms: list
    beta: float
    terminator: complex = None

    def __post_init__(self):
        self.coupling = np.asarray(self.coupling, dtype=complex)
        if not is_hermitian(self.coupling):
            raise ValueError("bath coupling operator must be hermitian")
        if not self.terms:
            raise ValueError("bath must carry at least one exponential term")
        _require_positive(beta=self.beta)


# ---------------------------------------------------------------------------
# Drude-Lorentz decompositions
# ---------------------------------------------------------------------------

def _check_cot_pole(beta, gamma):
    x = beta * gamma / 2.0
    nearest = np.pi * round(x / np.pi)
    if nearest > 0 and abs(x - nearest) < 1e-12 * max(1.0, x):
        raise ValueError(
            "degenerate temperature/cutoff: beta*gamma/2 sits on a pole of cot"
        )


def matsubara_drude_lorentz(lam, gamma, beta, n_k, combine=True):
    """
    Matsubara decomposition of the Drude-Lorentz bath.

    Returns ``(terms, gamma_t)`` where ``terms`` holds the resonant k=0
    exponent (rate ``gamma``, coefficient ``lam*gamma*(cot(beta*gamma/2) - i)``)
    plus ``n_k`` thermal exponents at rates ``2 pi k / beta``, and ``gamma_t``
    is the Tanimura-terminator residue of the discarded tail,
    ``2 lam / (beta gamma) - i lam - sum_k c_k / nu_k``.

    With ``combine=True`` (default) the k=0 real and imaginary parts, which
    share the rate ``gamma``, are emitted as a single RI term.
    """
    _require_positive(gamma=gamma, beta=beta)
    if lam < 0:
        raise ValueError("lam must be non-negative")
    if n_k < 0:
        raise ValueError("n_k must be non-negative")
    _check_cot_pole(beta, gamma)

    c0_real = lam * gamma / np.tan(beta * gamma / 2.0)
    c0_imag = -lam * gamma

    if combine:
        terms = [ExponentTerm("RI", c0_real, gamma, coeff2=c0_imag)]
    else:
        terms = [
            ExponentTerm("R", c0_real, gamma),
            ExponentTerm("I", c0_imag, gamma),
        ]

    residue = 2 * lam / (beta * gamma) - 1j * lam
    residue -= (c0_real + 1j * c0_imag) / gamma
    for k in range(1, n_k + 1):
        nu = 2 * np.pi * k / beta
        ck = 4 * lam * gamma * nu / ((nu**2 - gamma**2) * beta)
        terms.append(ExponentTerm("R", ck, nu))
        residue -= ck / nu
    return terms, residue


def _pade_kappa_epsilon(n_p, diag_shift):
    """
    Poles and residues of the [N-1/N] Pade approximant to the Bose
    (``diag_shift=2``) or Fermi (``diag_shift=0``) distribution, via the
    tridiagonal-eigenvalue construction.
    """
    try:
        b = np.diag(
            [
                1.0 / np.sqrt((2 * k + 5 + diag_shift - 2) * (2 * k + 3 + diag_shift - 2))
                for k in range(2 * n_p - 1)
            ],
            k=1,
        )
        b = b + b.T
        eps = [-2.0 / val for val in eigvalsh(b)[0:n_p]]

        bp = np.diag(
            [
                1.0 / np.sqrt((2 * k + 7 + diag_shift - 2) * (2 * k + 5 + diag_shift - 2))
                for k in range(2 * n_p - 2)
            ],
            k=1,
        )
        bp = bp + bp.T
        chi = [-2.0 / val for val in eigvalsh(bp)[0 : n_p - 1]]
    except np.linalg.LinAlgError as err:
        raise RuntimeError(f"Pade pole eigen-solve failed: {err}") from err

    # Bose: prefactor N(2N+3)/2; Fermi: N(2N+1)/2.
    prefactor = 0.5 * n_p * (2 * (n_p + 1) + diag_shift - 1)
    kappa = []
    for j in range(n_p):
        term = prefactor
        for k in range(n_p - 1):
            term *= (chi[k] ** 2 - eps[j] ** 2) / (
                eps[k] ** 2 - eps[j] ** 2 + (1.0 if j == k else 0.0)
            )
        k = n_p - 1
        term /= eps[k] ** 2 - eps[j] ** 2 + (1.0 if j == k else 0.0)
        kappa.append(term)
    return kappa, eps


def bose_pade_poles(n_p):
    """[N-1/N] Pade residues/poles for the Bose distribution."""
    return _pade_kappa_epsilon(n_p, diag_shift=2)


def pade_drude_lorentz(lam, gamma, beta, n_p, combine=True):
    """
    Pade decomposition of the Drude-Lorentz bath: the resonant exponent plus
    ``n_p`` Pade exponents at rates ``eps_l / beta``.  Converges much faster
    than the plain Matsubara series at the same number of terms.
    """
    _require_positive(gamma=gamma, beta=beta)
    if lam < 0:
        raise ValueError("lam must be non-negative")
    if n_p < 1:
        raise ValueError("n_p must be at least 1")
    _check_cot_pole(beta, gamma)

    kappa, eps = bose_pade_poles(n_p)

    c0_real = lam * gamma / np.tan(beta * gamma / 2.0)
    c0_imag = -lam * gamma
    if combine:
        terms = [ExponentTerm("RI", c0_real, gamma, coeff2=c0_imag)]
    else:
        terms = [
            ExponentTerm("R", c0_real, gamma),
            ExponentTerm("I", c0_imag, gamma),
        ]
    for kap, ep in zip(kappa, eps):
        rate = ep / beta
        if abs(rate - gamma) < 1e-12 * max(gamma, abs(rate)):
            raise ValueError("Pade pole degenerate with the Drude rate")
        ck = 4 * lam * gamma * kap * rate / (beta * (rate**2 - gamma**2))
        terms.append(ExponentTerm("R", ck, rate))
    return terms


# ---------------------------------------------------------------------------
# Underdamped decomposition
# ---------------------------------------------------------------------------

def _coth(z):
    return 1.0 / np.tanh(z)


def _underdamped_resonance(width, w0):
    if not w0 > width / 2.0:
        raise ValueError("overdamped regime: use Drude-Lorentz")
    return np.sqrt(w0**2 - width**2 / 4.0)


def underdamped_terms_from_poles(weight, half_width, resonance, beta, n_k, combine=True):
    """
    Exponential decomposition of the Lorentzian-pole bath

        J(w) = 2 weight half_width w
               / (((w + resonance)^2 + half_width^2)((w - resonance)^2 + half_width^2)),

    whose poles sit at ``+-resonance +- i half_width``.  The resonant pair
    carries real-channel coefficients
    ``weight coth(beta (resonance +- i half_width)/2)/(4 resonance)`` and
    imaginary-channel coefficients ``+-i weight/(4 resonance)`` at rates
    ``half_width -+ i resonance``; the ``n_k`` thermal exponents live on the
    real channel at rates ``2 pi k / beta``.  ``weight`` may be negative
    (signed fit components).
    """
    _require_positive(half_width=half_width, beta=beta)
    if not resonance > 0:
        raise ValueError("resonance must be strictly positive")
    if n_k < 0:
        raise ValueError("n_k must be non-negative")
    om = resonance
    half = half_width

    c_plus = weight / (4 * om) * _coth(beta * (om + 1j * half) / 2.0)
    c_minus = weight / (4 * om) * _coth(beta * (om - 1j * half) / 2.0)
    i_plus = 1j * weight / (4 * om)
    i_minus = -1j * weight / (4 * om)
    rate_plus = half - 1j * om
    rate_minus = half + 1j * om

    if combine:
        terms = [
            ExponentTerm("RI", c_plus, rate_plus, coeff2=i_plus),
            ExponentTerm("RI", c_minus, rate_minus, coeff2=i_minus),
        ]
    else:
        terms = [
            ExponentTerm("R", c_plus, rate_plus),
            ExponentTerm("R", c_minus, rate_minus),
            ExponentTerm("I", i_plus, rate_plus),
            ExponentTerm("I", i_minus, rate_minus),
        ]

    for k in range(1, n_k + 1):
        ek = 2 * np.pi * k / beta
        ck = (
            -4 * weight * half * ek
            / (beta * ((om + 1j * half) ** 2 + ek**2) * ((om - 1j * half) ** 2 + ek**2))
        )
        terms.append(ExponentTerm("R", complex(ck), ek))
    return terms


def matsubara_underdamped(alpha, width, w0, beta, n_k, combine=True):
    """
    Matsubara decomposition of the underdamped Brownian-motion bath.

    The resonant contribution consists of two conjugate exponents at rates
    ``width/2 -+ i Om`` with ``Om = sqrt(w0^2 - width^2/4)``; each carries a
    real-channel coefficient ``alpha^2 coth(beta (Om +- i width/2)/2)/(4 Om)``
    and an imaginary-channel coefficient ``+-i alpha^2/(4 Om)``, merged by
    default into two RI terms.  The ``n_k`` thermal exponents live on the
    real channel at rates ``2 pi k / beta``.
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    _require_positive(width=width, w0=w0, beta=beta)
    om = _underdamped_resonance(width, w0)
    return underdamped_terms_from_poles(
        alpha**2, width / 2.0, om, beta, n_k, combine=combine
    )


def underdamped_residue_from_poles(weight, half_width, resonance, beta, n_k, tail_tol=1e-16):
    """
    Residue ``sum_{k > n_k} c_k / nu_k`` of the discarded thermal tail of the
    pole-form decomposition.  The summand decays as ``k**-4`` so a direct
    partial sum converges fast.
    """
    om = resonance
    half = half_width
    total = 0.0
    k = n_k + 1
    chunk = 512
    while k < 10_000_000:
        ks = np.arange(k, k + chunk)
        ek = 2 * np.pi * ks / beta
        ck = (
            -4 * weight * half * ek
            / (beta * ((om + 1j * half) ** 2 + ek**2) * ((om - 1j * half) ** 2 + ek**2))
        )
        inc = np.sum(ck / ek)
        total += inc
        if abs(inc) < tail_tol * max(abs(total), 1e-300):
            break
        k += chunk
    return complex(total)


def underdamped_terminator(alpha, width, w0, beta, n_k, tail_tol=1e-16):
    """Thermal-tail residue of :func:`matsubara_underdamped`."""
    om = _underdamped_resonance(width, w0)
    return underdamped_residue_from_poles(
        alpha**2, width / 2.0, om, beta, n_k, tail_tol=tail_tol
    )


# ---------------------------------------------------------------------------
# Direct evaluation and reconstruction
# ---------------------------------------------------------------------------

def correlation_from_terms(terms, t):
    """
    Evaluate ``C(t) = C_R(t) + i C_I(t)`` from exponential terms.  ``t`` may
    be a scalar or an array; R terms feed the real channel, I terms the
    imaginary channel and RI terms both.
    """
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape, dtype=complex)
    for term in terms:
        decay = np.exp(-term.rate * t)
        if term.kind == "R":
            out += term.coeff * decay
        elif term.kind == "I":
            out += 1j * term.coeff * decay
        else:
            out += (term.coeff + 1j * term.coeff2) * decay
    return out if out.shape else complex(out)


def _quad_oscillatory(f, upper, weight, wvar, abs_tol):
    kwargs = dict(epsabs=abs_tol, limit=400)
    if np.isinf(upper):
        kwargs["limlst"] = 200
    val, err = scipy.integrate.quad(f, 0, upper, weight=weight, wvar=wvar, **kwargs)
    return val, err


def correlation_numeric(j, beta, t, abs_tol=1e-8):
    """
    Bath correlation function by adaptive quadrature,

        C(t) = (1/pi) int_0^inf dw J(w) [coth(beta w / 2) cos(w t) - i sin(w t)],

    to absolute tolerance ``abs_tol``.  The Drude-Lorentz real part diverges
    logarithmically at ``t = 0`` and is refused there rather than truncated.
    """
    _require_positive(beta=beta)
    if t < 0:
        raise ValueError("t must be non-negative")
    if isinstance(j, DrudeLorentz) and t == 0:
        raise ValueError(
            "Drude-Lorentz correlation has a divergent real part at t=0;"
            " evaluate at t > 0"
        )
    upper = np.inf
    if isinstance(j, Tabulated):
        upper = j.omega[-1]

    def real_integrand(w):
        w = max(w, 1e-300)
        return float(j.value(w)) / np.tanh(beta * w / 2.0) / np.pi

    def imag_integrand(w):
        return float(j.value(w)) / np.pi

    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.integrate.IntegrationWarning)
        if t == 0:
            re, re_err = scipy.integrate.quad(
                real_integrand, 0, upper, epsabs=abs_tol, limit=400
            )
            im, im_err = 0.0, 0.0
        else:
            re, re_err = _quad_oscillatory(real_integrand, upper, "cos", t, abs_tol)
            im, im_err = _quad_oscillatory(imag_integrand, upper, "sin", t, abs_tol)
    if re_err > 10 * abs_tol or im_err > 10 * abs_tol:
        raise RuntimeError(
            f"correlation quadrature did not converge at t={t}: error"
            f" estimates ({re_err:.2e}, {im_err:.2e}) exceed {abs_tol:.2e}"
        )
    return complex(re, -im)


def ohmic_correlation(alpha, s, wc, beta, t):
    """
    Closed form of the correlation function of the exponential-cutoff bath,
    in terms of the Gamma function and the Hurwitz zeta function evaluated at
    complex offsets.
    """
    _require_positive(s=s, wc=wc, beta=beta)
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    import mpmath

    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    prefactor = (
        alpha * wc ** (1 - s) * beta ** (-(s + 1)) / np.pi * float(mpmath.gamma(s + 1))
    )
    out = np.empty(t_arr.shape, dtype=complex)
    for i, ti in enumerate(t_arr):
        q_minus = (1 + beta * wc - 1j * wc * ti) / (beta * wc)
        q_plus = (1 + 1j * wc * ti) / (beta * wc)
        try:
            z = mpmath.zeta(s + 1, q_minus) + mpmath.zeta(s + 1, q_plus)
        except ValueError as err:
            raise ValueError(f"zeta evaluation failed at t={ti}: {err}") from err
        out[i] = prefactor * complex(z)
    return out if np.ndim(t) else complex(out[0])


def power_spectrum_from_terms(terms, w):
    """
    Analytic Fourier transform ``S(w) = int dt e^{i w t} C(|t|-extension)``
    of the two-sided correlation function built from exponential terms.
    Hermitian symmetry ``C(-t) = C(t)*`` makes the result real.
    """
    w = np.asarray(w, dtype=float)
    out = np.zeros(w.shape, dtype=float)
    for term in terms:
        if term.kind == "R":
            c_eff = term.coeff
        elif term.kind == "I":
            c_eff = 1j * term.coeff
        else:
            c_eff = term.coeff + 1j * term.coeff2
        out += 2.0 * (c_eff / (term.rate - 1j * w)).real
    return out if out.shape else float(out)
