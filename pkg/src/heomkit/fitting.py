"""
Least-squares fitting of bath correlation functions and spectral densities.

Correlation functions are fitted channel by channel, the real part onto
damped cosines and the imaginary part onto damped sines,

    C_R(t) ~ sum_i c_i exp(-g_i t) cos(w_i t),
    C_I(t) ~ sum_i c_i exp(-g_i t) sin(w_i t),

and spectral densities onto a Meier-Tannor sum of underdamped terms,

    J(w) ~ sum_i 2 a_i^2 G_i w / (((w + W_i)^2 + G_i^2)((w - W_i)^2 + G_i^2)).

Fits use bounded trust-region least squares with deterministic multi-start
(log-spaced rate ladders plus seeded jitter) and warm starts from the fit
with one fewer term, which makes the residual non-increasing in the term
count.  Residuals are reported as RMS over the grid normalized by the peak
magnitude of the target.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .baths import (
    ExponentTerm,
    underdamped_residue_from_poles,
    underdamped_terms_from_poles,
)

__all__ = [
    "CorrelationFit",
    "SpectralFit",
    "fit_correlation",
    "fit_spectral_meier_tannor",
    "fit_to_bath",
]

_SEED = 0x5EED
_RESTARTS = 8


@dataclass(frozen=True)
class CorrelationFit:
    """Damped-sinusoid expansion of both correlation channels."""

    real_terms: tuple  # (c, g, w) triples, real channel
    imag_terms: tuple
    rms_residual_real: float
    rms_residual_imag: float


@dataclass(frozen=True)
class SpectralFit:
    """
    Meier-Tannor underdamped expansion ``(a_i, G_i, W_i)`` of J(w).  A
    negative ``a_i`` marks a term entering with weight ``-a_i**2``; signed
    combinations stay within the exponential-decomposition framework and fit
    sharp cutoffs far better than strictly positive sums.
    """

    terms: tuple
    rms_residual: float


def _unpack(params):
    k = len(params) // 3
    return params[:k], params[k : 2 * k], params[2 * k :]


def _damped_model(params, t, kind):
    c, g, w = _unpack(params)
    phase = np.cos(np.outer(w, t)) if kind == "cos" else np.sin(np.outer(w, t))
    return np.einsum("i,it->t", c, np.exp(-np.outer(g, t)) * phase)


def _damped_jacobian(params, t, kind):
    c, g, w = _unpack(params)
    decay = np.exp(-np.outer(g, t))
    wt = np.outer(w, t)
    phase = np.cos(wt) if kind == "cos" else np.sin(wt)
    dphase = -np.sin(wt) if kind == "cos" else np.cos(wt)
    jac = np.empty((t.size, params.size))
    k = len(c)
    jac[:, :k] = (decay * phase).T
    jac[:, k : 2 * k] = (-(c[:, None] * t[None, :]) * decay * phase).T
    jac[:, 2 * k :] = ((c[:, None] * t[None, :]) * decay * dphase).T
    return jac


def _mt_model(params, w):
    # parametrized on the signed weight c_i = sign(a_i) a_i^2
    c, g, om = _unpack(params)
    out = np.zeros_like(w)
    for c_i, g_i, om_i in zip(c, g, om):
        out = out + (
            2 * c_i * g_i * w
            / (((w + om_i) ** 2 + g_i**2) * ((w - om_i) ** 2 + g_i**2))
        )
    return out


def _mt_jacobian(params, w):
    c, g, om = _unpack(params)
    k = len(c)
    jac = np.empty((w.size, params.size))
    for i, (c_i, g_i, om_i) in enumerate(zip(c, g, om)):
        d_plus = (w + om_i) ** 2 + g_i**2
        d_minus = (w - om_i) ** 2 + g_i**2
        dd = d_plus * d_minus
        jac[:, i] = 2 * g_i * w / dd
        jac[:, k + i] = 2 * c_i * w * (dd - 2 * g_i**2 * (d_plus + d_minus)) / dd**2
        jac[:, 2 * k + i] = (
            -2 * c_i * g_i * w
            * (2 * (w + om_i) * d_minus - 2 * (w - om_i) * d_plus)
            / dd**2
        )
    return jac


def _normalized_rms(model, target):
    scale = np.abs(target).max()
    if scale == 0:
        return 0.0
    return float(np.sqrt(np.mean((model - target) ** 2)) / scale)


def _multistart(residual_fn, starts, bounds, jac=None, max_nfev=1000):
    best = None
    for guess in starts:
        guess = np.clip(guess, bounds[0], bounds[1])
        try:
            sol = least_squares(
                residual_fn,
                guess,
                bounds=bounds,
                method="trf",
                jac=jac if jac is not None else "2-point",
                x_scale="jac",
                max_nfev=max_nfev,
            )
        except ValueError:
            continue
        if best is None or sol.cost < best.cost:
            best = sol
    if best is None:
        raise RuntimeError("least-squares fit failed for every start")
    return best


def _fit_channel(t, target, k, kind, rng, max_freq=None):
    """Fit one correlation channel with k damped-(co)sine terms."""
    if k == 0 or np.abs(target).max() == 0.0:
        return (), _normalized_rms(np.zeros_like(target), target)

    dt = np.median(np.diff(t))
    nyquist = np.pi / dt
    t_span = t[-1] - t[0]
    c_max = 10.0 * np.abs(target).max()
    g_lo = 1e-6 / max(t_span, 1e-30)
    w_hi = 100 * nyquist if max_freq is None else max_freq

    def residual(params):
        return _damped_model(params, t, kind) - target

    def jacobian(params):
        return _damped_jacobian(params, t, kind)

    prev = None
    rates_ladder = np.geomspace(max(2.0 / t_span, 1e-6), nyquist / 4.0, max(k, 2))
    for k_cur in range(1, k + 1):
        starts = []
        if prev is not None:
            c_p, g_p, w_p = _unpack(prev)
            new_g = rates_ladder[min(k_cur - 1, len(rates_ladder) - 1)]
            starts.append(
                np.concatenate([c_p, [0.0], g_p, [new_g], w_p, [0.0 if kind == "cos" else new_g]])
            )
        for _ in range(_RESTARTS):
            g0 = np.exp(rng.uniform(np.log(g_lo * 1e3), np.log(nyquist / 2.0), k_cur))
            w0 = np.minimum(
                rng.uniform(0.0, nyquist / 4.0, k_cur)
                if kind == "cos"
                else rng.uniform(nyquist * 1e-3, nyquist / 4.0, k_cur),
                w_hi,
            )
            c0 = rng.uniform(-1.0, 1.0, k_cur) * np.abs(target).max()
            starts.append(np.concatenate([c0, g0, w0]))
        lo = np.concatenate([[-c_max] * k_cur, [g_lo] * k_cur, [0.0] * k_cur])
        hi = np.concatenate([[c_max] * k_cur, [100 * nyquist] * k_cur, [w_hi] * k_cur])
        best = _multistart(residual, starts, (lo, hi), jac=jacobian)
        prev = best.x

    c, g, w = _unpack(prev)
    order = np.lexsort((w, g))
    terms = tuple((c[i], g[i], w[i]) for i in order)
    rms = _normalized_rms(_damped_model(prev, t, kind), target)
    return terms, rms


def fit_correlation(t, values, k_real, k_imag, max_freq=None):
    """
    Fit sampled correlation data ``values`` on the grid ``t`` with ``k_real``
    damped cosines (real part) and ``k_imag`` damped sines (imaginary part).

    ``max_freq`` caps the fitted oscillation frequencies; a tiny cap turns
    the cosine basis into plain decaying exponentials, appropriate for
    overdamped targets.
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=complex)
    if t.ndim != 1 or t.shape != values.shape:
        raise ValueError("t and values must be matching 1-d arrays")
    if np.any(np.diff(t) <= 0) or t[0] < 0:
        raise ValueError("t grid must be ascending and non-negative")
    if t.size < 4 * max(k_real + k_imag, 1):
        raise ValueError(
            f"need at least {4 * (k_real + k_imag)} samples for"
            f" {k_real}+{k_imag} terms"
        )
    rng = np.random.default_rng(_SEED)
    real_terms, rms_r = _fit_channel(t, values.real, k_real, "cos", rng, max_freq)
    imag_terms, rms_i = _fit_channel(t, values.imag, k_imag, "sin", rng, max_freq)
    return CorrelationFit(real_terms, imag_terms, rms_r, rms_i)


def fit_spectral_meier_tannor(w, j, k_terms):
    """
    Fit a sampled spectral density with ``k_terms`` Meier-Tannor underdamped
    terms.  Amplitudes are kept non-negative (they enter squared).
    """
    w = np.asarray(w, dtype=float)
    j = np.asarray(j, dtype=float)
    if w.ndim != 1 or w.shape != j.shape:
        raise ValueError("w and j must be matching 1-d arrays")
    if np.any(w < 0) or np.any(np.diff(w) <= 0):
        raise ValueError("w grid must be ascending and non-negative")
    if np.any(j < 0):
        raise ValueError("spectral density samples must be non-negative")
    if w.size < 4 * max(k_terms, 1):
        raise ValueError(f"need at least {4 * k_terms} samples for {k_terms} terms")
    if k_terms == 0 or j.max() == 0.0:
        return SpectralFit((), _normalized_rms(np.zeros_like(j), j))

    rng = np.random.default_rng(_SEED)
    w_max = w[-1]
    j_peak = j.max()
    c_max = 100.0 * j_peak * w_max**3

    def residual(params):
        return _mt_model(params, w) - j

    def jacobian(params):
        return _mt_jacobian(params, w)

    prev = None
    for k_cur in range(1, k_terms + 1):
        starts = []
        if prev is not None:
            c_p, g_p, o_p = _unpack(prev)
            starts.append(
                np.concatenate([c_p, [0.0], g_p, [w_max / 4.0], o_p, [w_max / 2.0]])
            )
        for _ in range(_RESTARTS):
            om0 = rng.uniform(w_max * 0.02, w_max * 0.8, k_cur)
            g0 = np.exp(rng.uniform(np.log(w_max * 0.01), np.log(w_max), k_cur))
            c0 = rng.uniform(-1.0, 1.0, k_cur) * j_peak * om0 * (om0 + g0)
            starts.append(np.concatenate([c0, g0, om0]))
        lo = np.concatenate([[-c_max] * k_cur, [1e-8 * w_max] * k_cur, [0.01 * w_max] * k_cur])
        hi = np.concatenate([[c_max] * k_cur, [100 * w_max] * k_cur, [100 * w_max] * k_cur])
        best = _multistart(residual, starts, (lo, hi), jac=jacobian)
        prev = best.x

    c, g, om = _unpack(prev)
    order = np.lexsort((om, g))
    terms = tuple(
        (np.sign(c[i]) * np.sqrt(abs(c[i])), g[i], om[i]) for i in order
    )
    return SpectralFit(terms, _normalized_rms(_mt_model(prev, w), j))


def fit_to_bath(fit, beta, n_k_per_term=1, use_terminator=False):
    """
    Convert a fit into hierarchy exponents.

    A :class:`CorrelationFit` maps each damped cosine ``(c, g, w)`` to the
    R-channel pair ``c/2 e^{-(g -+ i w) t}`` and each damped sine to the
    I-channel pair ``-+ i c/2``.  A :class:`SpectralFit` maps each
    underdamped term through the Matsubara decomposition with
    ``n_k_per_term`` thermal exponents per term; with ``use_terminator``
    the summed per-term truncation residues are returned as well.

    Returns ``(terms, gamma_t)``; ``gamma_t`` is ``None`` for correlation
    fits or when no terminator is requested.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    if isinstance(fit, CorrelationFit):
        terms = []
        for c, g, w in fit.real_terms:
            if abs(w) <= 1e-9 * abs(g):
                # frequency pinned at zero: a plain decaying exponential
                terms.append(ExponentTerm("R", c, complex(g)))
            else:
                terms.append(ExponentTerm("R", c / 2.0, g - 1j * w))
                terms.append(ExponentTerm("R", c / 2.0, g + 1j * w))
        for c, g, w in fit.imag_terms:
            terms.append(ExponentTerm("I", -1j * c / 2.0, g - 1j * w))
            terms.append(ExponentTerm("I", 1j * c / 2.0, g + 1j * w))
        return terms, None
    if isinstance(fit, SpectralFit):
        terms = []
        residue = 0.0 + 0.0j
        for a_i, g_i, om_i in fit.terms:
            if om_i <= 1e-6 * g_i:
                raise ValueError(
                    f"fitted term (a={a_i:.3g}, G={g_i:.3g}, W={om_i:.3g}) has"
                    " a degenerate resonance; its exponent pair collides"
                )
            weight = np.sign(a_i) * a_i**2
            terms.extend(
                underdamped_terms_from_poles(weight, g_i, om_i, beta, n_k_per_term)
            )
            if use_terminator:
                residue += underdamped_residue_from_poles(
                    weight, g_i, om_i, beta, n_k_per_term
                )
        return terms, (residue if use_terminator else None)
    raise TypeError(f"unsupported fit type {type(fit)!r}")
