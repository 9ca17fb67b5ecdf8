import numpy as np
import pytest

from heomkit import baths


DL = dict(lam=0.1, gamma=0.5, beta=2.0)
UD = dict(alpha=0.5, width=0.1, w0=1.0, beta=1.0)


# ---------------------------------------------------------------------------
# Matsubara Drude-Lorentz
# ---------------------------------------------------------------------------

def test_dl_resonant_rate_is_gamma():
    terms, _ = baths.matsubara_drude_lorentz(**DL, n_k=3)
    assert terms[0].rate == DL["gamma"]


def test_dl_zero_coupling():
    terms, gamma_t = baths.matsubara_drude_lorentz(0.0, 0.5, 2.0, 2)
    assert all(t.coeff == 0 for t in terms)
    assert gamma_t == 0


def test_dl_coefficients_high_precision():
    # closed forms evaluated independently at high precision
    import mpmath

    mpmath.mp.dps = 40
    lam, gamma, beta, n_k = 0.1, 0.5, 2.0, 2
    terms, gamma_t = baths.matsubara_drude_lorentz(lam, gamma, beta, n_k)

    c0 = mpmath.mpf(lam) * gamma * mpmath.cot(mpmath.mpf(beta) * gamma / 2)
    assert abs(terms[0].coeff - float(c0)) <= 1e-12 * abs(float(c0))
    assert terms[0].coeff2 == -lam * gamma

    expected_residue = 2 * mpmath.mpf(lam) / (beta * gamma) - 1j * lam
    expected_residue -= (c0 - 1j * lam * gamma) / gamma
    for k in range(1, n_k + 1):
        nu = 2 * mpmath.pi * k / beta
        ck = 4 * lam * gamma * nu / ((nu**2 - gamma**2) * beta)
        assert abs(terms[k].coeff - float(ck)) <= 1e-12 * abs(float(ck))
        assert abs(terms[k].rate - float(nu)) <= 1e-12 * float(nu)
        expected_residue -= ck / nu
    assert abs(gamma_t - complex(expected_residue)) <= 1e-12


def test_dl_terminator_is_real_and_decreasing():
    magnitudes = []
    for n_k in (0, 1, 2, 5, 10, 40):
        _, gamma_t = baths.matsubara_drude_lorentz(**DL, n_k=n_k)
        assert abs(gamma_t.imag) < 1e-15
        magnitudes.append(abs(gamma_t))
    assert all(a > b for a, b in zip(magnitudes, magnitudes[1:]))
    assert magnitudes[-1] < 1e-3


def test_dl_cot_pole_rejected():
    with pytest.raises(ValueError, match="degenerate"):
        baths.matsubara_drude_lorentz(0.1, 2 * np.pi, 1.0, 2)


def test_dl_series_matches_quadrature():
    terms, _ = baths.matsubara_drude_lorentz(**DL, n_k=100)
    c_series = baths.correlation_from_terms(terms, 1.0)
    c_quad = baths.correlation_numeric(
        baths.DrudeLorentz(DL["lam"], DL["gamma"]), DL["beta"], 1.0
    )
    assert abs(c_series - c_quad) < 1e-6


def test_quadrature_matches_dense_series():
    # independent cross-check of the quadrature against a 10^4-term sum
    terms, _ = baths.matsubara_drude_lorentz(**DL, n_k=10_000)
    c_series = baths.correlation_from_terms(terms, 1.0)
    c_quad = baths.correlation_numeric(
        baths.DrudeLorentz(DL["lam"], DL["gamma"]), DL["beta"], 1.0
    )
    assert abs(c_series - c_quad) < 1e-6


# ---------------------------------------------------------------------------
# Pade Drude-Lorentz
# ---------------------------------------------------------------------------

def test_pade_zero_coupling():
    terms = baths.pade_drude_lorentz(0.0, 0.5, 2.0, 3)
    assert all(t.coeff == 0 for t in terms)


def test_pade_term_count():
    assert len(baths.pade_drude_lorentz(**DL, n_p=4)) == 5


def quad_grid(ts):
    j = baths.DrudeLorentz(DL["lam"], DL["gamma"])
    return np.array([baths.correlation_numeric(j, DL["beta"], t) for t in ts])


def test_pade_accuracy_and_improvement():
    ts = np.linspace(0.1, 5.0, 9) / DL["gamma"]
    reference = quad_grid(ts)
    scale = np.abs(reference).max()
    errors = {}
    for n_p in (3, 4, 6, 8):
        c = baths.correlation_from_terms(baths.pade_drude_lorentz(**DL, n_p=n_p), ts)
        errors[n_p] = np.abs(c - reference).max() / scale
    # oracle-derived accuracy levels for this parameter set
    assert errors[4] < 2e-3
    assert errors[8] < 1e-4
    assert errors[6] <= errors[3]


def test_pade_beats_matsubara_at_equal_terms():
    ts = np.linspace(0.1, 5.0, 9) / DL["gamma"]
    reference = quad_grid(ts)
    pade = baths.correlation_from_terms(baths.pade_drude_lorentz(**DL, n_p=3), ts)
    mats = baths.correlation_from_terms(
        baths.matsubara_drude_lorentz(**DL, n_k=3)[0], ts
    )
    assert np.abs(pade - reference).max() < np.abs(mats - reference).max()


# ---------------------------------------------------------------------------
# Underdamped
# ---------------------------------------------------------------------------

def test_underdamped_structure():
    terms = baths.matsubara_underdamped(**UD, n_k=4)
    kinds = [t.kind for t in terms]
    assert kinds.count("RI") == 2
    assert kinds.count("R") == 4
    # unmerged form has the same four resonant exponents
    raw = baths.matsubara_underdamped(**UD, n_k=0, combine=False)
    assert [t.kind for t in raw] == ["R", "R", "I", "I"]


def test_underdamped_zero_coupling():
    terms = baths.matsubara_underdamped(0.0, 0.1, 1.0, 1.0, 2)
    assert all(t.coeff == 0 for t in terms)


def test_underdamped_overdamped_rejected():
    with pytest.raises(ValueError, match="overdamped"):
        baths.matsubara_underdamped(0.5, 3.0, 1.0, 1.0, 2)


def test_underdamped_c0_vs_quadrature():
    j = baths.Underdamped(UD["alpha"], UD["width"], UD["w0"])
    c_quad = baths.correlation_numeric(j, UD["beta"], 0.0)
    # oracle-derived convergence of the thermal tail at t=0
    for n_k, tol in ((5, 2e-5), (20, 1e-6)):
        terms = baths.matsubara_underdamped(**UD, n_k=n_k)
        c0 = baths.correlation_from_terms(terms, 0.0)
        assert abs(c0 - c_quad) <= tol * abs(c_quad)


def test_underdamped_finite_t_vs_quadrature():
    j = baths.Underdamped(UD["alpha"], UD["width"], UD["w0"])
    terms = baths.matsubara_underdamped(**UD, n_k=5)
    for t in (0.5, 2.0, 5.0):
        c_quad = baths.correlation_numeric(j, UD["beta"], t)
        assert abs(baths.correlation_from_terms(terms, t) - c_quad) < 1e-6


def test_underdamped_merged_equals_unmerged():
    merged = baths.matsubara_underdamped(**UD, n_k=3)
    raw = baths.matsubara_underdamped(**UD, n_k=3, combine=False)
    ts = np.linspace(0.0, 20.0, 64)
    assert np.allclose(
        baths.correlation_from_terms(merged, ts),
        baths.correlation_from_terms(raw, ts),
        atol=1e-15,
    )


def test_underdamped_terminator_matches_tail():
    # brute-force tail sum k = 6 .. 40000 as the oracle
    residue = baths.underdamped_terminator(**UD, n_k=5)
    om = np.sqrt(UD["w0"] ** 2 - UD["width"] ** 2 / 4.0)
    half = UD["width"] / 2.0
    ks = np.arange(6, 40_001)
    ek = 2 * np.pi * ks / UD["beta"]
    ck = (
        -2 * UD["alpha"] ** 2 * UD["width"] * ek
        / (UD["beta"] * ((om + 1j * half) ** 2 + ek**2) * ((om - 1j * half) ** 2 + ek**2))
    )
    direct = np.sum(ck / ek)
    assert abs(residue - direct) < 1e-10 * abs(direct)


def test_all_rates_decay():
    for terms in (
        baths.matsubara_drude_lorentz(**DL, n_k=4)[0],
        baths.pade_drude_lorentz(**DL, n_p=4),
        baths.matsubara_underdamped(**UD, n_k=4),
    ):
        assert all(complex(t.rate).real > 0 for t in terms)


# ---------------------------------------------------------------------------
# correlation_from_terms / correlation_numeric edge cases
# ---------------------------------------------------------------------------

def test_correlation_empty_terms():
    assert baths.correlation_from_terms([], 1.0) == 0


def test_correlation_single_term_at_zero():
    term = baths.ExponentTerm("R", 1.0, 1.0)
    assert baths.correlation_from_terms([term], 0.0) == 1.0 + 0.0j


def test_correlation_numeric_zero_j():
    j = baths.Tabulated((0.0, 1.0, 2.0), (0.0, 0.0, 0.0))
    assert baths.correlation_numeric(j, 1.0, 0.5) == 0


def test_correlation_numeric_imag_vanishes_at_t0():
    j = baths.Underdamped(0.5, 0.1, 1.0)
    assert baths.correlation_numeric(j, 1.0, 0.0).imag == 0.0


def test_correlation_numeric_rejects_dl_at_t0():
    with pytest.raises(ValueError, match="divergent"):
        baths.correlation_numeric(baths.DrudeLorentz(0.1, 0.5), 2.0, 0.0)


# ---------------------------------------------------------------------------
# Ohmic closed form
# ---------------------------------------------------------------------------

def test_ohmic_zero_coupling():
    assert baths.ohmic_correlation(0.0, 1.0, 1.0, 1.0, 0.3) == 0


def test_ohmic_matches_quadrature():
    alpha, s, wc, beta = 3.25, 1.0, 1.0, 1.0
    j = baths.OhmicExp(alpha, s, wc)
    for t in (0.5, 1.5, 4.0):
        closed = baths.ohmic_correlation(alpha, s, wc, beta, t)
        quad = baths.correlation_numeric(j, beta, t)
        assert abs(closed - quad) <= 1e-6 * max(1.0, abs(closed))


def test_ohmic_conjugation_symmetry():
    # C(t)* equals the closed form with the time argument negated
    alpha, s, wc, beta = 1.3, 1.0, 1.0, 0.7
    ts = np.linspace(0.1, 3.0, 7)
    forward = baths.ohmic_correlation(alpha, s, wc, beta, ts)
    mirrored = np.array(
        [baths.ohmic_correlation(alpha, s, wc, beta, -t) for t in ts]
    )
    assert np.allclose(np.conj(forward), mirrored, atol=1e-12)


# ---------------------------------------------------------------------------
# Power spectrum
# ---------------------------------------------------------------------------

def test_power_spectrum_empty():
    assert baths.power_spectrum_from_terms([], 0.3) == 0.0


def test_power_spectrum_single_lorentzian():
    term = baths.ExponentTerm("R", 0.8, 1.7)
    ws = np.linspace(-4, 4, 41)
    spec = baths.power_spectrum_from_terms([term], ws)
    assert abs(baths.power_spectrum_from_terms([term], 0.0) - 2 * 0.8 / 1.7) < 1e-14
    assert spec.max() == spec[20]  # peak at w = 0


def test_power_spectrum_vs_fft():
    terms = baths.matsubara_underdamped(**UD, n_k=8)
    t_max, n = 400.0, 2**16
    ts = np.arange(n) * (t_max / n)
    c = baths.correlation_from_terms(terms, ts)
    two_sided = np.concatenate([c, np.conj(c[1:][::-1])])
    freqs = np.fft.fftfreq(2 * n - 1, d=t_max / n) * 2 * np.pi
    fft = np.fft.fft(two_sided).real * (t_max / n)
    # forward FFT carries e^{-i w t}: bin k holds S(-freqs[k])
    for w_target in (-1.5, -0.5, 0.5, 0.9, 1.5):
        idx = np.argmin(np.abs(freqs - w_target))
        analytic = baths.power_spectrum_from_terms(terms, -freqs[idx])
        assert abs(fft[idx] - analytic) <= 0.01 * abs(analytic)


def test_detailed_balance():
    terms = baths.matsubara_underdamped(**UD, n_k=10)
    ws = np.linspace(0.05, 2.0, 12)
    ratio = baths.power_spectrum_from_terms(terms, ws) / baths.power_spectrum_from_terms(
        terms, -ws
    )
    assert np.abs(ratio / np.exp(UD["beta"] * ws) - 1.0).max() < 0.05


# ---------------------------------------------------------------------------
# Validation of containers
# ---------------------------------------------------------------------------

def test_exponent_term_validation():
    with pytest.raises(ValueError):
        baths.ExponentTerm("R", 1.0, -1.0)
    with pytest.raises(ValueError):
        baths.ExponentTerm("RI", 1.0, 1.0)
    with pytest.raises(ValueError):
        baths.ExponentTerm("X", 1.0, 1.0)


def test_bath_requires_hermitian_coupling():
    term = baths.ExponentTerm("R", 1.0, 1.0)
    with pytest.raises(ValueError, match="hermitian"):
        baths.BosonicBath(np.array([[0, 1], [0, 0]]), [term], 1.0)


def test_bath_requires_terms():
    with pytest.raises(ValueError):
        baths.BosonicBath(np.eye(2), [], 1.0)


def test_spectral_density_validation():
    with pytest.raises(ValueError):
        baths.DrudeLorentz(0.1, -1.0)
    with pytest.raises(ValueError):
        baths.Underdamped(0.1, 0.0, 1.0)
    with pytest.raises(ValueError):
        baths.OhmicExp(0.1, 0.0, 1.0)
    with pytest.raises(ValueError):
        baths.Tabulated((0.0, 1.0), (-1.0, 0.0))
