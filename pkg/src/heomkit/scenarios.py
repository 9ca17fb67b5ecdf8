"""
Experiment runner: builds each supported scenario from a parsed
configuration, solves it, and emits a CSV table plus a JSON metadata
sidecar echoing the resolved internal-unit parameters.

Sweep scenarios (bias voltages, coupling strengths, bath widths) fan their
points out over a process pool when ``jobs > 1``; rows are always ordered
by sweep index, so serial runs are byte-reproducible.
"""

import json
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .baths import BosonicBath, ExponentTerm, correlation_from_terms, matsubara_drude_lorentz, matsubara_underdamped, ohmic_correlation, pade_drude_lorentz
from .bosonic import TimeDependentHamiltonian, build_bosonic_rhs, merge_exponents
from .config import ScenarioConfig
from .drives import PulseTrain
from .fermionic import build_fermionic_rhs, pade_lorentzian_bath
from .fitting import fit_correlation, fit_spectral_meier_tannor, fit_to_bath
from .observables import electronic_current, heat_current
from .oracles import LandauerSpec, landauer_current
from .solvers import evolve, steady_state

__all__ = ["ResultTable", "run_scenario", "vibronic_system", "SCENARIOS"]

SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)  # index 1 is the excited state
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # raises 0 -> 1


@dataclass
class ResultTable:
    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def write_csv(self, path):
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(f"{float(v):.16e}" for v in row))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    def write_metadata(self, path):
        Path(path).write_text(
            json.dumps(self.metadata, indent=2, sort_keys=True, default=str) + "\n",
            encoding="utf-8",
        )


def _as_bool(value, default=False):
    if value is None:
        return default
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("true", "yes", "1", "on"):
        return True
    if text in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"cannot interpret {value!r} as a boolean")


def _excited_projector():
    return np.diag([0.0, 1.0]).astype(complex)


def _map_points(worker, points, jobs):
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, points))
    return [worker(p) for p in points]


# ---------------------------------------------------------------------------
# Spin-boson comparison scenarios
# ---------------------------------------------------------------------------

def _spin_boson_population(h, bath, cutoff, use_terminator, times, rtol, atol):
    rhs = build_bosonic_rhs(h, merge_exponents([bath]), cutoff, use_terminator)
    traj = evolve(rhs, _excited_projector(), times, rtol=rtol, atol=atol)
    rho11 = [float(s.system()[1, 1].real) for s in traj.states]
    re01 = [float(s.system()[0, 1].real) for s in traj.states]
    return rho11, re01, traj.stats


def _summed_matsubara_fit_bath(q, lam, gamma, beta, n_sum, k_real, t_fit, n_samples):
    """
    Fit the real channel of a densely summed Matsubara series with damped
    cosines; the single imaginary-channel exponent of the overdamped bath is
    exact and kept as is.
    """
    dense_terms, _ = matsubara_drude_lorentz(lam, gamma, beta, n_sum, combine=False)
    ts = np.linspace(0.0, t_fit, n_samples)
    target = correlation_from_terms(dense_terms, ts)
    fit = fit_correlation(ts, target.real + 0j, k_real, 0)
    terms, _ = fit_to_bath(fit, beta)
    terms = list(terms)
    terms.append(ExponentTerm("I", -lam * gamma, gamma))
    return BosonicBath(q, terms, beta), fit


def _run_spin_boson_dl(cfg, jobs):
    unit = cfg.get("energy_unit", default="dimensionless")
    if hasattr(unit, "value"):
        unit = unit.value
    delta = cfg.number("delta", unit)
    epsilon = cfg.number("epsilon", unit)
    t_max = cfg.number("t_max", unit)
    n_times = int(cfg.number("n_times", unit, default=201))
    cutoff = int(cfg.number("cutoff", unit, default=6))
    rtol = cfg.number("rtol", unit, default=1e-8)
    atol = cfg.number("atol", unit, default=1e-10)

    (bath_cfg,) = cfg.sections_named("bath")
    lam = cfg.number("lam", unit, section=bath_cfg)
    gamma = cfg.number("gamma", unit, section=bath_cfg)
    temperature = cfg.number("temperature", unit, section=bath_cfg)
    beta = 1.0 / temperature
    n_k = int(cfg.number("n_matsubara", unit, section=bath_cfg))
    n_p = int(cfg.number("n_pade", unit, section=bath_cfg, default=4))
    fit_terms = int(cfg.number("fit_terms", unit, section=bath_cfg, default=3))
    fit_n_sum = int(cfg.number("fit_n_matsubara", unit, section=bath_cfg, default=1000))

    h = epsilon / 2 * SIGMA_Z + delta / 2 * SIGMA_X
    q = SIGMA_Z
    times = np.linspace(0.0, t_max, n_times)

    mats_terms, gamma_t = matsubara_drude_lorentz(lam, gamma, beta, n_k)
    bath_plain = BosonicBath(q, mats_terms, beta)
    bath_term = BosonicBath(q, mats_terms, beta, terminator=gamma_t)
    bath_pade = BosonicBath(q, pade_drude_lorentz(lam, gamma, beta, n_p), beta)
    bath_fit, fit = _summed_matsubara_fit_bath(
        q, lam, gamma, beta, fit_n_sum, fit_terms, t_fit=10.0 / gamma, n_samples=400
    )

    variants = {
        "matsubara": (bath_plain, False),
        "terminator": (bath_term, True),
        "pade": (bath_pade, False),
        "fit": (bath_fit, False),
    }
    columns = ["t"]
    series = [times]
    stats = {}
    for name, (bath, use_term) in variants.items():
        rho11, re01, st = _spin_boson_population(
            h, bath, cutoff, use_term, times, rtol, atol
        )
        columns += [f"rho11_{name}", f"re_rho01_{name}"]
        series += [rho11, re01]
        stats[name] = st

    rows = [list(vals) for vals in zip(*series)]
    metadata = {
        "resolved": {
            "delta": delta,
            "epsilon": epsilon,
            "lam": lam,
            "gamma": gamma,
            "beta": beta,
            "n_matsubara": n_k,
            "n_pade": n_p,
            "fit_terms": fit_terms,
            "terminator": repr(gamma_t),
            "cutoff": cutoff,
            "rtol": rtol,
            "atol": atol,
        },
        "fit_rms_residual_real": fit.rms_residual_real,
        "integrator": stats,
    }
    return ResultTable(columns, rows, metadata)


def _run_spin_boson_underdamped(cfg, jobs):
    unit = "dimensionless"
    delta = cfg.number("delta", unit)
    epsilon = cfg.number("epsilon", unit)
    alpha = cfg.number("alpha", unit)
    width = cfg.number("width", unit)
    w0 = cfg.number("w0", unit)
    temperature = cfg.number("temperature", unit)
    n_k = int(cfg.number("n_matsubara", unit, default=3))
    cutoff = int(cfg.number("cutoff", unit, default=6))
    t_max = cfg.number("t_max", unit)
    n_times = int(cfg.number("n_times", unit, default=201))
    rtol = cfg.number("rtol", unit, default=1e-8)
    atol = cfg.number("atol", unit, default=1e-10)

    beta = 1.0 / temperature
    h = epsilon / 2 * SIGMA_Z + delta / 2 * SIGMA_X
    bath = BosonicBath(SIGMA_Z, matsubara_underdamped(alpha, width, w0, beta, n_k), beta)
    times = np.linspace(0.0, t_max, n_times)
    rho11, re01, stats = _spin_boson_population(
        h, bath, cutoff, False, times, rtol, atol
    )
    rows = [[t, p, c] for t, p, c in zip(times, rho11, re01)]
    metadata = {
        "resolved": {
            "delta": delta,
            "epsilon": epsilon,
            "alpha": alpha,
            "width": width,
            "w0": w0,
            "beta": beta,
            "n_matsubara": n_k,
            "cutoff": cutoff,
        },
        "integrator": stats,
    }
    return ResultTable(["t", "rho11", "re_rho01"], rows, metadata)


# ---------------------------------------------------------------------------
# Multi-site transport (site Hamiltonian from an external file)
# ---------------------------------------------------------------------------

def _run_multi_site(cfg, jobs):
    unit = cfg.get("energy_unit", default="cm^-1")
    if hasattr(unit, "value"):
        unit = unit.value
    h_file = cfg.get("hamiltonian_file").value
    base = Path(cfg.source).parent if cfg.source else Path(".")
    h_path = Path(h_file)
    if not h_path.is_absolute():
        h_path = base / h_path
    if not h_path.exists():
        raise FileNotFoundError(
            f"site Hamiltonian file {h_path} not found; supply a"
            " whitespace-delimited real matrix in the configured energy unit"
        )
    h_sites = np.loadtxt(h_path)
    if h_sites.ndim != 2 or h_sites.shape[0] != h_sites.shape[1]:
        raise ValueError("site Hamiltonian must be a square matrix")
    n_sites = h_sites.shape[0]

    lam = cfg.number("lam", unit)
    if "gamma_inv" in cfg.top:
        gamma = 1.0 / cfg.number("gamma_inv", unit)
    else:
        gamma = cfg.number("gamma", unit)
    temperature = cfg.number("temperature", unit)
    beta = 1.0 / temperature
    n_k = int(cfg.number("n_matsubara", unit, default=0))
    cutoff = int(cfg.number("cutoff", unit, default=4))
    t_max = cfg.number("t_max", unit)
    n_times = int(cfg.number("n_times", unit, default=201))
    initial_site = int(cfg.number("initial_site", unit, default=1)) - 1
    rtol = cfg.number("rtol", unit, default=1e-7)
    atol = cfg.number("atol", unit, default=1e-9)

    terms, gamma_t = matsubara_drude_lorentz(lam, gamma, beta, n_k)
    baths = []
    for i in range(n_sites):
        q = np.zeros((n_sites, n_sites), dtype=complex)
        q[i, i] = 1.0
        baths.append(BosonicBath(q, terms, beta, terminator=gamma_t))

    rhs = build_bosonic_rhs(h_sites.astype(complex), baths, cutoff, use_terminator=True)
    rho0 = np.zeros((n_sites, n_sites), dtype=complex)
    rho0[initial_site, initial_site] = 1.0
    times = np.linspace(0.0, t_max, n_times)
    traj = evolve(rhs, rho0, times, rtol=rtol, atol=atol)

    columns = ["t"] + [f"pop_{i + 1}" for i in range(n_sites)]
    rows = []
    for t, state in zip(times, traj.states):
        pops = np.real(np.diag(state.system()))
        rows.append([t] + pops.tolist())
    metadata = {
        "resolved": {
            "n_sites": n_sites,
            "lam": lam,
            "gamma": gamma,
            "beta": beta,
            "n_matsubara": n_k,
            "cutoff": cutoff,
            "terminator": repr(gamma_t),
            "hamiltonian_file": str(h_path),
        },
        "integrator": traj.stats,
    }
    return ResultTable(columns, rows, metadata)


# ---------------------------------------------------------------------------
# Two-qubit heat transport
# ---------------------------------------------------------------------------

def _heat_point(args):
    (zeta, epsilon, j12, gamma, t_hot, t_cold, n_k, cutoff) = args
    lam = zeta * j12 / 2.0
    eye = np.eye(2, dtype=complex)
    h = (
        epsilon / 2 * (np.kron(SIGMA_Z, eye) + np.kron(eye, SIGMA_Z))
        + j12
        * (
            np.kron(SIGMA_PLUS, SIGMA_PLUS.conj().T)
            + np.kron(SIGMA_PLUS.conj().T, SIGMA_PLUS)
        )
    )
    baths = []
    for q, temp in (
        (np.kron(SIGMA_X, eye), t_hot),
        (np.kron(eye, SIGMA_X), t_cold),
    ):
        beta = 1.0 / temp
        terms, gamma_t = matsubara_drude_lorentz(lam, gamma, beta, n_k)
        baths.append(BosonicBath(q, terms, beta, terminator=gamma_t))
    rhs = build_bosonic_rhs(h, baths, cutoff, use_terminator=True)
    ss = steady_state(rhs)
    return (
        heat_current(ss, rhs, 0),
        heat_current(ss, rhs, 1),
        ss.residual,
    )


def _run_heat_transport(cfg, jobs):
    unit = "dimensionless"
    epsilon = cfg.number("epsilon", unit)
    j12 = cfg.number("j12", unit)
    gamma = cfg.number("gamma", unit)
    t_hot = cfg.number("t_hot", unit)
    t_cold = cfg.number("t_cold", unit)
    n_k = int(cfg.number("n_matsubara", unit, default=2))
    cutoff = int(cfg.number("cutoff", unit, default=4))
    zeta_min = cfg.number("zeta_min", unit)
    zeta_max = cfg.number("zeta_max", unit)
    n_zeta = int(cfg.number("n_zeta", unit, default=12))

    zetas = np.geomspace(zeta_min, zeta_max, n_zeta)
    points = [
        (z, epsilon, j12, gamma, t_hot, t_cold, n_k, cutoff) for z in zetas
    ]
    results = _map_points(_heat_point, points, jobs)
    rows = [[z, j1, j2] for z, (j1, j2, _) in zip(zetas, results)]
    metadata = {
        "resolved": {
            "epsilon": epsilon,
            "j12": j12,
            "gamma": gamma,
            "t_hot": t_hot,
            "t_cold": t_cold,
            "n_matsubara": n_k,
            "cutoff": cutoff,
        },
        "steady_state_residuals": [r for (_, _, r) in results],
    }
    return ResultTable(["zeta", "j_hot", "j_cold"], rows, metadata)


# ---------------------------------------------------------------------------
# Dynamical decoupling
# ---------------------------------------------------------------------------

def _dephasing_rhs(lam, gamma, beta, n_k, cutoff, train):
    terms, gamma_t = matsubara_drude_lorentz(lam, gamma, beta, n_k)
    bath = BosonicBath(SIGMA_Z, terms, beta, terminator=gamma_t)
    drives = []
    if train is not None:
        drives.append((SIGMA_X, train.coefficient))
    h = TimeDependentHamiltonian(np.zeros((2, 2), dtype=complex), drives)
    return build_bosonic_rhs(h, [bath], cutoff, use_terminator=True)


def _plus_state():
    plus = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
    return np.outer(plus, plus.conj())


def _evolve_piecewise(rhs, rho0, times, edges, rtol, atol):
    """
    Integrate segment by segment between drive discontinuities, returning
    the coherence magnitude |rho01| at every requested time.
    """
    times = np.asarray(times, dtype=float)
    boundaries = sorted(set(float(e) for e in edges) | {times[0], times[-1]})
    boundaries = [b for b in boundaries if times[0] <= b <= times[-1]]
    coherences = np.empty(times.size)
    state = None
    idx = 0
    for a, b in zip(boundaries, boundaries[1:]):
        lower = (times >= a) if state is None else (times > a)
        grid = np.unique(np.concatenate([[a], times[lower & (times <= b)], [b]]))
        traj = evolve(
            rhs,
            rho0 if state is None else None,
            grid,
            rtol=rtol,
            atol=atol,
            initial=state,
            store="full",
        )
        state = traj.states[-1]
        for t_i, s in zip(grid, traj.states):
            if idx < times.size and abs(times[idx] - t_i) <= 1e-9 * (1.0 + abs(t_i)):
                coherences[idx] = abs(s.system()[0, 1])
                idx += 1
    if idx != times.size:
        raise RuntimeError("piecewise integration missed requested output times")
    return coherences


def _run_dynamical_decoupling(cfg, jobs):
    unit = "dimensionless"
    variant = cfg.get("variant", default="pulses")
    if hasattr(variant, "value"):
        variant = variant.value
    lam = cfg.number("lam", unit)
    temperature = cfg.number("temperature", unit)
    beta = 1.0 / temperature
    n_k = int(cfg.number("n_matsubara", unit, default=3))
    cutoff = int(cfg.number("cutoff", unit, default=2))
    n_pulses = int(cfg.number("n_pulses", unit, default=20))
    rtol = cfg.number("rtol", unit, default=1e-8)
    atol = cfg.number("atol", unit, default=1e-10)
    rho0 = _plus_state()

    if variant == "pulses":
        gamma = cfg.number("gamma", unit)
        v_fast = cfg.number("amplitude_fast", unit, default=1.0)
        v_slow = cfg.number("amplitude_slow", unit, default=0.02)
        gap = cfg.number("gap", unit, default=10.0)
        n_times = int(cfg.number("n_times", unit, default=161))

        fast = PulseTrain.equal(n_pulses, np.pi / (2 * v_fast), gap)
        t_max = fast.end
        n_slow = 0
        while True:
            cand = PulseTrain.equal(n_slow + 1, np.pi / (2 * v_slow), gap)
            if cand.end > t_max:
                break
            n_slow += 1
        slow = PulseTrain.equal(n_slow, np.pi / (2 * v_slow), gap)
        times = np.linspace(0.0, t_max, n_times)

        curves = {}
        for name, train in (("fast", fast), ("slow", slow), ("none", None)):
            rhs = _dephasing_rhs(lam, gamma, beta, n_k, cutoff, train)
            edges = train.edges(t_max) if train is not None else [0.0, t_max]
            curves[name] = _evolve_piecewise(rhs, rho0, times, edges, rtol, atol)
        rows = [
            [t, f, s, n]
            for t, f, s, n in zip(times, curves["fast"], curves["slow"], curves["none"])
        ]
        metadata = {
            "resolved": {
                "lam": lam,
                "gamma": gamma,
                "beta": beta,
                "amplitude_fast": v_fast,
                "amplitude_slow": v_slow,
                "gap": gap,
                "n_pulses_fast": n_pulses,
                "n_pulses_slow": n_slow,
                "t_max": t_max,
                "n_matsubara": n_k,
                "cutoff": cutoff,
            },
            "protocol": "all runs share t_max; the slow train fits fewer pulses",
        }
        return ResultTable(["t", "coh_fast", "coh_slow", "coh_none"], rows, metadata)

    if variant == "spacing_sweep":
        t_max = cfg.number("t_max", unit)
        amplitude = cfg.number("amplitude", unit, default=1.0)
        gamma_min = cfg.number("gamma_min", unit)
        gamma_max = cfg.number("gamma_max", unit)
        n_gamma = int(cfg.number("n_gamma", unit, default=7))
        gammas = np.geomspace(gamma_min, gamma_max, n_gamma)

        tau = np.pi / (2 * amplitude)
        gap = t_max / n_pulses - tau
        equal = PulseTrain.equal(n_pulses, tau, gap)
        udd = PulseTrain.udd(n_pulses, tau, t_max)

        points = [
            (g, lam, beta, n_k, cutoff, n_pulses, tau, gap, t_max, rtol, atol)
            for g in gammas
        ]
        results = _map_points(_dd_sweep_point, points, jobs)
        rows = [[g, e, u, n] for g, (e, u, n) in zip(gammas, results)]
        metadata = {
            "resolved": {
                "lam": lam,
                "beta": beta,
                "amplitude": amplitude,
                "tau": tau,
                "gap_equal": gap,
                "t_max": t_max,
                "n_pulses": n_pulses,
                "n_matsubara": n_k,
                "cutoff": cutoff,
                "equal_windows": equal.windows[:2],
                "udd_windows": udd.windows[:2],
            }
        }
        return ResultTable(["gamma", "coh_equal", "coh_udd", "coh_none"], rows, metadata)

    raise ValueError(f"unknown dynamical_decoupling variant {variant!r}")


def _dd_sweep_point(args):
    (gamma, lam, beta, n_k, cutoff, n_pulses, tau, gap, t_max, rtol, atol) = args
    rho0 = _plus_state()
    out = []
    equal = PulseTrain.equal(n_pulses, tau, gap)
    udd = PulseTrain.udd(n_pulses, tau, t_max)
    for train in (equal, udd, None):
        rhs = _dephasing_rhs(lam, gamma, beta, n_k, cutoff, train)
        edges = train.edges(t_max) if train is not None else [0.0, t_max]
        coh = _evolve_piecewise(rhs, rho0, np.array([0.0, t_max]), edges, rtol, atol)
        out.append(float(coh[-1]))
    return tuple(out)


# ---------------------------------------------------------------------------
# Ohmic fitting comparison
# ---------------------------------------------------------------------------

def _run_ohmic_fit(cfg, jobs):
    unit = "dimensionless"
    alpha = cfg.number("alpha", unit)
    s = cfg.number("s", unit, default=1.0)
    wc = cfg.number("wc", unit, default=1.0)
    temperature = cfg.number("temperature", unit)
    beta = 1.0 / temperature
    k_spectral = int(cfg.number("k_spectral", unit, default=4))
    k_real = int(cfg.number("k_real", unit, default=3))
    k_imag = int(cfg.number("k_imag", unit, default=3))
    n_k_spectral = int(cfg.number("spectral_n_matsubara", unit, default=1))
    delta = cfg.number("delta", unit)
    epsilon = cfg.number("epsilon", unit, default=0.0)
    cutoff = int(cfg.number("cutoff", unit, default=5))
    t_max = cfg.number("t_max", unit)
    n_times = int(cfg.number("n_times", unit, default=126))
    fit_t_max = cfg.number("fit_t_max", unit, default=15.0 / wc)
    fit_w_max = cfg.number("fit_w_max", unit, default=10.0 * wc)
    n_samples = int(cfg.number("fit_n_samples", unit, default=400))
    rtol = cfg.number("rtol", unit, default=1e-7)
    atol = cfg.number("atol", unit, default=1e-9)

    # spectral-density route
    w_grid = np.linspace(0.0, fit_w_max, n_samples)
    j_target = alpha * w_grid**s * wc ** (1 - s) * np.exp(-w_grid / wc)
    spectral_fit = fit_spectral_meier_tannor(w_grid, j_target, k_spectral)
    spec_terms, spec_residue = fit_to_bath(
        spectral_fit, beta, n_k_per_term=n_k_spectral, use_terminator=True
    )
    bath_spectral = BosonicBath(SIGMA_Z, spec_terms, beta, terminator=spec_residue)

    # correlation-function route
    t_grid = np.linspace(0.0, fit_t_max, n_samples)
    c_target = ohmic_correlation(alpha, s, wc, beta, t_grid)
    corr_fit = fit_correlation(t_grid, c_target, k_real, k_imag)
    corr_terms, _ = fit_to_bath(corr_fit, beta)
    bath_corr = BosonicBath(SIGMA_Z, corr_terms, beta)

    h = epsilon / 2 * SIGMA_Z + delta / 2 * SIGMA_X
    times = np.linspace(0.0, t_max, n_times)
    rho11_spec, _, stats_spec = _spin_boson_population(
        h, bath_spectral, cutoff, True, times, rtol, atol
    )
    rho11_corr, _, stats_corr = _spin_boson_population(
        h, bath_corr, cutoff, False, times, rtol, atol
    )

    rows = [[t, a, b] for t, a, b in zip(times, rho11_spec, rho11_corr)]
    metadata = {
        "resolved": {
            "alpha": alpha,
            "s": s,
            "wc": wc,
            "beta": beta,
            "delta": delta,
            "epsilon": epsilon,
            "cutoff": cutoff,
            "k_spectral": k_spectral,
            "k_real": k_real,
            "k_imag": k_imag,
            "spectral_n_matsubara": n_k_spectral,
            "fit_grids": {
                "t_max": fit_t_max,
                "w_max": fit_w_max,
                "n_samples": n_samples,
            },
        },
        "spectral_fit": {
            "terms": [list(t) for t in spectral_fit.terms],
            "rms_residual": spectral_fit.rms_residual,
            "terminator": repr(spec_residue),
        },
        "correlation_fit": {
            "real_terms": [list(t) for t in corr_fit.real_terms],
            "imag_terms": [list(t) for t in corr_fit.imag_terms],
            "rms_residual_real": corr_fit.rms_residual_real,
            "rms_residual_imag": corr_fit.rms_residual_imag,
        },
        "integrator": {"spectral": stats_spec, "correlation": stats_corr},
    }
    return ResultTable(
        ["t", "rho11_spectral_fit", "rho11_correlation_fit"], rows, metadata
    )


# ---------------------------------------------------------------------------
# Fermionic transport
# ---------------------------------------------------------------------------

def _siam_point(args):
    (bias, epsilon, eta, width, beta, l_max, cutoff) = args
    c_op = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    h = epsilon * (c_op.conj().T @ c_op)
    mu_l, mu_r = bias / 2.0, -bias / 2.0
    baths = [
        pade_lorentzian_bath(eta, width, mu_l, beta, l_max, c_op),
        pade_lorentzian_bath(eta, width, mu_r, beta, l_max, c_op),
    ]
    rhs = build_fermionic_rhs(h, baths, cutoff)
    ss = steady_state(rhs)
    heom = electronic_current(ss, rhs, 1)  # current into the drain lead
    analytic = landauer_current(
        LandauerSpec(epsilon, (eta, width, mu_l), (eta, width, mu_r), beta)
    )
    return heom, analytic, ss.residual


def _run_siam_iv(cfg, jobs):
    unit = cfg.get("energy_unit", default="eV")
    if hasattr(unit, "value"):
        unit = unit.value
    epsilon = cfg.number("epsilon", unit)
    eta = cfg.number("eta", unit)
    width = cfg.number("width", unit)
    temperature = cfg.number("temperature", unit)
    beta = 1.0 / temperature
    l_max = int(cfg.number("l_max", unit, default=10))
    cutoff = int(cfg.number("cutoff", unit, default=2))
    bias_min = cfg.number("bias_min", unit)
    bias_max = cfg.number("bias_max", unit)
    n_bias = int(cfg.number("n_bias", unit, default=15))

    biases = np.linspace(bias_min, bias_max, n_bias)
    points = [(b, epsilon, eta, width, beta, l_max, cutoff) for b in biases]
    results = _map_points(_siam_point, points, jobs)
    rows = [[b, i_h, i_a] for b, (i_h, i_a, _) in zip(biases, results)]
    metadata = {
        "resolved": {
            "epsilon": epsilon,
            "eta": eta,
            "width": width,
            "beta": beta,
            "l_max": l_max,
            "cutoff": cutoff,
        },
        "steady_state_residuals": [r for (_, _, r) in results],
    }
    return ResultTable(["bias", "current_heom", "current_landauer"], rows, metadata)


def vibronic_system(epsilon, mode_energy, coupling, n_fock):
    """
    Resonant level with an explicit vibronic mode in a truncated Fock space:
    ``H = eps c^dag c + Om a^dag a + lam (a + a^dag) c^dag c`` on the
    ``2 * n_fock``-dimensional product space; the annihilator is extended by
    the identity on the mode.
    """
    if n_fock < 1:
        raise ValueError("n_fock must be at least 1")
    c2 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    occupancy = c2.conj().T @ c2
    a = np.diag(np.sqrt(np.arange(1, n_fock)), k=1).astype(complex)
    eye_mode = np.eye(n_fock, dtype=complex)
    eye_imp = np.eye(2, dtype=complex)
    h = (
        epsilon * np.kron(occupancy, eye_mode)
        + mode_energy * np.kron(eye_imp, a.conj().T @ a)
        + coupling * np.kron(occupancy, a + a.conj().T)
    )
    c_full = np.kron(c2, eye_mode)
    return h, c_full


def _vibronic_point(args):
    (bias, epsilon, mode_energy, coupling, eta, width, beta, n_fock, l_max, cutoff) = args
    h, c_op = vibronic_system(epsilon, mode_energy, coupling, n_fock)
    mu_l, mu_r = bias / 2.0, -bias / 2.0
    baths = [
        pade_lorentzian_bath(eta, width, mu_l, beta, l_max, c_op),
        pade_lorentzian_bath(eta, width, mu_r, beta, l_max, c_op),
    ]
    rhs = build_fermionic_rhs(h, baths, cutoff)
    ss = steady_state(rhs)
    return electronic_current(ss, rhs, 1), ss.residual


def _run_vibronic_iv(cfg, jobs):
    unit = cfg.get("energy_unit", default="eV")
    if hasattr(unit, "value"):
        unit = unit.value
    epsilon = cfg.number("epsilon", unit)
    mode_energy = cfg.number("mode_energy", unit)
    coupling = cfg.number("mode_coupling", unit)
    eta = cfg.number("eta", unit)
    width = cfg.number("width", unit)
    temperature = cfg.number("temperature", unit)
    beta = 1.0 / temperature
    n_fock = int(cfg.number("n_fock", unit, default=12))
    l_max = int(cfg.number("l_max", unit, default=3))
    cutoff = int(cfg.number("cutoff", unit, default=2))
    bias_min = cfg.number("bias_min", unit)
    bias_max = cfg.number("bias_max", unit)
    n_bias = int(cfg.number("n_bias", unit, default=6))

    biases = np.linspace(bias_min, bias_max, n_bias)
    points = [
        (b, epsilon, mode_energy, coupling, eta, width, beta, n_fock, l_max, cutoff)
        for b in biases
    ]
    results = _map_points(_vibronic_point, points, jobs)
    rows = [[b, i] for b, (i, _) in zip(biases, results)]
    metadata = {
        "resolved": {
            "epsilon": epsilon,
            "mode_energy": mode_energy,
            "mode_coupling": coupling,
            "eta": eta,
            "width": width,
            "beta": beta,
            "n_fock": n_fock,
            "l_max": l_max,
            "cutoff": cutoff,
        },
        "steady_state_residuals": [r for (_, r) in results],
    }
    return ResultTable(["bias", "current"], rows, metadata)


SCENARIOS = {
    "spin_boson_dl": _run_spin_boson_dl,
    "spin_boson_strong": _run_spin_boson_dl,
    "spin_boson_underdamped": _run_spin_boson_underdamped,
    "multi_site_transport": _run_multi_site,
    "heat_transport_sweep": _run_heat_transport,
    "dynamical_decoupling": _run_dynamical_decoupling,
    "ohmic_fit": _run_ohmic_fit,
    "siam_iv": _run_siam_iv,
    "vibronic_iv": _run_vibronic_iv,
}


def run_scenario(cfg, out_dir=".", jobs=1):
    """
    Run a parsed :class:`~heomkit.config.ScenarioConfig` and write
    ``<prefix>.csv`` and ``<prefix>.meta.json`` into ``out_dir``.  Returns
    the two paths.
    """
    if cfg.scenario not in SCENARIOS:
        raise ValueError(
            f"unknown scenario {cfg.scenario!r}; expected one of"
            f" {sorted(SCENARIOS)}"
        )
    started = time.time()
    table = SCENARIOS[cfg.scenario](cfg, jobs)
    elapsed = time.time() - started

    prefix = cfg.get("out_prefix", default=None)
    prefix = prefix.value if hasattr(prefix, "value") else (prefix or cfg.scenario)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{prefix}.csv"
    meta_path = out_dir / f"{prefix}.meta.json"

    table.metadata.setdefault("scenario", cfg.scenario)
    table.metadata.setdefault("config", cfg.echo())
    table.metadata.setdefault("versions", {
        "heomkit": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
    })
    table.metadata.setdefault("runtime_seconds", elapsed)
    table.metadata.setdefault("jobs", jobs)

    table.write_csv(csv_path)
    table.write_metadata(meta_path)
    return csv_path, meta_path
