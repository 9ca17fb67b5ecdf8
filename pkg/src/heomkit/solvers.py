"""
Time evolution of the stacked ADO vector and direct steady-state solution.

Evolution uses an adaptive embedded Runge-Kutta 5(4) pair with states
interpolated onto the requested output times.  The steady state is found by
replacing one row of the generator with the trace functional on the system
block and solving the resulting sparse linear system.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate
import scipy.sparse as sp
import scipy.sparse.linalg

from .operators import devectorize, vectorize

__all__ = ["HierarchyState", "Trajectory", "evolve", "steady_state"]

# Trajectories beyond this many stored complex entries keep only the
# system block and the level-1 ADOs (sufficient for all bath observables).
DEFAULT_STORE_BUDGET = 20_000_000


@dataclass
class HierarchyState:
    """
    Stacked hierarchy state: the system density matrix at the zero label
    plus all (or, in memory-limited mode, only the level-1) ADOs.
    """

    space: object
    dim: int
    data: np.ndarray
    n_stored: int = None
    residual: float = field(default=None, compare=False)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex).ravel()
        if self.n_stored is None:
            self.n_stored = len(self.space)
        if self.data.size != self.n_stored * self.dim**2:
            raise ValueError(
                f"state vector of length {self.data.size} does not hold"
                f" {self.n_stored} blocks of size {self.dim**2}"
            )

    @property
    def truncated(self):
        return self.n_stored < len(self.space)

    def system(self):
        """System density matrix (the zero-label block)."""
        return devectorize(self.data[: self.dim**2])

    def ado(self, label):
        """The d x d auxiliary operator stored at ``label``."""
        offset = self.space.index(label)
        if offset >= self.n_stored:
            raise KeyError(
                f"ADO {label!r} was not retained (memory-limited trajectory"
                " stores levels 0 and 1 only)"
            )
        d2 = self.dim**2
        return devectorize(self.data[offset * d2 : (offset + 1) * d2])


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    stats: dict


def _validate_rho0(rho0, dim, tol=1e-10):
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (dim, dim):
        raise ValueError(f"initial state has shape {rho0.shape}, expected {(dim, dim)}")
    if np.abs(rho0 - rho0.conj().T).max() > tol:
        raise ValueError("initial state must be hermitian")
    if abs(np.trace(rho0) - 1.0) > tol:
        raise ValueError("initial state must have unit trace")
    if np.linalg.eigvalsh(rho0).min() < -tol:
        raise ValueError("initial state must be positive semidefinite")
    return rho0


def evolve(
    rhs,
    rho0,
    times,
    rtol=1e-6,
    atol=1e-8,
    store="auto",
    initial=None,
    max_step=np.inf,
    store_budget=DEFAULT_STORE_BUDGET,
):
    """
    Integrate the hierarchy from a product initial condition (``rho0`` at
    the zero label, every ADO zero) or from a full stacked state
    (``initial``), returning states at the requested ``times``.

    ``store`` selects what each snapshot keeps: ``"full"`` retains every
    ADO, ``"level1"`` only the system block plus level-1 ADOs, and
    ``"auto"`` switches to ``"level1"`` when the full trajectory would
    exceed ``store_budget`` complex entries.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 1:
        raise ValueError("times must be a non-empty 1-d array")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly ascending")
    if times[0] < 0:
        raise ValueError("times must start at t >= 0")

    size = rhs.size
    if initial is not None:
        if initial.truncated:
            raise ValueError("cannot restart from a truncated hierarchy state")
        y0 = np.asarray(initial.data, dtype=complex).copy()
        if y0.size != size:
            raise ValueError("initial hierarchy state does not match the generator")
    else:
        rho0 = _validate_rho0(rho0, rhs.dim)
        y0 = np.zeros(size, dtype=complex)
        y0[: rhs.dim**2] = vectorize(rho0)

    if store == "auto":
        store = "full" if size * times.size <= store_budget else "level1"
    if store not in ("full", "level1"):
        raise ValueError(f"unknown store mode {store!r}")
    if store == "full":
        n_keep = len(rhs.space)
    else:
        # levels 0 and 1 occupy a contiguous prefix of the enumeration
        n_keep = 1 + (rhs.space.n_exponents if rhs.space.cutoff >= 1 else 0)
    keep_size = n_keep * rhs.dim**2

    result = scipy.integrate.solve_ivp(
        rhs.apply,
        (times[0], times[-1]),
        y0,
        method="RK45",
        t_eval=times,
        rtol=rtol,
        atol=atol,
        max_step=max_step,
    )
    if not result.success:
        raise RuntimeError(
            f"hierarchy integration failed at t={result.t[-1] if result.t.size else times[0]}:"
            f" {result.message}"
        )
    if not np.all(np.isfinite(result.y)):
        raise RuntimeError("hierarchy integration produced non-finite state")

    states = [
        HierarchyState(rhs.space, rhs.dim, result.y[:keep_size, i].copy(), n_stored=n_keep)
        for i in range(times.size)
    ]
    # RK45 spends six new evaluations per attempted step (plus the initial one)
    stats = {
        "rhs_evaluations": result.nfev,
        "estimated_attempted_steps": max(int(round((result.nfev - 1) / 6)), 1),
        "store": store,
    }
    return Trajectory(times=times, states=states, stats=stats)


def steady_state(rhs, constraint_row=None, residual_tol=1e-10):
    """
    Solve ``L x = 0`` with ``Tr[system block] = 1`` by replacing one row of
    the generator with the trace functional.  By default the replaced row is
    the one with the largest diagonal magnitude; the solution is invariant
    under this choice whenever the kernel of ``L`` is one-dimensional.
    """
    if rhs.is_time_dependent:
        raise ValueError("steady_state requires a time-independent generator")

    size = rhs.size
    dim = rhs.dim
    lmat = rhs.constant.tocsr()

    # Trace preservation makes the system-block diagonal rows linearly
    # dependent; exactly one of them may be traded for the constraint.
    trace_cols = np.arange(dim) * (dim + 1)
    if constraint_row is None:
        diag = np.abs(lmat.diagonal()[trace_cols])
        constraint_row = int(trace_cols[np.argmax(diag)])
    elif constraint_row not in trace_cols:
        raise ValueError(
            "constraint_row must be one of the system-block diagonal rows"
        )
    lil = lmat.tolil(copy=True)
    lil.rows[constraint_row] = trace_cols.tolist()
    lil.data[constraint_row] = [1.0 + 0.0j] * dim
    modified = lil.tocsr()

    b = np.zeros(size, dtype=complex)
    b[constraint_row] = 1.0

    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.sparse.linalg.MatrixRankWarning)
        try:
            x = scipy.sparse.linalg.spsolve(modified.tocsc(), b)
        except (scipy.sparse.linalg.MatrixRankWarning, RuntimeError) as err:
            raise RuntimeError(
                "steady-state solve is singular or rank-deficient; the"
                " generator kernel is not one-dimensional (try increasing"
                f" the hierarchy cutoff): {err}"
            ) from err

    l_inf = np.abs(lmat).sum(axis=1).max()
    residual = float(np.abs(lmat @ x).max())
    if not np.all(np.isfinite(x)) or residual > residual_tol * l_inf:
        raise RuntimeError(
            f"steady-state residual {residual:.3e} exceeds {residual_tol:.1e} *"
            f" ||L||_inf = {residual_tol * l_inf:.3e}; the kernel may be"
            " degenerate (try increasing the hierarchy cutoff)"
        )
    return HierarchyState(rhs.space, dim, x, residual=residual)
