"""
Assembly of the fermionic hierarchy generator and the Pade decomposition of
Lorentzian reservoirs.

Fermionic ADO labels are ordered lists of occupied multi-indices
``j = (K, sigma, l)``; occupation is binary.  Because the environment
operators anticommute, raising and lowering couplings carry parity signs:
a new index enters at the left of the list and is moved to its canonical
position (baths ascending, sigma ``+`` before ``-``, ``l`` ascending),
crossing every occupied index stored before it.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import operators as ops
from .bosonic import _BlockAssembler
from .baths import _pade_kappa_epsilon
from .generator import HeomRHS, HierarchyExponent
from .hierarchy import enumerate_space, fermionic_insertion_parity

__all__ = [
    "FermionicBath",
    "PadePoles",
    "pade_poles",
    "pade_lorentzian_bath",
    "build_fermionic_rhs",
]


@dataclass
class FermionicBath:
    """
    A decomposed fermionic reservoir.

    ``coupling`` is the system-space annihilator ``c`` the reservoir
    attaches to (need not be hermitian).  ``plus_terms`` and ``minus_terms``
    are matched lists of ``(eta, gamma)`` pairs for the two correlation
    functions ``C^sigma(t) = sum_l eta_{sigma,l} exp(-gamma_{sigma,l} t)``.
    """

    coupling: np.ndarray
    plus_terms: list
    minus_terms: list
    mu: float
    beta: float

    def __post_init__(self):
        self.coupling = np.asarray(self.coupling, dtype=complex)
        if len(self.plus_terms) != len(self.minus_terms):
            raise ValueError("plus and minus term lists must have equal length")
        if not self.plus_terms:
            raise ValueError("bath must carry at least one exponential term")
        for eta, gamma in list(self.plus_terms) + list(self.minus_terms):
            if not complex(gamma).real > 0:
                raise ValueError(f"exponent rate must decay, got {gamma}")
        if not self.beta > 0:
            raise ValueError("beta must be positive")


@dataclass(frozen=True)
class PadePoles:
    """Residues ``k_l`` and poles ``eps_l`` of the Fermi-function approximant."""

    k: tuple
    eps: tuple

    def fermi_approx(self, x):
        """``f_F(x) ~ 1/2 - sum_l 2 k_l x / (x^2 + eps_l^2)``."""
        x = np.asarray(x, dtype=complex)
        f = 0.5 * np.ones(x.shape, dtype=complex)
        for k_l, e_l in zip(self.k, self.eps):
            f = f - 2 * k_l * x / (x**2 + e_l**2)
        return f if f.shape else complex(f)


def pade_poles(l_max):
    """
    [N-1/N] Pade approximant of the Fermi distribution via the tridiagonal
    eigenvalue construction; ``eps`` is strictly increasing.
    """
    if l_max < 1:
        raise ValueError("l_max must be at least 1")
    kappa, eps = _pade_kappa_epsilon(l_max, diag_shift=0)
    order = np.argsort(eps)
    return PadePoles(
        k=tuple(kappa[i] for i in order),
        eps=tuple(eps[i] for i in order),
    )


def pade_lorentzian_bath(eta, width, mu, beta, l_max, coupling):
    """
    Pade decomposition of a Lorentzian reservoir
    ``J(w) = eta W^2 / ((w - mu)^2 + W^2)``:

        eta_0       = (eta W / 2) f_F^approx(i beta W),
        gamma_s0    = W - s i mu,
        eta_l       = -i (k_l / beta) eta W^2 / (W^2 - (eps_l / beta)^2),
        gamma_sl    = eps_l / beta - s i mu.

    The coefficients are shared by both signs; only the rates pick up the
    chemical-potential phase.
    """
    if not (eta > 0 and width > 0 and beta > 0):
        raise ValueError("eta, width and beta must be positive")
    poles = pade_poles(l_max)

    for e_l in poles.eps:
        if abs(e_l / beta - width) < 1e-12 * max(width, 1.0):
            raise ValueError(
                "reservoir width coincides with a Pade pole; perturb the width"
            )

    eta0 = 0.5 * eta * width * poles.fermi_approx(1j * beta * width)
    etas = [eta0]
    rates_plus = [width - 1j * mu]
    rates_minus = [width + 1j * mu]
    for k_l, e_l in zip(poles.k, poles.eps):
        etas.append(-1j * (k_l / beta) * eta * width**2 / (width**2 - (e_l / beta) ** 2))
        rates_plus.append(e_l / beta - 1j * mu)
        rates_minus.append(e_l / beta + 1j * mu)

    return FermionicBath(
        coupling=coupling,
        plus_terms=list(zip(etas, rates_plus)),
        minus_terms=list(zip(etas, rates_minus)),
        mu=mu,
        beta=beta,
    )


def build_fermionic_rhs(h, baths, cutoff, max_labels=2_000_000, exponent_order=None):
    """
    Construct the fermionic hierarchy generator.

    For a label of level ``n`` the couplings implement

        raising:  -i parity [ c^{sbar} rho + (-1)^(n+1) rho c^{sbar} ],
        lowering: -i parity [ eta_s c^s rho - (-1)^(n+1) eta_{sbar}^* rho c^s ],

    with ``c^+ = c^dag``, ``c^- = c``, and ``parity`` the insertion sign of
    the affected index against the occupied indices before it.

    ``exponent_order`` optionally permutes the flattened exponent list; it
    exists so tests can verify that physical dynamics do not depend on the
    canonical ordering.
    """
    h = np.asarray(h, dtype=complex)
    if not ops.is_hermitian(h):
        raise ValueError("system Hamiltonian must be hermitian")
    dim = h.shape[0]

    exponents = []
    for bath_index, bath in enumerate(baths):
        c = np.asarray(bath.coupling, dtype=complex)
        if c.shape != (dim, dim):
            raise ValueError(
                f"bath {bath_index} coupling has shape {c.shape}, expected {(dim, dim)}"
            )
        n_l = len(bath.plus_terms)
        base = len(exponents)
        for l, (eta_l, gamma_l) in enumerate(bath.plus_terms):
            exponents.append(
                HierarchyExponent(
                    bath=bath_index,
                    channel="+",
                    index=l,
                    rate=complex(gamma_l),
                    coeff=complex(eta_l),
                    pair=base + n_l + l,
                )
            )
        for l, (eta_l, gamma_l) in enumerate(bath.minus_terms):
            exponents.append(
                HierarchyExponent(
                    bath=bath_index,
                    channel="-",
                    index=l,
                    rate=complex(gamma_l),
                    coeff=complex(eta_l),
                    pair=base + l,
                )
            )

    if exponent_order is not None:
        if sorted(exponent_order) != list(range(len(exponents))):
            raise ValueError("exponent_order must be a permutation")
        inverse = {old: new for new, old in enumerate(exponent_order)}
        reordered = []
        for new_pos, old in enumerate(exponent_order):
            exp = exponents[old]
            reordered.append(
                HierarchyExponent(
                    bath=exp.bath,
                    channel=exp.channel,
                    index=exp.index,
                    rate=exp.rate,
                    coeff=exp.coeff,
                    pair=inverse[exp.pair],
                )
            )
        exponents = reordered

    space = enumerate_space("fermionic", len(exponents), cutoff, max_labels)
    d2 = dim * dim

    liouv = sp.coo_matrix(ops.liouvillian(h))
    eye = sp.coo_matrix(sp.identity(d2, format="csr", dtype=complex))

    # spre/spost of c^sigma for the exponent's own sign (lowering) and the
    # conjugate sign (raising).
    pre_own, post_own, pre_bar, post_bar = [], [], [], []
    for exp in exponents:
        c = np.asarray(baths[exp.bath].coupling, dtype=complex)
        c_sig = c.conj().T if exp.channel == "+" else c
        c_bar = c if exp.channel == "+" else c.conj().T
        pre_own.append(sp.coo_matrix(ops.left_mul_super(c_sig)))
        post_own.append(sp.coo_matrix(ops.right_mul_super(c_sig)))
        pre_bar.append(sp.coo_matrix(ops.left_mul_super(c_bar)))
        post_bar.append(sp.coo_matrix(ops.right_mul_super(c_bar)))

    rates = np.array([exp.rate for exp in exponents])
    assembler = _BlockAssembler(len(space), d2)
    for offset, label in enumerate(space.labels):
        level = sum(label)
        decay = np.dot(label, rates)
        assembler.add(offset, offset, liouv)
        if decay != 0:
            assembler.add(offset, offset, eye, scale=-decay)
        sign_level = -1.0 if (level + 1) % 2 else 1.0
        for k, exp in enumerate(exponents):
            parity = fermionic_insertion_parity(label, k)
            down = space.prev(label, k)
            if down is not None:
                col = space.index(down)
                scale = -1j * parity
                assembler.add(offset, col, pre_own[k], scale=scale * exp.coeff)
                assembler.add(
                    offset,
                    col,
                    post_own[k],
                    scale=-scale * sign_level * np.conj(exponents[exp.pair].coeff),
                )
            up = space.next(label, k)
            if up is not None:
                col = space.index(up)
                scale = -1j * parity
                assembler.add(offset, col, pre_bar[k], scale=scale)
                assembler.add(offset, col, post_bar[k], scale=scale * sign_level)

    return HeomRHS(
        space=space,
        dim=dim,
        constant=assembler.tocsr(),
        exponents=exponents,
        drives=[],
        h_static=h,
        baths=list(baths),
        statistics="fermionic",
    )
