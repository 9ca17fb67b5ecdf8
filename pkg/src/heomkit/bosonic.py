"""
Assembly of the bosonic hierarchy generator.

For a label ``n`` (one integer per exponent) the stacked equations of
motion read

    d rho^n / dt = (L - sum_jk n_jk gamma_jk) rho^n
                   - i sum_k c_k^R n_Rk [Q, rho^{n_Rk-}]
                   + sum_k c_k^I n_Ik {Q, rho^{n_Ik-}}
                   - i sum_jk [Q, rho^{n_jk+}],

with ``L`` the system Liouvillian, optionally augmented by the
Tanimura-terminator Lindblad correction of each bath.  Merged RI exponents
contribute both the commutator and anticommutator lowering pieces through a
single index.  ADOs are stored unscaled, exactly as generated by the
repeated time derivatives; bath observables read level-1 ADOs directly.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import operators as ops
from .baths import BosonicBath, ExponentTerm
from .generator import HeomRHS, HierarchyExponent
from .hierarchy import enumerate_space

__all__ = [
    "TimeDependentHamiltonian",
    "merge_exponents",
    "build_bosonic_rhs",
]


@dataclass
class TimeDependentHamiltonian:
    """
    Static Hamiltonian plus drive terms ``sum_j f_j(t) H_j``.  Drive
    coefficient functions must be pure functions of ``t``; the integrator
    evaluates them at arbitrary trial times.
    """

    static: np.ndarray
    drives: list = field(default_factory=list)

    def __post_init__(self):
        self.static = np.asarray(self.static, dtype=complex)
        if not ops.is_hermitian(self.static):
            raise ValueError("static Hamiltonian must be hermitian")
        for h_d, coeff in self.drives:
            h_d = np.asarray(h_d, dtype=complex)
            if h_d.shape != self.static.shape:
                raise ValueError("drive operators must match the static dimension")
            if not ops.is_hermitian(h_d):
                raise ValueError("drive operators must be hermitian")
            if not callable(coeff):
                raise ValueError("drive coefficients must be callables of t")


def merge_exponents(baths, rtol=1e-12):
    """
    Merge, within each bath, R and I exponents whose rates agree to
    relative tolerance ``rtol`` into single RI exponents.  Degenerate rates
    within the R list alone (or the I list alone) are left untouched.
    """
    merged_baths = []
    for bath in baths:
        real_terms = [t for t in bath.terms if t.kind == "R"]
        imag_terms = [t for t in bath.terms if t.kind == "I"]
        other = [t for t in bath.terms if t.kind == "RI"]

        used = [False] * len(imag_terms)
        merged = []
        for r_term in real_terms:
            partner = None
            for j, i_term in enumerate(imag_terms):
                if used[j]:
                    continue
                scale = max(abs(r_term.rate), abs(i_term.rate))
                if abs(r_term.rate - i_term.rate) <= rtol * scale:
                    partner = j
                    break
            if partner is None:
                merged.append(r_term)
            else:
                used[partner] = True
                merged.append(
                    ExponentTerm(
                        "RI",
                        r_term.coeff,
                        r_term.rate,
                        coeff2=imag_terms[partner].coeff,
                    )
                )
        merged.extend(t for j, t in enumerate(imag_terms) if not used[j])
        merged.extend(other)
        merged_baths.append(
            BosonicBath(bath.coupling, merged, bath.beta, terminator=bath.terminator)
        )
    return merged_baths


class _BlockAssembler:
    """Accumulates d^2 x d^2 blocks into one sparse generator."""

    def __init__(self, n_blocks, block_dim):
        self.n = n_blocks
        self.d2 = block_dim
        self.rows = []
        self.cols = []
        self.data = []

    def add(self, row_block, col_block, coo_block, scale=1.0):
        self.rows.append(coo_block.row + row_block * self.d2)
        self.cols.append(coo_block.col + col_block * self.d2)
        self.data.append(coo_block.data * scale)

    def tocsr(self):
        size = self.n * self.d2
        if not self.data:
            return sp.csr_matrix((size, size), dtype=complex)
        mat = sp.coo_matrix(
            (
                np.concatenate(self.data),
                (np.concatenate(self.rows), np.concatenate(self.cols)),
            ),
            shape=(size, size),
        )
        return mat.tocsr()


def build_bosonic_rhs(h, baths, cutoff, use_terminator=False, max_labels=2_000_000):
    """
    Construct the constant block-sparse generator (plus drive blocks) for a
    set of decomposed bosonic baths truncated at total level ``cutoff``.

    ``h`` may be a plain hermitian matrix or a
    :class:`TimeDependentHamiltonian`.  With ``use_terminator=True`` every
    bath carrying a terminator coefficient contributes the Lindblad
    correction ``gamma_T (2 Q . Q - Q^2 . - . Q^2)`` to the Liouvillian.
    """
    if not isinstance(h, TimeDependentHamiltonian):
        h = TimeDependentHamiltonian(np.asarray(h, dtype=complex))
    dim = h.static.shape[0]

    exponents = []
    for bath_index, bath in enumerate(baths):
        q = np.asarray(bath.coupling, dtype=complex)
        if q.shape != (dim, dim):
            raise ValueError(
                f"bath {bath_index} coupling has shape {q.shape}, expected {(dim, dim)}"
            )
        if not ops.is_hermitian(q):
            raise ValueError(f"bath {bath_index} coupling operator must be hermitian")
        for i, term in enumerate(bath.terms):
            exponents.append(
                HierarchyExponent(
                    bath=bath_index,
                    channel=term.kind,
                    index=i,
                    rate=complex(term.rate),
                    coeff=complex(term.coeff),
                    coeff2=None if term.coeff2 is None else complex(term.coeff2),
                )
            )

    space = enumerate_space("bosonic", max(len(exponents), 1), cutoff, max_labels)
    d2 = dim * dim

    liouv = ops.liouvillian(h.static)
    if use_terminator:
        for bath in baths:
            if bath.terminator is not None:
                liouv = liouv + ops.lindblad_dissipator(bath.coupling, bath.terminator)
    liouv = sp.coo_matrix(liouv)
    eye = sp.coo_matrix(sp.identity(d2, format="csr", dtype=complex))

    # Per-exponent coupling blocks; the lowering block is later scaled by n_k.
    commutators = []
    lowering = []
    raising = []
    for exp, bath in ((e, baths[e.bath]) for e in exponents):
        comm = ops.commutator_super(bath.coupling)
        anti = ops.anticommutator_super(bath.coupling)
        if exp.channel == "R":
            low = -1j * exp.coeff * comm
        elif exp.channel == "I":
            low = exp.coeff * anti
        else:
            low = -1j * exp.coeff * comm + exp.coeff2 * anti
        commutators.append(comm)
        lowering.append(sp.coo_matrix(low))
        raising.append(sp.coo_matrix(-1j * comm))

    rates = np.array([exp.rate for exp in exponents] or [0.0])
    assembler = _BlockAssembler(len(space), d2)
    for offset, label in enumerate(space.labels):
        decay = np.dot(label, rates)
        assembler.add(offset, offset, liouv)
        if decay != 0:
            assembler.add(offset, offset, eye, scale=-decay)
        for k in range(len(exponents)):
            down = space.prev(label, k)
            if down is not None:
                assembler.add(offset, space.index(down), lowering[k], scale=label[k])
            up = space.next(label, k)
            if up is not None:
                assembler.add(offset, space.index(up), raising[k])

    drive_blocks = [
        (ops.liouvillian(h_drive), coeff) for h_drive, coeff in h.drives
    ]

    return HeomRHS(
        space=space,
        dim=dim,
        constant=assembler.tocsr(),
        exponents=exponents,
        drives=drive_blocks,
        h_static=h.static,
        baths=list(baths),
        statistics="bosonic",
        use_terminator=use_terminator,
    )
