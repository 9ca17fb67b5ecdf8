"""
Block-sparse hierarchy generators.

A :class:`HeomRHS` owns the constant part of the stacked-ADO generator, an
optional list of time-dependent diagonal drive blocks, and the flattened
exponent metadata needed to address individual auxiliary density operators
(bath index, channel, position within the bath).
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

__all__ = ["HierarchyExponent", "HeomRHS"]


@dataclass(frozen=True)
class HierarchyExponent:
    """
    One flattened hierarchy exponent.

    ``channel`` is ``"R"``, ``"I"`` or ``"RI"`` for bosonic exponents and
    ``"+"`` or ``"-"`` for fermionic ones.  ``index`` is the position of the
    exponent within its bath channel list and ``pair`` the flat offset of
    the conjugate-sigma partner (fermionic only).
    """

    bath: int
    channel: str
    index: int
    rate: complex
    coeff: complex
    coeff2: complex = None
    pair: int = None


@dataclass
class HeomRHS:
    """
    Generator of the stacked ADO vector: ``dy/dt = constant @ y +
    sum_j f_j(t) * kron(I, drive_j) @ y``.
    """

    space: object
    dim: int
    constant: sp.csr_matrix
    exponents: list
    drives: list = field(default_factory=list)
    h_static: np.ndarray = None
    baths: list = field(default_factory=list)
    statistics: str = "bosonic"
    use_terminator: bool = False
    _expanded_drives: list = field(default_factory=list, repr=False)

    @property
    def n_ados(self):
        return len(self.space)

    @property
    def size(self):
        return self.n_ados * self.dim**2

    @property
    def is_time_dependent(self):
        return bool(self.drives)

    def _drive_matrices(self):
        if self.drives and not self._expanded_drives:
            eye = sp.identity(self.n_ados, format="csr")
            self._expanded_drives = [
                sp.kron(eye, block, format="csr") for block, _ in self.drives
            ]
        return self._expanded_drives

    def apply(self, t, y):
        """Evaluate the generator at time ``t`` on a stacked state vector."""
        out = self.constant @ y
        for expanded, (_, coeff) in zip(self._drive_matrices(), self.drives):
            out = out + coeff(t) * (expanded @ y)
        return out

    def flat_index(self, bath, channel, index):
        """
        Flat exponent offset for ``(bath, channel, index)``.  For bosonic
        lookups a request for channel ``"R"`` or ``"I"`` also matches a
        merged ``"RI"`` exponent.
        """
        for k, exp in enumerate(self.exponents):
            if exp.bath != bath or exp.index != index:
                continue
            if exp.channel == channel:
                return k
            if exp.channel == "RI" and channel in ("R", "I"):
                return k
        raise KeyError(f"no exponent with bath={bath}, channel={channel!r}, index={index}")

    def level1_label(self, flat_k):
        """Label of the level-1 ADO excited in exponent ``flat_k``."""
        label = [0] * len(self.exponents)
        label[flat_k] = 1
        return tuple(label)

    def bath_exponents(self, bath):
        """Flat offsets of all exponents belonging to ``bath``."""
        return [k for k, exp in enumerate(self.exponents) if exp.bath == bath]
