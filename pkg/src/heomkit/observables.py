"""
Extraction of ADOs and bath-resolved observables.

Heat currents and electronic currents are linear functionals of the level-1
ADOs; both read the exponent metadata stored on the generator, so a
:class:`~heomkit.generator.HeomRHS` must accompany the state.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "AdoSelector",
    "get_ado",
    "expectation",
    "heat_current",
    "electronic_current",
]


@dataclass(frozen=True)
class AdoSelector:
    """
    Addresses one level-1 ADO by bath, channel (``"R"``/``"I"`` or
    ``"+"``/``"-"``) and exponent index within the bath.
    """

    bath: int
    channel: str
    index: int

    def resolve(self, rhs):
        return rhs.level1_label(rhs.flat_index(self.bath, self.channel, self.index))


def get_ado(state, label):
    """The d x d auxiliary operator at ``label`` (zero label: system state)."""
    return state.ado(tuple(label))


def expectation(state, op):
    """``Tr[op @ rho]`` on the system block."""
    return complex(np.trace(np.asarray(op, dtype=complex) @ state.system()))


def _commutator(a, b):
    return a @ b - b @ a


def heat_current(state, rhs, bath, imag_tol=1e-6, with_residual=False):
    """
    Energy current flowing into reservoir ``bath`` (positive values heat the
    reservoir):

        j_K = gamma_T^K Tr[[[H, Q], Q] rho] - 2 C_I^K(0) Tr[Q^2 rho]
              + sum_k gamma_k Tr[Q ado_k],

    where the sum runs over the bath's level-1 ADOs (merged exponents count
    once) and the terminator term is dropped when the generator was built
    without one.
    """
    if rhs.statistics != "bosonic":
        raise ValueError("heat_current applies to bosonic hierarchies")
    if not 0 <= bath < len(rhs.baths):
        raise ValueError(f"no bath with index {bath}")
    bath_obj = rhs.baths[bath]
    q = np.asarray(bath_obj.coupling, dtype=complex)
    rho = state.system()

    current = 0.0 + 0.0j
    if rhs.use_terminator and bath_obj.terminator is not None:
        double_comm = _commutator(_commutator(rhs.h_static, q), q)
        current += bath_obj.terminator * np.trace(double_comm @ rho)

    c_i0 = sum(
        term.coeff if term.kind == "I" else term.coeff2
        for term in bath_obj.terms
        if term.kind in ("I", "RI")
    )
    current += -2.0 * c_i0 * np.trace(q @ q @ rho)

    for k in rhs.bath_exponents(bath):
        ado = state.ado(rhs.level1_label(k))
        current += rhs.exponents[k].rate * np.trace(q @ ado)

    residual = abs(current.imag)
    if residual > imag_tol * max(1.0, abs(current.real)):
        raise RuntimeError(
            f"heat current imaginary residual {residual:.3e} is too large;"
            " the hierarchy state looks inconsistent"
        )
    if with_residual:
        return float(current.real), residual
    return float(current.real)


def electronic_current(state, rhs, lead, imag_tol=1e-6, with_residual=False):
    """
    Particle current (e = 1) through reservoir ``lead``, from the level-1
    ADOs:

        <I_K> = -i sum_l Tr[c ado_{K,+,l} - c^dag ado_{K,-,l}].

    Positive values carry particles from the system into the reservoir
    (mirroring the heat-current convention); at a biased steady state the
    drain lead therefore reports the positive transport current.
    """
    if rhs.statistics != "fermionic":
        raise ValueError("electronic_current applies to fermionic hierarchies")
    if not 0 <= lead < len(rhs.baths):
        raise ValueError(f"no lead with index {lead}")
    c = np.asarray(rhs.baths[lead].coupling, dtype=complex)
    c_dag = c.conj().T

    current = 0.0 + 0.0j
    for k in rhs.bath_exponents(lead):
        exp = rhs.exponents[k]
        ado = state.ado(rhs.level1_label(k))
        if exp.channel == "+":
            current += -1j * np.trace(c @ ado)
        else:
            current += 1j * np.trace(c_dag @ ado)

    residual = abs(current.imag)
    if residual > imag_tol * max(1.0, abs(current.real)):
        raise RuntimeError(
            f"electronic current imaginary residual {residual:.3e} is too"
            " large; the hierarchy state looks inconsistent"
        )
    if with_residual:
        return float(current.real), residual
    return float(current.real)
