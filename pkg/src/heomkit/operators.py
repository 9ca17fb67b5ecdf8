"""
Complex operators and the superoperator constructions used by the
hierarchy generators.

All superoperators act on column-stacked vectorizations,

    vec(A)[i + d*j] = A[i, j],

so that left multiplication by ``Q`` is ``kron(I, Q)`` and right
multiplication is ``kron(Q.T, I)``.  Superoperators are returned as sparse
CSR matrices regardless of dimension; call ``.toarray()`` for small dense
checks.
"""

import numpy as np
import scipy.sparse as sp

__all__ = [
    "vectorize",
    "devectorize",
    "left_mul_super",
    "right_mul_super",
    "commutator_super",
    "anticommutator_super",
    "lindblad_dissipator",
    "liouvillian",
    "is_hermitian",
]


def _as_square(op, name="operator"):
    """Return ``op`` as a dense complex square array, validating it."""
    if sp.issparse(op):
        op = op.toarray()
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {op.shape}")
    if not np.all(np.isfinite(op.real)) or not np.all(np.isfinite(op.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return op


def is_hermitian(op, tol=1e-12):
    op = _as_square(op)
    scale = max(1.0, np.abs(op).max())
    return np.abs(op - op.conj().T).max() <= tol * scale


def vectorize(op):
    """Column-stack a square operator into a vector of length ``dim**2``."""
    op = _as_square(op)
    return op.reshape(-1, order="F").copy()


def devectorize(vec):
    """Inverse of :func:`vectorize`; the dimension is inferred."""
    vec = np.asarray(vec, dtype=complex).ravel()
    dim = int(round(np.sqrt(vec.size)))
    if dim * dim != vec.size:
        raise ValueError(f"vector of length {vec.size} is not a stacked square matrix")
    return vec.reshape((dim, dim), order="F").copy()


def left_mul_super(q):
    """Superoperator for ``rho -> q @ rho``."""
    q = _as_square(q)
    dim = q.shape[0]
    return sp.kron(sp.identity(dim, format="csr"), sp.csr_matrix(q), format="csr")


def right_mul_super(q):
    """Superoperator for ``rho -> rho @ q``."""
    q = _as_square(q)
    dim = q.shape[0]
    return sp.kron(sp.csr_matrix(q.T), sp.identity(dim, format="csr"), format="csr")


def commutator_super(q):
    """Superoperator for ``rho -> q @ rho - rho @ q``."""
    return (left_mul_super(q) - right_mul_super(q)).tocsr()


def anticommutator_super(q):
    """Superoperator for ``rho -> q @ rho + rho @ q``."""
    return (left_mul_super(q) + right_mul_super(q)).tocsr()


def lindblad_dissipator(q, rate=1.0):
    """
    Superoperator ``rate * (2 q rho q^dag - q^dag q rho - rho q^dag q)``.

    ``rate`` may be complex; complex rates arise from truncation residues of
    exponential bath decompositions (the Tanimura terminator).
    """
    q = _as_square(q)
    qdq = q.conj().T @ q
    sandwich = sp.kron(sp.csr_matrix(q.conj()), sp.csr_matrix(q), format="csr")
    op = 2.0 * sandwich - left_mul_super(qdq) - right_mul_super(qdq)
    return (complex(rate) * op).tocsr()


def liouvillian(h):
    """Unitary generator ``rho -> -i [h, rho]`` as a superoperator."""
    return (-1j * commutator_super(h)).tocsr()
