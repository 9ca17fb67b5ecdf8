import numpy as np
import pytest

from heomkit import operators as ops

SZ = np.diag([1.0, -1.0]).astype(complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SM = np.array([[0, 1], [0, 0]], dtype=complex)  # lowers |1> -> |0>


def test_vectorize_identity():
    assert np.array_equal(ops.vectorize(np.eye(2)), [1, 0, 0, 1])


def test_vectorize_sigma_x():
    assert np.array_equal(ops.vectorize(SX), [0, 1, 1, 0])


def test_vectorize_round_trip_random():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert np.allclose(ops.devectorize(ops.vectorize(a)), a, atol=1e-15)


@pytest.mark.parametrize("dim", range(2, 17))
def test_round_trip_all_dims(dim):
    rng = np.random.default_rng(dim)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    assert np.allclose(ops.devectorize(ops.vectorize(a)), a, atol=1e-15)


def test_commutator_identity_is_zero_map():
    assert abs(ops.commutator_super(np.eye(3)).toarray()).max() == 0.0


def test_commutator_sz_sx():
    # [sz, sx] = 2i sy
    out = ops.devectorize(ops.commutator_super(SZ) @ ops.vectorize(SX))
    assert np.allclose(out, 2j * SY, atol=1e-15)


def test_commutator_self_is_zero():
    out = ops.commutator_super(SZ) @ ops.vectorize(SZ)
    assert abs(out).max() == 0.0


def test_anticommutator_identity_doubles():
    rng = np.random.default_rng(3)
    rho = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    out = ops.devectorize(ops.anticommutator_super(np.eye(2)) @ ops.vectorize(rho))
    assert np.allclose(out, 2 * rho, atol=1e-15)


def test_anticommutator_sz_sz():
    out = ops.devectorize(ops.anticommutator_super(SZ) @ ops.vectorize(SZ))
    assert np.allclose(out, 2 * np.eye(2), atol=1e-15)


def test_anticommutator_sz_sx_vanishes():
    out = ops.anticommutator_super(SZ) @ ops.vectorize(SX)
    assert abs(out).max() == 0.0


def test_left_right_mul():
    ket0 = np.zeros(2, dtype=complex)
    ket0[0] = 1.0
    rho = np.outer(ket0, ket0.conj())
    left = ops.devectorize(ops.left_mul_super(SX) @ ops.vectorize(rho))
    right = ops.devectorize(ops.right_mul_super(SX) @ ops.vectorize(rho))
    assert np.allclose(left, SX @ rho, atol=1e-15)
    assert np.allclose(right, rho @ SX, atol=1e-15)
    assert left[1, 0] == 1.0  # |1><0|
    assert right[0, 1] == 1.0  # |0><1|


def test_left_mul_identity_is_identity_map():
    mat = ops.left_mul_super(np.eye(4)).toarray()
    assert np.allclose(mat, np.eye(16), atol=1e-15)


def test_commutator_equals_left_minus_right():
    rng = np.random.default_rng(11)
    q = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    lhs = ops.commutator_super(q).toarray()
    rhs = (ops.left_mul_super(q) - ops.right_mul_super(q)).toarray()
    assert np.array_equal(lhs, rhs)


def test_lindblad_identity_is_zero():
    assert abs(ops.lindblad_dissipator(np.eye(3), 1.0).toarray()).max() == 0.0


def test_lindblad_sz_on_sx():
    # 2 sz sx sz - sx - sx = -4 sx
    out = ops.devectorize(ops.lindblad_dissipator(SZ, 1.0) @ ops.vectorize(SX))
    assert np.allclose(out, -4 * SX, atol=1e-14)


def test_lindblad_decay():
    # q = sigma_minus on rho = |1><1| gives 2(|0><0| - |1><1|)
    rho = np.diag([0.0, 1.0]).astype(complex)
    out = ops.devectorize(ops.lindblad_dissipator(SM, 1.0) @ ops.vectorize(rho))
    assert np.allclose(out, 2 * np.diag([1.0, -1.0]), atol=1e-14)


def test_lindblad_hermiticity_preservation():
    rng = np.random.default_rng(23)
    for _ in range(5):
        h = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        q = h + h.conj().T
        r = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        rho = r + r.conj().T
        out = ops.devectorize(ops.lindblad_dissipator(q, 0.7) @ ops.vectorize(rho))
        assert np.abs(out - out.conj().T).max() < 1e-12


def test_constructors_are_linear():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    for build in (ops.left_mul_super, ops.right_mul_super,
                  ops.commutator_super, ops.anticommutator_super):
        combined = build(2.0 * a + 0.5j * b).toarray()
        separate = 2.0 * build(a).toarray() + 0.5j * build(b).toarray()
        assert np.allclose(combined, separate, atol=1e-13)


def test_rejects_non_square():
    with pytest.raises(ValueError):
        ops.commutator_super(np.ones((2, 3)))


def test_rejects_non_finite():
    bad = np.array([[1.0, np.inf], [0.0, 1.0]])
    with pytest.raises(ValueError):
        ops.vectorize(bad)


def test_dimension_mismatch_on_apply():
    with pytest.raises(ValueError):
        ops.left_mul_super(SX) @ np.ones(9)
