"""Spin operators and the Hermitian-generator propagator."""

import numpy as np
import pytest
import scipy.linalg

from nvsync.spinalg import expm_hermitian, kron, spin_ops


def random_hermitian(rng, dim, scale=1.0):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (z + z.conj().T) / 2


def test_spin_half_matrices():
    ops = spin_ops(0.5)
    assert np.array_equal(ops.sz, np.diag([0.5, -0.5]).astype(complex))
    assert np.array_equal(ops.sx, np.array([[0, 0.5], [0.5, 0]], dtype=complex))
    assert np.allclose(ops.sy, [[0, -0.5j], [0.5j, 0]], atol=1e-16)


def test_spin_one_matrices():
    ops = spin_ops(1.0)
    assert np.array_equal(ops.sz, np.diag([1.0, 0.0, -1.0]).astype(complex))
    r = 1 / np.sqrt(2)
    assert np.allclose(ops.sx, [[0, r, 0], [r, 0, r], [0, r, 0]], atol=1e-15)
    assert np.allclose(ops.sy, [[0, -1j * r, 0], [1j * r, 0, -1j * r], [0, 1j * r, 0]], atol=1e-15)


def test_raising_operator_sits_on_superdiagonal():
    # descending-m basis: S+ takes |m> to |m+1>, which is a lower row index
    for s in (0.5, 1.0):
        ops = spin_ops(s)
        sp = ops.sx + 1j * ops.sy
        assert np.allclose(np.tril(sp), 0, atol=1e-15)
        assert np.all(np.abs(np.diag(sp, 1)) > 0)


@pytest.mark.parametrize("s", [0.5, 1.0])
def test_commutator_closes(s):
    ops = spin_ops(s)
    comm = ops.sx @ ops.sy - ops.sy @ ops.sx
    assert np.allclose(comm, 1j * ops.sz, atol=1e-14)


@pytest.mark.parametrize("s", [0.5, 1.0])
def test_casimir_is_s_s_plus_one(s):
    ops = spin_ops(s)
    total = ops.sx @ ops.sx + ops.sy @ ops.sy + ops.sz @ ops.sz
    assert np.allclose(total, s * (s + 1) * np.eye(ops.sz.shape[0]), atol=1e-14)


@pytest.mark.parametrize("s", [0.0, 1.5, 2.0, -0.5])
def test_unsupported_spin_rejected(s):
    with pytest.raises(ValueError, match="unsupported spin"):
        spin_ops(s)


def test_kron_index_convention():
    # integer entries keep the products exact, so placement is checked bitwise
    rng = np.random.default_rng(7)
    a = rng.integers(-9, 9, size=(2, 2)).astype(float)
    b = rng.integers(-9, 9, size=(3, 3)).astype(float)
    out = kron(a, b)
    assert out.shape == (6, 6)
    for i in range(2):
        for j in range(2):
            for k in range(3):
                for l in range(3):
                    assert out[3 * i + k, 3 * j + l] == a[i, j] * b[k, l]


def test_kron_complex():
    rng = np.random.default_rng(8)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    expected = np.array(
        [[a[i, j] * b[k, l] for j in range(2) for l in range(2)]
         for i in range(2) for k in range(2)]
    )
    assert np.allclose(kron(a, b), expected, atol=1e-14)


@pytest.mark.parametrize("dim", [2, 4, 6, 12])
@pytest.mark.parametrize("t", [0.0, 0.1, 2.0, 9.7])
def test_expm_matches_scipy(dim, t):
    h = random_hermitian(np.random.default_rng(dim), dim, scale=5.0)
    ref = scipy.linalg.expm(-1j * h * t)
    assert np.allclose(expm_hermitian(h, t), ref, atol=1e-9)


def test_expm_zero_time_is_identity():
    h = random_hermitian(np.random.default_rng(0), 6)
    assert np.allclose(expm_hermitian(h, 0.0), np.eye(6), atol=1e-14)


def test_expm_is_unitary():
    h = random_hermitian(np.random.default_rng(1), 12, scale=40.0)
    u = expm_hermitian(h, 3.3)
    assert np.allclose(u @ u.conj().T, np.eye(12), atol=1e-10)


def test_expm_semigroup():
    h = random_hermitian(np.random.default_rng(2), 6, scale=3.0)
    u1 = expm_hermitian(h, 0.4)
    u2 = expm_hermitian(h, 1.9)
    u12 = expm_hermitian(h, 2.3)
    assert np.allclose(u1 @ u2, u12, atol=1e-10)


def test_expm_negative_time_inverts():
    h = random_hermitian(np.random.default_rng(3), 4, scale=2.0)
    u = expm_hermitian(h, 0.7)
    assert np.allclose(expm_hermitian(h, -0.7), u.conj().T, atol=1e-12)


def test_expm_diagonal_generator_gives_pure_phases():
    d = np.array([0.0, 1.5, -2.25])
    u = expm_hermitian(np.diag(d), 0.8)
    assert np.allclose(u, np.diag(np.exp(-1j * d * 0.8)), atol=1e-14)


def test_expm_rejects_non_hermitian():
    h = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError, match="not Hermitian"):
        expm_hermitian(h, 1.0)


def test_expm_rejects_non_square():
    with pytest.raises(ValueError, match="square"):
        expm_hermitian(np.zeros((2, 3)), 1.0)
