import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qutrit_anneal.spinops import (
    SpinAxis,
    basis_index,
    basis_label,
    embed,
    equal_up_to_phase,
    is_hermitian,
    is_unitary,
    matrix_exp,
    spin_matrix,
)

SX, SY, SZ = (spin_matrix(a) for a in SpinAxis)


def test_sz_is_diag_one_zero_minus_one():
    assert np.array_equal(SZ, np.diag([1, 0, -1]))


def test_sx_eigenvector():
    v = np.array([0.5, 1 / np.sqrt(2), 0.5])
    np.testing.assert_allclose(SX @ v, v, atol=1e-15)


@pytest.mark.parametrize("a, b, c", [(SX, SY, SZ), (SY, SZ, SX), (SZ, SX, SY)])
def test_commutation_relations(a, b, c):
    np.testing.assert_allclose(a @ b - b @ a, 1j * c, atol=1e-12)


@pytest.mark.parametrize("axis", list(SpinAxis))
def test_generators_hermitian(axis):
    assert is_hermitian(spin_matrix(axis))


def test_spin_one_casimir():
    np.testing.assert_allclose(SX @ SX + SY @ SY + SZ @ SZ, 2 * np.eye(3), atol=1e-14)


def test_embed_identity_and_order():
    for k in (1, 2, 3):
        np.testing.assert_array_equal(embed(np.eye(3), k), np.eye(27))
    assert np.array_equal(np.diagonal(embed(SZ, 1)).real, [1] * 9 + [0] * 9 + [-1] * 9)
    assert np.array_equal(np.diagonal(embed(SZ, 3)).real, [1, 0, -1] * 9)


def test_embed_rejects_bad_site():
    with pytest.raises(ValueError):
        embed(SZ, 4)


def test_embed_disjoint_sites_commute():
    a, b = embed(SX, 1), embed(SY, 2)
    assert np.max(np.abs(a @ b - b @ a)) < 1e-12
    assert is_hermitian(a)


def test_basis_index_roundtrip():
    assert basis_index(1, 1, 1) == 0
    assert basis_index(-1, -1, -1) == 26
    assert basis_index(1, -1, 1) == 6
    for k in range(27):
        assert basis_index(*basis_label(k)) == k


def test_matrix_exp_zero_scale_is_identity():
    np.testing.assert_array_equal(matrix_exp(embed(SX, 2), 0), np.eye(27))


def test_matrix_exp_diagonal_pi():
    u = matrix_exp(embed(SZ, 1), -1j * np.pi)
    want = np.repeat(np.exp(-1j * np.pi * np.array([1, 0, -1])), 9)
    np.testing.assert_allclose(np.diagonal(u), want, atol=1e-15)


def test_matrix_exp_spin_one_period_is_two_pi():
    u = matrix_exp(SX, -2j * np.pi)
    np.testing.assert_allclose(u, np.eye(3), atol=1e-12)


def test_matrix_exp_general_matches_scipy():
    from scipy.linalg import expm

    a = np.arange(9).reshape(3, 3) * (0.1 + 0.2j)
    np.testing.assert_allclose(matrix_exp(a, 0.5), expm(0.5 * a), atol=1e-12)


def test_matrix_exp_rejects_nonfinite():
    with pytest.raises(ValueError):
        matrix_exp(np.array([[np.nan, 0], [0, 1]]), 1.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(-50, 50), st.sampled_from(list(SpinAxis)), st.sampled_from([1, 2, 3]))
def test_matrix_exp_unitary_for_hermitian(t, axis, site):
    h = embed(spin_matrix(axis), site) + 0.3 * embed(SZ, 1 + site % 3)
    assert is_unitary(matrix_exp(h, -1j * t), tol=1e-10)


def test_equal_up_to_phase_examples():
    u = matrix_exp(embed(SX, 1) + embed(SZ, 3), -0.3j)
    eq, ph = equal_up_to_phase(u, u * np.exp(0.7j))
    assert eq and ph == pytest.approx(0.7)
    assert equal_up_to_phase(np.eye(27), np.eye(27)) == (True, 0.0)
    d = np.eye(27, dtype=complex)
    d[4, 4] += 1e-3
    assert not equal_up_to_phase(np.eye(27), d, tol=1e-6)[0]


def test_equal_up_to_phase_zero_reference():
    with pytest.raises(ValueError):
        equal_up_to_phase(np.eye(3), np.zeros((3, 3)))


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3))
def test_equal_up_to_phase_symmetric(phi):
    u = matrix_exp(embed(SY, 2), -1j * phi)
    v = np.exp(1j * phi) * u
    assert equal_up_to_phase(u, v)[0] == equal_up_to_phase(v, u)[0] is True
    assert equal_up_to_phase(u, u)[0]
