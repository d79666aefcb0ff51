"""Spin-1 operator algebra on three qutrits.

Local basis order is m = +1, 0, -1 (indices 0, 1, 2). The full 27-dimensional
index of ``|m1, m2, m3>`` is ``9*i1 + 3*i2 + i3``, so site 1 is the most
significant tensor factor.
"""
from __future__ import annotations

import enum

import numpy as np
from scipy.linalg import expm

DIM = 27
N_SITES = 3
SITES = (1, 2, 3)
M_VALUES = (1, 0, -1)


class SpinAxis(enum.Enum):
    X = "x"
    Y = "y"
    Z = "z"

    @classmethod
    def parse(cls, value: "SpinAxis | str") -> "SpinAxis":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


_R2 = 1.0 / np.sqrt(2.0)

_GENERATORS = {
    SpinAxis.X: np.array([[0, _R2, 0], [_R2, 0, _R2], [0, _R2, 0]], dtype=complex),
    SpinAxis.Y: np.array(
        [[0, -1j * _R2, 0], [1j * _R2, 0, -1j * _R2], [0, 1j * _R2, 0]], dtype=complex
    ),
    SpinAxis.Z: np.diag([1.0, 0.0, -1.0]).astype(complex),
}


def spin_matrix(axis: SpinAxis | str) -> np.ndarray:
    """Return the 3x3 spin-1 generator for ``axis`` (a fresh copy)."""
    return _GENERATORS[SpinAxis.parse(axis)].copy()


def check_site(site: int) -> int:
    if site not in SITES:
        raise ValueError(f"site must be one of {SITES}, got {site!r}")
    return int(site)


def embed(op: np.ndarray, site: int) -> np.ndarray:
    """Place a 3x3 operator at ``site`` with identities on the other two spins."""
    site = check_site(site)
    op = np.asarray(op, dtype=complex)
    if op.shape != (3, 3):
        raise ValueError(f"expected a 3x3 operator, got shape {op.shape}")
    factors = [np.eye(3, dtype=complex)] * N_SITES
    factors[site - 1] = op
    return np.kron(np.kron(factors[0], factors[1]), factors[2])


def sz(site: int) -> np.ndarray:
    """Shorthand for ``embed(spin_matrix(Z), site)``."""
    return embed(_GENERATORS[SpinAxis.Z], site)


def basis_index(m1: int, m2: int, m3: int) -> int:
    """Full-system index of the product state ``|m1, m2, m3>``."""
    idx = 0
    for m in (m1, m2, m3):
        if m not in M_VALUES:
            raise ValueError(f"spin projection must be in {M_VALUES}, got {m!r}")
        idx = 3 * idx + M_VALUES.index(m)
    return idx


def basis_label(index: int) -> tuple[int, int, int]:
    if not 0 <= index < DIM:
        raise ValueError(f"basis index out of range: {index}")
    i1, rest = divmod(index, 9)
    i2, i3 = divmod(rest, 3)
    return M_VALUES[i1], M_VALUES[i2], M_VALUES[i3]


def sz_diagonals() -> np.ndarray:
    """Integer array of shape (27, 3): the projections (m1, m2, m3) per basis state."""
    return np.array([basis_label(k) for k in range(DIM)], dtype=int)


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(a - a.conj().T)) < tol)


def is_unitary(u: np.ndarray, tol: float = 1e-12) -> bool:
    n = u.shape[0]
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(n))) < tol)


def matrix_exp(a: np.ndarray, scale: complex = 1.0) -> np.ndarray:
    """Return ``exp(scale * a)``.

    Diagonal inputs are exponentiated entrywise and Hermitian inputs go through
    an eigendecomposition; everything else uses scaling-and-squaring.
    """
    a = np.asarray(a, dtype=complex)
    if not np.all(np.isfinite(a)) or not np.isfinite(scale):
        raise ValueError("matrix_exp: non-finite input")
    if scale == 0:
        return np.eye(a.shape[0], dtype=complex)
    if np.count_nonzero(a - np.diag(np.diagonal(a))) == 0:
        return np.diag(np.exp(scale * np.diagonal(a)))
    if is_hermitian(a, tol=1e-14):
        w, v = np.linalg.eigh(a)
        return (v * np.exp(scale * w)) @ v.conj().T
    return expm(scale * a)


def equal_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float = 1e-10) -> tuple[bool, float]:
    """Compare two operators modulo a global phase.

    Returns ``(equal, phase)`` where ``v ~= exp(1j*phase) * u``. The phase is
    read off the largest-magnitude entry of ``v``.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    k = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    if abs(v[k]) == 0:
        raise ValueError("equal_up_to_phase: reference operator is identically zero")
    if abs(u[k]) == 0:
        return False, 0.0
    phase = float(np.angle(v[k] / u[k]))
    dev = np.max(np.abs(np.exp(1j * phase) * u - v))
    return bool(dev < tol), phase


def max_norm(a: np.ndarray) -> float:
    return float(np.max(np.abs(a)))
