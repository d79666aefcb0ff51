"""Hamiltonians of the three-qutrit system and the factoring problem for 15."""
from __future__ import annotations

import enum
import itertools
import warnings
from dataclasses import dataclass
from dataclasses import field as _field
from typing import NamedTuple

import numpy as np

from .spinops import M_VALUES, SpinAxis, embed, spin_matrix, sz_diagonals

TARGET_NUMBER = 15
SOLUTION = (1, -1, 1)

# Expanded problem polynomial in (a1, a2, b) as {(power_a1, power_a2, power_b): coeff}.
PROBLEM_POLYNOMIAL: dict[tuple[int, int, int], int] = {
    (2, 0, 2): 144,
    (1, 1, 2): 96,
    (0, 2, 2): 16,
    (1, 0, 2): 48,
    (0, 1, 2): 16,
    (2, 0, 1): 144,
    (1, 1, 1): 96,
    (0, 2, 1): 16,
    (0, 0, 2): 4,
    (1, 0, 1): -312,
    (0, 1, 1): -104,
    (2, 0, 0): 36,
    (1, 1, 0): 24,
    (0, 2, 0): 4,
    (0, 0, 1): -56,
    (1, 0, 0): -168,
    (0, 1, 0): -56,
    (0, 0, 0): 196,
}


@dataclass(frozen=True)
class SystemParams:
    """Resonance frequencies and crystal-field constants of the three spins."""

    omega: tuple[float, float, float] = (600.0, 1300.0, 2000.0)
    q: tuple[float, float, float] = (70.0, 110.0, 150.0)

    def __post_init__(self):
        if len(self.omega) != 3 or len(self.q) != 3:
            raise ValueError("omega and q need exactly three entries")
        if not (np.all(np.isfinite(self.omega)) and np.all(np.isfinite(self.q))):
            raise ValueError("SystemParams must be finite")

    def level_energies(self, site: int) -> tuple[float, float, float]:
        """Single-spin energies of levels m = +1, 0, -1."""
        w, q = self.omega[site - 1], self.q[site - 1]
        return (-w + q / 3.0, -2.0 * q / 3.0, w + q / 3.0)

    def transition_frequencies(self) -> dict[tuple[int, str], float]:
        out = {}
        for j in (1, 2, 3):
            e1, e2, e3 = self.level_energies(j)
            out[(j, "12")] = e2 - e1
            out[(j, "23")] = e3 - e2
        return out


@dataclass(frozen=True)
class Couplings:
    """Dipole-dipole constants J12, J13, J23."""

    j12: float = 24.0
    j13: float = 312.0
    j23: float = 104.0

    def __post_init__(self):
        if not np.all(np.isfinite([self.j12, self.j13, self.j23])):
            raise ValueError("couplings must be finite")

    def pair(self, p: int, q: int) -> float:
        key = tuple(sorted((p, q)))
        return {(1, 2): self.j12, (1, 3): self.j13, (2, 3): self.j23}[key]


def check_selectivity(params: SystemParams, couplings: Couplings) -> bool:
    """Warn if two transitions are closer than the largest coupling."""
    freqs = sorted(abs(f) for f in params.transition_frequencies().values())
    jmax = max(abs(couplings.j12), abs(couplings.j13), abs(couplings.j23))
    gap = min(b - a for a, b in zip(freqs, freqs[1:]))
    if gap <= jmax:
        warnings.warn(
            f"transition frequencies are only {gap:g} apart, not >> max|J| = {jmax:g}; "
            "selective rotations would not be transition-selective",
            stacklevel=2,
        )
        return False
    return True


class BasisLabel(NamedTuple):
    m1: int
    m2: int
    m3: int


def all_labels() -> list[BasisLabel]:
    return [BasisLabel(*m) for m in itertools.product(M_VALUES, repeat=3)]


def factors(label: tuple[int, int, int]) -> tuple[int, int]:
    """Candidate factors (p, q) encoded by a basis state."""
    a1, a2, b = label
    return 6 * a1 + 2 * a2 + 1, 2 * b + 1


def problem_energy(label: tuple[int, int, int]) -> int:
    p, q = factors(label)
    return (TARGET_NUMBER - p * q) ** 2


def problem_polynomial(label: tuple[int, int, int]) -> int:
    """Evaluate the expanded problem polynomial term by term (integers only)."""
    a1, a2, b = label
    return sum(c * a1**i * a2**j * b**k for (i, j, k), c in PROBLEM_POLYNOMIAL.items())


def _diag(values) -> np.ndarray:
    return np.diag(np.asarray(values, dtype=complex))


def h_single(params: SystemParams) -> np.ndarray:
    m = sz_diagonals().astype(float)
    w = np.asarray(params.omega, dtype=float)
    q = np.asarray(params.q, dtype=float)
    return _diag((-w * m + q * (m**2 - 2.0 / 3.0)).sum(axis=1))


def h_dipolar(c: Couplings) -> np.ndarray:
    m = sz_diagonals()
    return _diag(c.j12 * m[:, 0] * m[:, 1] + c.j13 * m[:, 0] * m[:, 2] + c.j23 * m[:, 1] * m[:, 2])


def h_field(h: float) -> np.ndarray:
    sx = spin_matrix(SpinAxis.X)
    return -h * sum(embed(sx, k) for k in (1, 2, 3))


def problem_diagonal() -> np.ndarray:
    """Integer diagonal of the problem Hamiltonian in basis order."""
    return np.array([problem_energy(lab) for lab in all_labels()], dtype=np.int64)


def h_problem() -> np.ndarray:
    return _diag(problem_diagonal())


class Method(enum.Enum):
    IDEAL = "ideal"
    COMPILED = "compiled"


@dataclass(frozen=True)
class RunMode:
    """How each Trotter step is realized, and whether it is symmetrized."""

    method: Method = Method.COMPILED
    symmetrized: bool = False

    @classmethod
    def parse(cls, text: str) -> "RunMode":
        """Parse ``ideal``, ``compiled``, ``ideal+sym`` or ``compiled+sym``."""
        base, _, suffix = text.lower().partition("+")
        if suffix not in ("", "sym"):
            raise ValueError(f"unknown run mode {text!r}")
        return cls(Method(base), suffix == "sym")

    def __str__(self) -> str:
        return self.method.value + ("+sym" if self.symmetrized else "")


IDEAL = RunMode(Method.IDEAL)
COMPILED = RunMode(Method.COMPILED)


@dataclass(frozen=True)
class AnnealConfig:
    """Schedule and physical parameters of one annealing run."""

    n_steps: int = 10
    dt: float = 0.01
    field: float = 100.0
    couplings: Couplings = _field(default_factory=Couplings)
    params: SystemParams = _field(default_factory=SystemParams)
    mode: RunMode = COMPILED
    split_three_spin: int = 7
    model: str = "ddi"

    def __post_init__(self):
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValueError(f"n_steps must be an integer >= 1, got {self.n_steps!r}")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be > 0, got {self.dt!r}")
        if not np.isfinite(self.field):
            raise ValueError("field must be finite")
        if int(self.split_three_spin) != self.split_three_spin or self.split_three_spin < 1:
            raise ValueError("split_three_spin must be an integer >= 1")
        if self.model not in ("ddi", "full"):
            raise ValueError(f"model must be 'ddi' or 'full', got {self.model!r}")

    @property
    def total_time(self) -> float:
        return self.n_steps * self.dt

    def check_step(self, l: int) -> int:
        if int(l) != l or not 0 <= l <= self.n_steps:
            raise ValueError(f"step index must be in [0, {self.n_steps}], got {l!r}")
        return int(l)


def h_total(l: int, cfg: AnnealConfig) -> np.ndarray:
    l = cfg.check_step(l)
    s = l / cfg.n_steps
    return (1.0 - s) * h_field(cfg.field) + s * h_problem()


def problem_spectrum() -> list[tuple[BasisLabel, int]]:
    """All 27 problem energies with their labels, ascending (ties in basis order)."""
    return sorted(((lab, problem_energy(lab)) for lab in all_labels()), key=lambda x: x[1])

