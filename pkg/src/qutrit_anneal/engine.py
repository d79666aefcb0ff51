"""Trotterized annealing runs and the factoring fidelity."""
from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .compiler import compile_anneal
from .hamiltonians import (
    COMPILED,
    IDEAL,
    SOLUTION,
    AnnealConfig,
    Method,
    RunMode,
    problem_diagonal,
)
from .pulses import apply_program
from .spinops import DIM, SpinAxis, basis_index, spin_matrix

__all__ = [
    "COMPILED", "IDEAL", "RunMode", "RunResult", "SweepPoint",
    "fidelity", "initial_state", "run", "run_sweep",
]

log = logging.getLogger(__name__)

TARGET_INDEX = basis_index(*SOLUTION)
NORM_TOL = 1e-8


def single_spin_ground() -> np.ndarray:
    """Eigenvector of S^x with eigenvalue +1, nonnegative entries."""
    w, v = np.linalg.eigh(spin_matrix(SpinAxis.X))
    vec = v[:, np.argmax(w)]
    vec = vec * np.sign(vec[np.argmax(np.abs(vec))])
    return np.real_if_close(vec)


def initial_state() -> np.ndarray:
    """Ground state of the transverse field: the S^x = +1 product state."""
    v = single_spin_ground().astype(complex)
    return np.kron(np.kron(v, v), v)


def fidelity(state: np.ndarray) -> float:
    """Probability of the solution state ``|1,-1,1>``."""
    return float(abs(state[TARGET_INDEX]) ** 2)


@dataclass(frozen=True)
class RunResult:
    fidelity: float
    final_state: np.ndarray
    config_echo: AnnealConfig
    mode: RunMode
    per_step_overlap: tuple[float, ...] | None = None

    @property
    def final_norm(self) -> float:
        return float(np.linalg.norm(self.final_state))


class _FieldRotation:
    """Cached eigendecomposition of ``sum_k S_k^x`` for fast field factors."""

    def __init__(self):
        sx = spin_matrix(SpinAxis.X)
        w, v = np.linalg.eigh(sx)
        self._w, self._v = w, v

    def local(self, angle: float) -> np.ndarray:
        # exp(+i * angle * S^x)
        return (self._v * np.exp(1j * angle * self._w)) @ self._v.conj().T

    def apply(self, psi: np.ndarray, angle: float) -> np.ndarray:
        r = self.local(angle)
        t = psi.reshape(3, 3, 3)
        t = np.einsum("ai,ijk->ajk", r, t)
        t = np.einsum("bj,ajk->abk", r, t)
        t = np.einsum("ck,abk->abc", r, t)
        return t.reshape(DIM)


def _run_ideal(cfg: AnnealConfig, sym: bool, track: bool):
    field = _FieldRotation()
    hp = problem_diagonal().astype(float)
    psi = initial_state()
    overlaps = []
    n = cfg.n_steps
    for l in range(n + 1):
        # exp(-i (1-l/N) dt H_0) with H_0 = -h sum S^x
        theta = cfg.field * cfg.dt * (1.0 - l / n)
        prob = np.exp(-1j * cfg.dt * (l / n) * hp)
        if sym:
            psi = field.apply(prob * field.apply(psi, theta / 2), theta / 2)
        else:
            psi = field.apply(prob * psi, theta)
        if track:
            overlaps.append(fidelity(psi))
    return psi, overlaps


def _run_compiled(cfg: AnnealConfig, sym: bool, track: bool):
    psi = initial_state()
    overlaps = []
    for step in compile_anneal(cfg, symmetrized=sym):
        psi = apply_program(step.program, psi, cfg.couplings, cfg.params)
        if track:
            overlaps.append(fidelity(psi))
    return psi, overlaps


def run(cfg: AnnealConfig, mode: RunMode | None = None, track: bool = False) -> RunResult:
    """Evolve the initial state through ``U_0 ... U_N`` and report the fidelity.

    ``mode`` overrides ``cfg.mode``. With ``track=True`` the solution-state
    probability after every step is kept in ``per_step_overlap``.
    """
    mode = mode or cfg.mode
    cfg = dataclasses.replace(cfg, mode=mode)
    if mode.method is Method.IDEAL:
        psi, overlaps = _run_ideal(cfg, mode.symmetrized, track)
    else:
        psi, overlaps = _run_compiled(cfg, mode.symmetrized, track)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > NORM_TOL:
        raise FloatingPointError(f"state norm drifted to {norm!r} (mode {mode}, {cfg})")
    return RunResult(fidelity(psi), psi, cfg, mode, tuple(overlaps) if track else None)


SWEEP_AXES = ("N", "dt", "h")


def with_axis(base: AnnealConfig, axis: str, value: float) -> AnnealConfig:
    if axis == "N":
        n = int(round(value))
        if n != value:
            log.debug("rounding N=%r to %d", value, n)
        return dataclasses.replace(base, n_steps=n)
    if axis == "dt":
        return dataclasses.replace(base, dt=float(value))
    if axis == "h":
        return dataclasses.replace(base, field=float(value))
    raise ValueError(f"sweep axis must be one of {SWEEP_AXES}, got {axis!r}")


@dataclass(frozen=True)
class SweepPoint:
    axis: str
    value: float
    result: RunResult | None
    error: str | None = None


def _one(base, axis, value, mode):
    try:
        return SweepPoint(axis, value, run(with_axis(base, axis, value), mode))
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        log.warning("sweep point %s=%r failed: %s", axis, value, exc)
        return SweepPoint(axis, value, None, f"{type(exc).__name__}: {exc}")


def run_sweep(
    base: AnnealConfig, axis: str, values, mode: RunMode | None = None, workers: int = 1
) -> list[SweepPoint]:
    """Independent runs over ``values`` of one parameter, in input order.

    Failed points are returned with ``result=None`` and an error message.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"sweep axis must be one of {SWEEP_AXES}, got {axis!r}")
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    if not all(np.isfinite(v) for v in values):
        raise ValueError("sweep values must be finite")
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda v: _one(base, axis, v, mode), values))
    return [_one(base, axis, v, mode) for v in values]
