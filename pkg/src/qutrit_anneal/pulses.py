"""Pulse primitives, programs, and their evaluation to 27x27 unitaries.

A :class:`PulseProgram` is an ordered list of primitives where the first step
acts first, i.e. ``evaluate_program([A, B]) == M(B) @ M(A)``.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Union

import numpy as np

from .hamiltonians import Couplings, SystemParams, h_dipolar, h_single
from .spinops import DIM, SpinAxis, check_site, embed, matrix_exp, spin_matrix


class Transition(enum.Enum):
    T12 = "12"
    T23 = "23"

    @property
    def levels(self) -> tuple[int, int]:
        return (0, 1) if self is Transition.T12 else (1, 2)

    @classmethod
    def parse(cls, value: "Transition | str") -> "Transition":
        if isinstance(value, cls):
            return value
        text = str(value).upper().lstrip("T")
        return cls(text.replace("<->", "").replace("-", ""))


class FreeModel(enum.Enum):
    DDI_ONLY = "ddi"
    FULL = "full"

    @classmethod
    def parse(cls, value: "FreeModel | str") -> "FreeModel":
        return value if isinstance(value, cls) else cls(str(value).lower())


def _finite(x: float, what: str) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"{what} must be finite, got {x!r}")
    return x


@dataclass(frozen=True)
class SelectiveRotation:
    site: int
    transition: Transition
    axis: SpinAxis
    angle: float

    def __post_init__(self):
        check_site(self.site)
        object.__setattr__(self, "transition", Transition.parse(self.transition))
        object.__setattr__(self, "axis", SpinAxis.parse(self.axis))
        object.__setattr__(self, "angle", _finite(self.angle, "angle"))

    def inverse(self) -> "SelectiveRotation":
        return SelectiveRotation(self.site, self.transition, self.axis, -self.angle)


@dataclass(frozen=True)
class NonSelectiveRotation:
    """``exp(-i * angle * S^axis)`` on one spin."""

    site: int
    axis: SpinAxis
    angle: float

    def __post_init__(self):
        check_site(self.site)
        object.__setattr__(self, "axis", SpinAxis.parse(self.axis))
        object.__setattr__(self, "angle", _finite(self.angle, "angle"))

    def inverse(self) -> "NonSelectiveRotation":
        return NonSelectiveRotation(self.site, self.axis, -self.angle)


@dataclass(frozen=True)
class FreeEvolution:
    """``exp(-i * duration * H)`` with ``H = H_d`` (ddi) or ``H_1 + H_d`` (full).

    Negative durations are allowed; see :func:`physical_program`.
    """

    duration: float
    model: FreeModel = FreeModel.DDI_ONLY

    def __post_init__(self):
        object.__setattr__(self, "duration", _finite(self.duration, "duration"))
        object.__setattr__(self, "model", FreeModel.parse(self.model))

    def inverse(self) -> "FreeEvolution":
        return FreeEvolution(-self.duration, self.model)


@dataclass(frozen=True)
class GlobalPhase:
    """The scalar ``exp(-i * angle)``."""

    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", _finite(self.angle, "angle"))

    def inverse(self) -> "GlobalPhase":
        return GlobalPhase(-self.angle)


PulsePrimitive = Union[SelectiveRotation, NonSelectiveRotation, FreeEvolution, GlobalPhase]


@dataclass(frozen=True)
class PulseProgram:
    steps: tuple[PulsePrimitive, ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __add__(self, other: "PulseProgram") -> "PulseProgram":
        label = " + ".join(x for x in (self.label, other.label) if x)
        return PulseProgram(self.steps + other.steps, label)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def inverse(self) -> "PulseProgram":
        return PulseProgram(tuple(s.inverse() for s in reversed(self.steps)), f"inverse({self.label})")

    def relabel(self, label: str) -> "PulseProgram":
        return PulseProgram(self.steps, label)

    def count(self, kind: type) -> int:
        return sum(isinstance(s, kind) for s in self.steps)


def concat(programs: Iterable[PulseProgram], label: str = "") -> PulseProgram:
    steps: list[PulsePrimitive] = []
    for p in programs:
        steps.extend(p.steps)
    return PulseProgram(tuple(steps), label)


def conjugate(body: PulseProgram, frame: PulseProgram, label: str = "") -> PulseProgram:
    """Program for ``F^-1 B F`` where ``F`` is the unitary of ``frame``."""
    return PulseProgram(frame.steps + body.steps + frame.inverse().steps, label or body.label)


# -- matrices -----------------------------------------------------------------


def selective_block(transition: Transition | str, axis: SpinAxis | str, angle: float) -> np.ndarray:
    """3x3 matrix of a transition-selective rotation."""
    transition = Transition.parse(transition)
    axis = SpinAxis.parse(axis)
    a, b = transition.levels
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    m = np.eye(3, dtype=complex)
    if axis is SpinAxis.Z:
        m[a, a] = np.exp(-0.5j * angle)
        m[b, b] = np.exp(0.5j * angle)
    elif axis is SpinAxis.Y:
        m[a, a], m[a, b], m[b, a], m[b, b] = c, -s, s, c
    else:
        m[a, a], m[a, b], m[b, a], m[b, b] = c, -1j * s, -1j * s, c
    return m


def selective_rotation_matrix(p: SelectiveRotation) -> np.ndarray:
    return embed(selective_block(p.transition, p.axis, p.angle), p.site)


def nonselective_rotation_matrix(site: int, axis: SpinAxis | str, angle: float) -> np.ndarray:
    local = matrix_exp(spin_matrix(axis), -1j * angle)
    return embed(local, site)


def free_hamiltonian(model: FreeModel | str, c: Couplings, params: SystemParams) -> np.ndarray:
    model = FreeModel.parse(model)
    h = h_dipolar(c)
    if model is FreeModel.FULL:
        h = h + h_single(params)
    return h


def free_evolution_matrix(
    duration: float,
    model: FreeModel | str = FreeModel.DDI_ONLY,
    c: Couplings | None = None,
    params: SystemParams | None = None,
) -> np.ndarray:
    h = free_hamiltonian(model, c or Couplings(), params or SystemParams())
    return np.diag(np.exp(-1j * duration * np.real(np.diagonal(h))))


def primitive_matrix(p: PulsePrimitive, c: Couplings, params: SystemParams) -> np.ndarray:
    if isinstance(p, SelectiveRotation):
        return selective_rotation_matrix(p)
    if isinstance(p, NonSelectiveRotation):
        return nonselective_rotation_matrix(p.site, p.axis, p.angle)
    if isinstance(p, FreeEvolution):
        return free_evolution_matrix(p.duration, p.model, c, params)
    if isinstance(p, GlobalPhase):
        return np.exp(-1j * p.angle) * np.eye(DIM, dtype=complex)
    raise TypeError(f"not a pulse primitive: {p!r}")


def evaluate_program(
    prog: PulseProgram, c: Couplings | None = None, params: SystemParams | None = None
) -> np.ndarray:
    """Unitary of ``prog`` with the first step as the rightmost factor."""
    c = c or Couplings()
    params = params or SystemParams()
    u = np.eye(DIM, dtype=complex)
    for p in prog.steps:
        if isinstance(p, GlobalPhase):
            u *= np.exp(-1j * p.angle)
        elif isinstance(p, FreeEvolution):
            # diagonal: scale rows
            u = np.diagonal(free_evolution_matrix(p.duration, p.model, c, params))[:, None] * u
        else:
            u = primitive_matrix(p, c, params) @ u
    return u


def apply_program(
    prog: PulseProgram, psi: np.ndarray, c: Couplings | None = None, params: SystemParams | None = None
) -> np.ndarray:
    """Apply ``prog`` to a state vector without forming the full unitary."""
    c = c or Couplings()
    params = params or SystemParams()
    psi = np.array(psi, dtype=complex)
    for p in prog.steps:
        if isinstance(p, GlobalPhase):
            psi *= np.exp(-1j * p.angle)
        elif isinstance(p, FreeEvolution):
            psi *= np.diagonal(free_evolution_matrix(p.duration, p.model, c, params))
        else:
            psi = primitive_matrix(p, c, params) @ psi
    return psi


# -- standard sub-programs ------------------------------------------------------


def inversion_program(site: int) -> PulseProgram:
    """Composite ``P`` of three selective pi rotations with ``P^-1 Sz P = -Sz``."""
    site = check_site(site)
    steps = (
        SelectiveRotation(site, Transition.T12, SpinAxis.Y, math.pi),
        SelectiveRotation(site, Transition.T23, SpinAxis.Y, math.pi),
        SelectiveRotation(site, Transition.T12, SpinAxis.Y, math.pi),
    )
    return PulseProgram(steps, f"P{site}")


# -- physical (nonnegative-duration) view ---------------------------------------


def commensurate_period(energies: Iterable[float], tol: float = 1e-9, max_den: int = 10**4) -> float:
    """Smallest ``tau > 0`` with ``exp(-i tau H)`` a global phase, for diagonal ``H``.

    Raises ``ValueError`` when the level spacings have no common period
    within ``tol``.
    """
    e = np.asarray(list(energies), dtype=float)
    diffs = np.unique(np.round(np.abs(e - e[0]), 12))
    diffs = diffs[diffs > tol]
    if diffs.size == 0:
        return math.inf
    ref = diffs[0]
    ratios = []
    for d in diffs:
        r = Fraction(d / ref).limit_denominator(max_den)
        if abs(float(r) - d / ref) > tol * max(1.0, d / ref):
            raise ValueError(f"no common period: spacing ratio {d / ref!r} is not rational within {tol}")
        ratios.append(r)
    den = reduce(math.lcm, (r.denominator for r in ratios))
    num = reduce(math.gcd, (r.numerator * (den // r.denominator) for r in ratios))
    g = ref * num / den
    return 2 * math.pi / g


def physical_program(prog: PulseProgram, c: Couplings | None = None, params: SystemParams | None = None) -> PulseProgram:
    """Rewrite free-evolution durations as equivalent nonnegative ones.

    Each duration is reduced modulo the commensurate period of its free
    Hamiltonian, so the unitary is unchanged up to a global phase.
    """
    c = c or Couplings()
    params = params or SystemParams()
    periods: dict[FreeModel, float] = {}
    steps = []
    for p in prog.steps:
        if isinstance(p, FreeEvolution):
            if p.model not in periods:
                h = free_hamiltonian(p.model, c, params)
                periods[p.model] = commensurate_period(np.real(np.diagonal(h)))
            tau = periods[p.model]
            d = p.duration % tau if math.isfinite(tau) else abs(p.duration)
            steps.append(FreeEvolution(d, p.model))
        else:
            steps.append(p)
    return PulseProgram(tuple(steps), prog.label)


# -- serialization ----------------------------------------------------------------


def _num(x: float) -> str:
    return format(x, ".17g")


def primitive_to_dict(p: PulsePrimitive) -> dict:
    if isinstance(p, SelectiveRotation):
        return {"kind": "selective", "site": p.site, "transition": p.transition.value,
                "axis": p.axis.value, "angle": p.angle}
    if isinstance(p, NonSelectiveRotation):
        return {"kind": "nonselective", "site": p.site, "axis": p.axis.value, "angle": p.angle}
    if isinstance(p, FreeEvolution):
        return {"kind": "free", "duration": p.duration, "model": p.model.value}
    if isinstance(p, GlobalPhase):
        return {"kind": "phase", "angle": p.angle}
    raise TypeError(f"not a pulse primitive: {p!r}")


def primitive_from_dict(d: dict) -> PulsePrimitive:
    kind = d["kind"]
    if kind == "selective":
        return SelectiveRotation(int(d["site"]), d["transition"], d["axis"], float(d["angle"]))
    if kind == "nonselective":
        return NonSelectiveRotation(int(d["site"]), d["axis"], float(d["angle"]))
    if kind == "free":
        return FreeEvolution(float(d["duration"]), d.get("model", "ddi"))
    if kind == "phase":
        return GlobalPhase(float(d["angle"]))
    raise ValueError(f"unknown primitive kind {kind!r}")


def program_to_json(prog: PulseProgram, **extra) -> str:
    doc = {"label": prog.label, "steps": [primitive_to_dict(p) for p in prog.steps], **extra}
    return json.dumps(doc, indent=1)


def program_from_json(text: str) -> PulseProgram:
    doc = json.loads(text)
    return PulseProgram(tuple(primitive_from_dict(d) for d in doc["steps"]), doc.get("label", ""))


def format_primitive(p: PulsePrimitive) -> str:
    d = primitive_to_dict(p)
    fields = []
    for key, value in d.items():
        if key == "kind":
            continue
        fields.append(f"{key}={_num(value) if isinstance(value, float) else value}")
    return " ".join([d["kind"], *fields])


def format_program(prog: PulseProgram) -> str:
    """Line-oriented text form: a ``# label:`` header, then one primitive per line."""
    lines = [f"# label: {prog.label}"]
    lines.extend(format_primitive(p) for p in prog.steps)
    return "\n".join(lines) + "\n"


def parse_program(text: str) -> PulseProgram:
    label = ""
    steps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("label:"):
                label = body[len("label:"):].strip()
            continue
        kind, *fields = line.split()
        d: dict = {"kind": kind}
        try:
            for f in fields:
                key, value = f.split("=", 1)
                d[key] = value
            steps.append(primitive_from_dict(d))
        except (KeyError, ValueError) as exc:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}: {exc}") from exc
    return PulseProgram(tuple(steps), label)
