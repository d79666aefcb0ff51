"""Synthesis of the annealing step unitaries as pulse programs.

Every monomial of the problem polynomial becomes a sub-program built from
selective Z/Y rotations, the inversion composite ``P_k`` and free evolution
under the dipolar coupling. All constructions are exact except the two
three-spin terms, which use a group commutator of two-spin evolutions.

Phase conventions: ``compile_*(..., phase)`` realizes ``exp(-i * phase * O)``
for the named operator ``O``.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .hamiltonians import PROBLEM_POLYNOMIAL, AnnealConfig, Couplings, SystemParams
from .pulses import (
    FreeEvolution,
    FreeModel,
    GlobalPhase,
    NonSelectiveRotation,
    PulseProgram,
    SelectiveRotation,
    Transition,
    concat,
    conjugate,
    inversion_program,
)
from .spinops import SpinAxis, check_site

PI = math.pi
HALF_PI = math.pi / 2
PAIRS = ((1, 2), (1, 3), (2, 3))


def _sel(site, transition, axis, angle):
    return SelectiveRotation(site, Transition(transition), SpinAxis(axis), angle)


# -- one-spin terms -------------------------------------------------------------


def compile_linear(spin: int, phase: float) -> PulseProgram:
    """``exp(-i * phase * S_k^z)`` as two selective Z rotations by ``2*phase``."""
    spin = check_site(spin)
    return PulseProgram(
        (_sel(spin, "12", "z", 2 * phase), _sel(spin, "23", "z", 2 * phase)),
        f"Z{spin}",
    )


def compile_quadratic_single(spin: int, phase3: float) -> PulseProgram:
    """``exp(-i * phase3 * (S_k^z)^2)``; with ``phase3 = 3*phi`` the angles are ``+-2*phi``."""
    spin = check_site(spin)
    phi = phase3 / 3.0
    return PulseProgram(
        (_sel(spin, "12", "z", 2 * phi), _sel(spin, "23", "z", -2 * phi), GlobalPhase(2 * phi)),
        f"Z{spin}^2",
    )


def compile_local_diagonal(spin: int, phases) -> PulseProgram:
    """``exp(-i * diag(phases))`` on one spin (levels m = +1, 0, -1)."""
    y_plus, y_zero, y_minus = phases
    linear = (y_plus - y_minus) / 2.0
    quad = (y_plus + y_minus) / 2.0 - y_zero
    return concat(
        [compile_linear(spin, linear), compile_quadratic_single(spin, quad),
         PulseProgram((GlobalPhase(y_zero),))],
        f"D{spin}",
    )


# -- two-spin terms ----------------------------------------------------------


def _pair_key(pair) -> tuple[int, int]:
    p, q = (check_site(s) for s in pair)
    if p == q:
        raise ValueError(f"pair needs two distinct spins, got {pair!r}")
    return (min(p, q), max(p, q))


def _refocus_single_spin(
    pieces: list[tuple[float, tuple[int, ...]]], params: SystemParams
) -> PulseProgram:
    """Cancel the one-spin Hamiltonian accumulated during free evolutions.

    ``pieces`` lists (duration, spins inverted around that interval). Inversion
    reverses the level order of a spin, so the accumulated phase is diagonal
    and is undone by selective Z rotations.
    """
    out = []
    for j in (1, 2, 3):
        levels = np.array(params.level_energies(j))
        acc = np.zeros(3)
        for d, flipped in pieces:
            acc += d * (levels[::-1] if j in flipped else levels)
        out.append(compile_local_diagonal(j, -acc))
    return concat(out, "refocus")


def compile_pair_zz(
    pair, phase: float, couplings: Couplings | None = None, model: FreeModel | str = FreeModel.DDI_ONLY,
    params: SystemParams | None = None,
) -> PulseProgram:
    """``exp(-i * phase * S_p^z S_q^z)`` from free dipolar evolution.

    Unwanted couplings are cancelled by the inversion composite: spin 1 for
    (2,3), spin 2 for (1,3), and both spins 1 and 2 for (1,2).
    """
    c = couplings or Couplings()
    model = FreeModel.parse(model)
    key = _pair_key(pair)
    j = c.pair(*key)
    if j == 0:
        raise ValueError(f"coupling J{key[0]}{key[1]} is zero; cannot synthesize this pair term")
    # (1,2) inverts both spins 1 and 2 in turn, which flips the sign of the kept term.
    d = phase / (2.0 * j) if key != (1, 2) else -phase / (2.0 * j)
    free = PulseProgram((FreeEvolution(d, model),))
    if key == (2, 3):
        prog = conjugate(free, inversion_program(1)) + free
        pieces = [(d, (1,)), (d, ())]
    elif key == (1, 3):
        prog = conjugate(free, inversion_program(2)) + free
        pieces = [(d, (2,)), (d, ())]
    else:
        prog = conjugate(free, inversion_program(1)) + conjugate(free, inversion_program(2))
        pieces = [(d, (1,)), (d, (2,))]
    if model is FreeModel.FULL:
        prog = prog + _refocus_single_spin(pieces, params or SystemParams())
    return prog.relabel(f"ZZ{key[0]}{key[1]}")


def _squaring_frame(spin: int) -> PulseProgram:
    return PulseProgram((_sel(spin, "23", "y", PI), _sel(spin, "12", "y", PI)))


def _square_on(spin: int, inner: PulseProgram, outer: PulseProgram, label: str) -> PulseProgram:
    """Assemble ``outer * Y23(-pi) inner Y12(-pi) inner Y12(pi) Y23(pi)`` on ``spin``."""
    steps = (
        _squaring_frame(spin).steps
        + inner.steps
        + (_sel(spin, "12", "y", -PI),)
        + inner.steps
        + (_sel(spin, "23", "y", -PI),)
        + outer.steps
    )
    return PulseProgram(steps, label)


def compile_pair_z_zsq(
    spin_z: int, spin_zsq: int, phase3: float, couplings: Couplings | None = None,
    model: FreeModel | str = FreeModel.DDI_ONLY, params: SystemParams | None = None,
) -> PulseProgram:
    """``exp(-i * phase3 * S_p^z (S_q^z)^2)`` with ``p = spin_z``, ``q = spin_zsq``."""
    _pair_key((spin_z, spin_zsq))
    tj = phase3 / 3.0
    inner = compile_pair_zz((spin_z, spin_zsq), tj, couplings, model, params)
    return _square_on(spin_zsq, inner, compile_linear(spin_z, 2 * tj), f"Z{spin_z}Z{spin_zsq}^2")


def compile_pair_zsq_zsq(
    pair, coeff: float, couplings: Couplings | None = None, model: FreeModel | str = FreeModel.DDI_ONLY,
    params: SystemParams | None = None,
) -> PulseProgram:
    """``exp(-i * coeff * (S_p^z)^2 (S_q^z)^2)`` for ``pair = (p, q)``.

    The squaring construction is applied on ``p`` first, then on ``q`` inside.
    """
    p, q = pair
    _pair_key(pair)
    inner = compile_pair_z_zsq(p, q, coeff / 3.0, couplings, model, params)
    outer = compile_quadratic_single(q, 2.0 * coeff / 3.0)
    return _square_on(p, inner, outer, f"Z{p}^2Z{q}^2")


# -- three-spin terms ----------------------------------------------------------


def _ns(axis: str, angle: float) -> NonSelectiveRotation:
    return NonSelectiveRotation(1, SpinAxis(axis), angle)


def commutator_sandwich(
    b12: float, b13: float, couplings: Couplings | None = None, model: FreeModel | str = FreeModel.DDI_ONLY,
    params: SystemParams | None = None,
) -> PulseProgram:
    """Group commutator approximating ``exp(i * b12 * b13 * S1z S2z S3z)``.

    Legs ``exp(+-i b12 S1x S2z)`` and ``exp(+-i b13 S1z S3z)`` are made from
    ZZ evolutions; the x/y pi/2 rotations on spin 1 set the axes.
    The remainder is third order in the leg angles.
    """
    zz12 = lambda ph: compile_pair_zz((1, 2), ph, couplings, model, params).steps  # noqa: E731
    zz13 = lambda ph: compile_pair_zz((1, 3), ph, couplings, model, params).steps  # noqa: E731
    steps = (
        (_ns("x", -HALF_PI),)
        + zz13(b13)
        + (_ns("y", -HALF_PI),)
        + zz12(b12)
        + (_ns("y", HALF_PI),)
        + zz13(-b13)
        + (_ns("y", -HALF_PI),)
        + zz12(-b12)
        + (_ns("y", HALF_PI), _ns("x", HALF_PI))
    )
    return PulseProgram(steps, "ZZZ-commutator")


def leg_angles(coeff: float) -> tuple[float, float]:
    """Leg angles ``(b12, b13)`` with ``b12 * b13 = -coeff``; ``b13`` carries the sign."""
    b = math.sqrt(abs(coeff))
    return b, (-b if coeff >= 0 else b)


def compile_triple_zzz(
    coeff: float, splits: int = 7, couplings: Couplings | None = None,
    model: FreeModel | str = FreeModel.DDI_ONLY, params: SystemParams | None = None,
) -> PulseProgram:
    """Approximate ``exp(-i * coeff * S1z S2z S3z)`` by ``splits`` commutator sandwiches."""
    if int(splits) != splits or splits < 1:
        raise ValueError(f"splits must be an integer >= 1, got {splits!r}")
    if coeff == 0:
        return PulseProgram((), "ZZZ")
    b12, b13 = leg_angles(coeff / splits)
    if abs(b12) > 1.0:
        warnings.warn(f"commutator leg angle {abs(b12):.3g} > 1; the three-spin term will be inaccurate",
                      stacklevel=2)
    one = commutator_sandwich(b12, b13, couplings, model, params)
    return PulseProgram(one.steps * int(splits), "ZZZ")


def compile_triple_zsqzz(
    coeff: float, splits: int = 7, couplings: Couplings | None = None,
    model: FreeModel | str = FreeModel.DDI_ONLY, params: SystemParams | None = None,
) -> PulseProgram:
    """Approximate ``exp(-i * coeff * S1z S2z (S3z)^2)``: squaring on spin 3 around two three-spin factors."""
    if coeff == 0:
        return PulseProgram((), "ZZZ^2")
    inner = compile_triple_zzz(coeff / 3.0, splits, couplings, model, params)
    outer = compile_pair_zz((1, 2), 2.0 * coeff / 3.0, couplings, model, params)
    return _square_on(3, inner, outer, "Z1Z2Z3^2")


# -- problem terms ---------------------------------------------------------------


class TermKind(enum.Enum):
    LINEAR = "Linear"
    QUADRATIC_SINGLE = "QuadraticSingle"
    PAIR_ZZ = "PairZZ"
    PAIR_ZZSQ = "PairZZsq"
    PAIR_ZSQZSQ = "PairZsqZsq"
    TRIPLE_ZZZ = "TripleZZZ"
    TRIPLE_ZSQZZ = "TripleZsqZZ"
    CONSTANT = "Constant"


@dataclass(frozen=True)
class Term:
    """One monomial of the problem polynomial and the spins it acts on."""

    kind: TermKind
    sites: tuple[int, ...]
    powers: tuple[int, int, int]
    coefficient: int

    @property
    def name(self) -> str:
        names = ("a1", "a2", "b")
        parts = [n if k == 1 else f"{n}^2" for n, k in zip(names, self.powers) if k]
        return "*".join(parts) or "1"


# Emission order: linear, quadratic-single, pair, triple, constant.
PROBLEM_TERMS: tuple[Term, ...] = (
    Term(TermKind.LINEAR, (1,), (1, 0, 0), -168),
    Term(TermKind.LINEAR, (2,), (0, 1, 0), -56),
    Term(TermKind.LINEAR, (3,), (0, 0, 1), -56),
    Term(TermKind.QUADRATIC_SINGLE, (1,), (2, 0, 0), 36),
    Term(TermKind.QUADRATIC_SINGLE, (2,), (0, 2, 0), 4),
    Term(TermKind.QUADRATIC_SINGLE, (3,), (0, 0, 2), 4),
    Term(TermKind.PAIR_ZZ, (1, 2), (1, 1, 0), 24),
    Term(TermKind.PAIR_ZZ, (1, 3), (1, 0, 1), -312),
    Term(TermKind.PAIR_ZZ, (2, 3), (0, 1, 1), -104),
    Term(TermKind.PAIR_ZZSQ, (3, 1), (2, 0, 1), 144),
    Term(TermKind.PAIR_ZZSQ, (3, 2), (0, 2, 1), 16),
    Term(TermKind.PAIR_ZZSQ, (1, 3), (1, 0, 2), 48),
    Term(TermKind.PAIR_ZZSQ, (2, 3), (0, 1, 2), 16),
    Term(TermKind.PAIR_ZSQZSQ, (3, 1), (2, 0, 2), 144),
    Term(TermKind.PAIR_ZSQZSQ, (3, 2), (0, 2, 2), 16),
    Term(TermKind.TRIPLE_ZZZ, (1, 2, 3), (1, 1, 1), 96),
    Term(TermKind.TRIPLE_ZSQZZ, (1, 2, 3), (1, 1, 2), 96),
    Term(TermKind.CONSTANT, (), (0, 0, 0), 196),
)

assert {t.powers: t.coefficient for t in PROBLEM_TERMS} == PROBLEM_POLYNOMIAL


def compile_term(
    term: Term, phase: float, splits: int = 7, couplings: Couplings | None = None,
    model: FreeModel | str = FreeModel.DDI_ONLY, params: SystemParams | None = None,
) -> PulseProgram:
    """``exp(-i * phase * monomial)`` for one problem term (``phase`` includes the coefficient)."""
    k, s = term.kind, term.sites
    if k is TermKind.LINEAR:
        prog = compile_linear(s[0], phase)
    elif k is TermKind.QUADRATIC_SINGLE:
        prog = compile_quadratic_single(s[0], phase)
    elif k is TermKind.PAIR_ZZ:
        prog = compile_pair_zz(s, phase, couplings, model, params)
    elif k is TermKind.PAIR_ZZSQ:
        prog = compile_pair_z_zsq(s[0], s[1], phase, couplings, model, params)
    elif k is TermKind.PAIR_ZSQZSQ:
        prog = compile_pair_zsq_zsq(s, phase, couplings, model, params)
    elif k is TermKind.TRIPLE_ZZZ:
        prog = compile_triple_zzz(phase, splits, couplings, model, params)
    elif k is TermKind.TRIPLE_ZSQZZ:
        prog = compile_triple_zsqzz(phase, splits, couplings, model, params)
    else:
        prog = PulseProgram((GlobalPhase(phase),))
    return prog.relabel(term.name)


@dataclass(frozen=True)
class CompiledStep:
    l: int
    program: PulseProgram
    term_manifest: tuple[tuple[Term, float], ...]

    def coefficient_table(self) -> dict[tuple[int, int, int], int]:
        return {t.powers: t.coefficient for t, _ in self.term_manifest}


def compile_problem_step(l: int, cfg: AnnealConfig, terms=PROBLEM_TERMS) -> CompiledStep:
    """Pulse program for ``exp(-i * dt * (l/N) * H_p)``, one sub-program per term."""
    l = cfg.check_step(l)
    tau = cfg.dt * l / cfg.n_steps
    manifest = []
    parts = []
    for term in terms:
        phase = term.coefficient * tau
        manifest.append((term, phase))
        if phase != 0:
            parts.append(compile_term(term, phase, cfg.split_three_spin, cfg.couplings, cfg.model, cfg.params))
    return CompiledStep(l, concat(parts, f"problem l={l}"), tuple(manifest))


def field_angle(l: int, cfg: AnnealConfig) -> float:
    """Rotation angle ``h * dt * (1 - l/N)`` of the transverse-field factor."""
    l = cfg.check_step(l)
    return cfg.field * cfg.dt * (1.0 - l / cfg.n_steps)


def compile_field_step(l: int, cfg: AnnealConfig, fraction: float = 1.0) -> PulseProgram:
    """``exp(-i * fraction * (1 - l/N) * dt * H_0)`` as one X rotation per spin.

    ``H_0 = -h * sum(S^x)``, so the rotation ``exp(-i*angle*S^x)`` uses
    ``angle = -fraction * theta``.
    """
    theta = fraction * field_angle(l, cfg)
    if theta == 0:
        return PulseProgram((), f"field l={l}")
    steps = tuple(NonSelectiveRotation(k, SpinAxis.X, -theta) for k in (1, 2, 3))
    return PulseProgram(steps, f"field l={l}")


def compile_anneal(cfg: AnnealConfig, symmetrized: bool | None = None) -> list[CompiledStep]:
    """One compiled step per ``l = 0..N``, in the order they act.

    Within a step the problem factor acts first and the field factor second
    (``U_l = F_l P_l``); the symmetrized variant is ``F_l/2 P_l F_l/2``.
    """
    sym = cfg.mode.symmetrized if symmetrized is None else symmetrized
    out = []
    for l in range(cfg.n_steps + 1):
        prob = compile_problem_step(l, cfg)
        if sym:
            half = compile_field_step(l, cfg, 0.5)
            prog = half + prob.program + half
        else:
            prog = prob.program + compile_field_step(l, cfg)
        out.append(CompiledStep(l, prog.relabel(f"U l={l}"), prob.term_manifest))
    return out
