"""Numerical checks of every pulse construction against its exact target."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .compiler import (
    PROBLEM_TERMS,
    TermKind,
    commutator_sandwich,
    compile_linear,
    compile_pair_z_zsq,
    compile_pair_zsq_zsq,
    compile_pair_zz,
    compile_quadratic_single,
    compile_term,
    compile_triple_zzz,
)
from .hamiltonians import Couplings, h_dipolar
from .pulses import evaluate_program, inversion_program
from .spinops import DIM, sz

GOLDEN = (math.sqrt(5) - 1) / 2


def phase_samples(n: int = 5, scale: float = math.pi) -> list[float]:
    """Deterministic, well-spread phases in ``(-scale, scale)``."""
    return [scale * (2 * ((k + 1) * GOLDEN % 1.0) - 1) for k in range(n)]


def diag_exp(op: np.ndarray, phase: float) -> np.ndarray:
    """``exp(-i * phase * op)`` for a diagonal ``op``."""
    return np.diag(np.exp(-1j * phase * np.real(np.diagonal(op))))


def max_dev(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)))


def spectral_dev(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b, 2))


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float
    passed: bool
    detail: str = ""

    def row(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark}  {self.name:<34} {self.value:12.3e}  (limit {self.threshold:.1e}) {self.detail}"


def _exact(name: str, devs: list[float], tol: float, detail: str = "") -> Check:
    worst = max(devs)
    return Check(name, worst, tol, worst < tol, detail)


def _target(sites: tuple[int, ...], powers: tuple[int, ...]) -> np.ndarray:
    op = np.eye(DIM, dtype=complex)
    for s, k in zip(sites, powers):
        op = op @ np.linalg.matrix_power(sz(s), k)
    return op


def check_linear(tol: float, phases) -> Check:
    devs = [max_dev(evaluate_program(compile_linear(k, ph)), diag_exp(sz(k), ph))
            for k in (1, 2, 3) for ph in phases]
    return _exact("linear Z phase", devs, tol)


def check_quadratic(tol: float, phases) -> Check:
    devs = []
    for ph in phases:
        phi = ph / 3
        for k in (1, 2, 3):
            devs.append(max_dev(evaluate_program(compile_quadratic_single(k, ph)), diag_exp(sz(k) @ sz(k), ph)))
        # explicit 3x3 factorization with the scalar phase
        left = np.diag([np.exp(-3j * phi), 1, np.exp(-3j * phi)])
        right = (np.diag([np.exp(-1j * phi), np.exp(1j * phi), 1])
                 @ np.diag([1, np.exp(1j * phi), np.exp(-1j * phi)])
                 @ (np.exp(-2j * phi) * np.eye(3)))
        devs.append(max_dev(left, right))
    return _exact("quadratic Z phase", devs, tol)


def check_inversion(tol: float) -> Check:
    devs = []
    for k in (1, 2, 3):
        p = evaluate_program(inversion_program(k))
        for j in (1, 2, 3):
            want = -sz(j) if j == k else sz(j)
            devs.append(max_dev(p.conj().T @ sz(j) @ p, want))
    return _exact("inversion flips Sz", devs, tol)


def _refocus_literal(t: float, flips: tuple[int, ...], c: Couplings) -> np.ndarray:
    """Product of ``P_k^-1 exp(i t H_d) P_k`` factors (identity frame for k=0), rightmost first."""
    e = diag_exp(h_dipolar(c), -t)
    u = np.eye(DIM, dtype=complex)
    for k in flips:
        if k == 0:
            u = e @ u
        else:
            p = evaluate_program(inversion_program(k))
            u = p.conj().T @ e @ p @ u
    return u


def check_refocus_23(tol: float, phases, c: Couplings) -> Check:
    devs = []
    for t in phases:
        t = t / 100
        lit = _refocus_literal(t, (1, 0), c)
        devs.append(max_dev(lit, diag_exp(sz(2) @ sz(3), -2 * t * c.j23)))
        ph = -2 * t * c.j23
        devs.append(max_dev(evaluate_program(compile_pair_zz((2, 3), ph, c), c), diag_exp(sz(2) @ sz(3), ph)))
    return _exact("pair 2-3 by inverting spin 1", devs, tol)


def check_refocus_12(tol: float, phases, c: Couplings) -> Check:
    devs = []
    for t in phases:
        t = t / 100
        lit = _refocus_literal(t, (1, 2), c)
        devs.append(max_dev(lit, diag_exp(sz(1) @ sz(2), 2 * t * c.j12)))
        ph = 2 * t * c.j12
        devs.append(max_dev(evaluate_program(compile_pair_zz((1, 2), ph, c), c), diag_exp(sz(1) @ sz(2), ph)))
    return _exact("pair 1-2 by inverting spins 1, 2", devs, tol)


def check_refocus_13(tol: float, phases, c: Couplings) -> Check:
    devs = [max_dev(evaluate_program(compile_pair_zz((1, 3), ph, c), c), diag_exp(sz(1) @ sz(3), ph))
            for ph in phases]
    return _exact("pair 1-3 by inverting spin 2", devs, tol)


def check_z_zsq(tol: float, phases, c: Couplings) -> Check:
    devs = []
    for ph in phases:
        for p in (1, 2, 3):
            for q in (1, 2, 3):
                if p != q:
                    u = evaluate_program(compile_pair_z_zsq(p, q, ph, c), c)
                    devs.append(max_dev(u, diag_exp(sz(p) @ sz(q) @ sz(q), ph)))
    return _exact("Z x Z^2 squaring construction", devs, tol)


def check_zsq_zsq(tol: float, phases, c: Couplings) -> Check:
    devs = []
    for ph in phases:
        for pair in ((3, 1), (3, 2), (1, 2), (2, 1)):
            p, q = pair
            u = evaluate_program(compile_pair_zsq_zsq(pair, ph, c), c)
            devs.append(max_dev(u, diag_exp(sz(p) @ sz(p) @ sz(q) @ sz(q), ph)))
    return _exact("Z^2 x Z^2 double squaring", devs, tol)


def check_exact_problem_terms(tol: float, c: Couplings, tau: float = 0.01) -> Check:
    devs = []
    for term in PROBLEM_TERMS:
        if term.kind in (TermKind.TRIPLE_ZZZ, TermKind.TRIPLE_ZSQZZ):
            continue
        ph = term.coefficient * tau
        u = evaluate_program(compile_term(term, ph, couplings=c), c)
        if term.kind is TermKind.CONSTANT:
            want = np.exp(-1j * ph) * np.eye(DIM)
        else:
            want = diag_exp(_target((1, 2, 3), term.powers), ph)
        devs.append(max_dev(u, want))
    return _exact("exact problem terms at dt*l/N=0.01", devs, tol)


def sandwich_error(b: float, c: Couplings | None = None) -> float:
    """Spectral-norm error of one commutator sandwich with both legs ``b``."""
    u = evaluate_program(commutator_sandwich(b, -b, c), c)
    return spectral_dev(u, diag_exp(sz(1) @ sz(2) @ sz(3), b * b))


def fitted_order(bs=(0.4, 0.2, 0.1), c: Couplings | None = None) -> float:
    errs = [sandwich_error(b, c) for b in bs]
    slope, _ = np.polyfit(np.log(bs), np.log(errs), 1)
    return float(slope)


def check_three_spin_order(min_slope: float = 2.5) -> Check:
    slope = fitted_order()
    return Check("three-spin commutator order", slope, min_slope, slope >= min_slope,
                 "fitted log-log slope over b = 0.4, 0.2, 0.1")


def triple_error(coeff: float, splits: int, c: Couplings | None = None) -> float:
    u = evaluate_program(compile_triple_zzz(coeff, splits, c), c)
    return spectral_dev(u, diag_exp(sz(1) @ sz(2) @ sz(3), coeff))


def check_split_benefit(coeff: float = 0.96, min_ratio: float = 1.5) -> Check:
    ratio = triple_error(coeff, 1) / triple_error(coeff, 7)
    return Check("seven-fold split benefit", ratio, min_ratio, ratio >= min_ratio,
                 f"error(splits=1)/error(splits=7) at phase {coeff}")


def run_all(tol: float = 1e-10, n_phases: int = 5, couplings: Couplings | None = None) -> list[Check]:
    c = couplings or Couplings()
    phases = phase_samples(n_phases)
    return [
        check_linear(tol, phases),
        check_quadratic(tol, phases),
        check_inversion(tol),
        check_refocus_23(tol, phases, c),
        check_refocus_12(tol, phases, c),
        check_refocus_13(tol, phases, c),
        check_z_zsq(tol, phases, c),
        check_zsq_zsq(tol, phases, c),
        check_exact_problem_terms(tol, c),
        check_three_spin_order(),
        check_split_benefit(),
    ]
