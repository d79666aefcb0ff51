import itertools
import math

import numpy as np
import pytest

from conftest import expm_oracle
from qutrit_anneal.compiler import (
    PROBLEM_TERMS,
    TermKind,
    compile_anneal,
    compile_field_step,
    compile_linear,
    compile_pair_z_zsq,
    compile_pair_zsq_zsq,
    compile_pair_zz,
    compile_problem_step,
    compile_quadratic_single,
    compile_term,
    compile_triple_zsqzz,
    compile_triple_zzz,
    leg_angles,
)
from qutrit_anneal.hamiltonians import PROBLEM_POLYNOMIAL, AnnealConfig, Couplings, h_field, h_problem
from qutrit_anneal.pulses import (
    FreeEvolution,
    GlobalPhase,
    NonSelectiveRotation,
    SelectiveRotation,
    concat,
    evaluate_program,
    inversion_program,
)
from qutrit_anneal.spinops import SpinAxis, equal_up_to_phase

TAU = 0.01 * 7 / 10  # dt * l / N for dt=0.01, l=7, N=10


def dev(prog, op, phase, **kw):
    return np.max(np.abs(evaluate_program(prog, **kw) - expm_oracle(op, phase)))


def spec_dev(prog, op, phase):
    return np.linalg.norm(evaluate_program(prog) - expm_oracle(op, phase), 2)


def angles_on(prog, site, axis="z"):
    return [(s.transition.value, s.angle) for s in prog
            if isinstance(s, SelectiveRotation) and s.site == site and s.axis is SpinAxis(axis)]


# -- one-spin terms


def test_linear_instance_angles():
    prog = compile_linear(2, -56 * TAU)
    assert angles_on(prog, 2) == [("12", pytest.approx(-112 * TAU)), ("23", pytest.approx(-112 * TAU))]


@pytest.mark.parametrize("site", [1, 2, 3])
@pytest.mark.parametrize("phase", [0.0, 0.3, -2.1])
def test_linear_exact(site, phase, Z):
    assert dev(compile_linear(site, phase), Z[site], phase) < 1e-12


def test_quadratic_instance_angles():
    prog = compile_quadratic_single(2, 4 * TAU)
    assert angles_on(prog, 2) == [("12", pytest.approx(8 * TAU / 3)), ("23", pytest.approx(-8 * TAU / 3))]
    (g,) = [s for s in prog if isinstance(s, GlobalPhase)]
    assert g.angle == pytest.approx(8 * TAU / 3)


@pytest.mark.parametrize("site", [1, 2, 3])
@pytest.mark.parametrize("phase", [0.0, 0.7, -1.9])
def test_quadratic_exact_including_phase(site, phase, Z):
    assert dev(compile_quadratic_single(site, phase), Z[site] @ Z[site], phase) < 1e-12


# -- two-spin terms


@pytest.mark.parametrize("pair", [(1, 2), (1, 3), (2, 3), (3, 1)])
@pytest.mark.parametrize("phase", [0.0, 0.24, -0.9])
def test_pair_zz_exact(pair, phase, Z):
    p, q = pair
    assert dev(compile_pair_zz(pair, phase), Z[p] @ Z[q], phase) < 1e-12


def test_pair_23_uses_negative_durations_for_positive_time():
    t = 0.002
    prog = compile_pair_zz((2, 3), -2 * t * 104)
    durs = [s.duration for s in prog if isinstance(s, FreeEvolution)]
    assert durs == [pytest.approx(-t), pytest.approx(-t)]
    assert prog.steps[:3] == inversion_program(1).steps


def test_pair_12_uses_both_inversions(Z):
    prog = compile_pair_zz((1, 2), 24 * TAU)
    sites = {s.site for s in prog if isinstance(s, SelectiveRotation)}
    assert sites == {1, 2}
    assert dev(prog, Z[1] @ Z[2], 24 * TAU) < 1e-12


@pytest.mark.parametrize("pair, spectator", [((1, 2), 3), ((1, 3), 2), ((2, 3), 1)])
def test_pair_decouples_spectator(pair, spectator, Z):
    u = evaluate_program(compile_pair_zz(pair, 0.77))
    assert np.max(np.abs(u @ Z[spectator] - Z[spectator] @ u)) < 1e-12


def test_pair_zero_coupling_rejected():
    with pytest.raises(ValueError):
        compile_pair_zz((1, 3), 0.1, Couplings(24, 0, 104))


def test_z_zsq_instance_structure():
    prog = compile_pair_z_zsq(3, 2, 16 * TAU)
    assert angles_on(prog, 3) == [("12", pytest.approx(64 * TAU / 3)), ("23", pytest.approx(64 * TAU / 3))]
    durs = [s.duration for s in prog if isinstance(s, FreeEvolution)]
    assert durs == [pytest.approx(TAU / 39)] * 4
    ys = [(s.transition.value, s.angle) for s in prog
          if isinstance(s, SelectiveRotation) and s.site == 2]
    assert ys == [("23", math.pi), ("12", math.pi), ("12", -math.pi), ("23", -math.pi)]


@pytest.mark.parametrize("p, q", list(itertools.permutations((1, 2, 3), 2)))
def test_z_zsq_exact(p, q, Z):
    for phase in (0.0, 16 * TAU, -1.3):
        assert dev(compile_pair_z_zsq(p, q, phase), Z[p] @ Z[q] @ Z[q], phase) < 1e-12


def test_zsq_zsq_instance_angles():
    c = 16 * TAU
    prog = compile_pair_zsq_zsq((3, 2), c)
    a = 64 * TAU / 9
    assert angles_on(prog, 2) == [("12", pytest.approx(a)), ("23", pytest.approx(-a))]
    # the inner linear factor needs equal-sign angles for the identity to hold
    assert angles_on(prog, 3) == [("12", pytest.approx(a)), ("23", pytest.approx(a))] * 2
    phases = [s.angle for s in prog if isinstance(s, GlobalPhase)]
    assert phases == [pytest.approx(a)]
    durs = {round(s.duration, 15) for s in prog if isinstance(s, FreeEvolution)}
    assert durs == {round(TAU / 117, 15)}


@pytest.mark.parametrize("pair", list(itertools.permutations((1, 2, 3), 2)))
def test_zsq_zsq_exact(pair, Z):
    p, q = pair
    for phase in (0.0, 144 * TAU, -0.4):
        assert dev(compile_pair_zsq_zsq(pair, phase), Z[p] @ Z[p] @ Z[q] @ Z[q], phase) < 1e-12


# -- three-spin terms


def test_triple_zero_is_identity():
    assert len(compile_triple_zzz(0.0)) == 0
    assert len(compile_triple_zsqzz(0.0)) == 0


def test_triple_leg_angle_instance():
    c = 96 * TAU
    b12, b13 = leg_angles(c / 7)
    assert abs(b12) == abs(b13) == pytest.approx(math.sqrt(96 * TAU / 7))
    assert b12 * b13 == pytest.approx(-c / 7)
    prog = compile_triple_zzz(c, 7)
    assert prog.count(NonSelectiveRotation) == 7 * 6


@pytest.mark.parametrize("sign", [1, -1])
def test_triple_third_order(sign, Z):
    target = Z[1] @ Z[2] @ Z[3]
    bs = [0.4, 0.2, 0.1]
    errs = [spec_dev(compile_triple_zzz(sign * b * b, 1), target, sign * b * b) for b in bs]
    slope = np.polyfit(np.log(bs), np.log(errs), 1)[0]
    assert slope >= 2.5
    assert errs[0] / errs[1] >= 2.5


def test_triple_split_benefit(Z):
    target = Z[1] @ Z[2] @ Z[3]
    e1 = spec_dev(compile_triple_zzz(0.96, 1), target, 0.96)
    e7 = spec_dev(compile_triple_zzz(0.96, 7), target, 0.96)
    assert e7 < e1 / 1.5


def test_triple_zsqzz_scaling(Z):
    target = Z[1] @ Z[2] @ Z[3] @ Z[3]
    bs = [0.4, 0.2, 0.1]
    errs = [spec_dev(compile_triple_zsqzz(3 * b * b, 1), target, 3 * b * b) for b in bs]
    assert np.polyfit(np.log(bs), np.log(errs), 1)[0] >= 2.5


def test_triple_zsqzz_even_in_spin3(Z):
    target = Z[1] @ Z[2] @ Z[3] @ Z[3]
    c = 96 * TAU
    u = evaluate_program(compile_triple_zsqzz(c))
    p3 = evaluate_program(inversion_program(3))
    exact = expm_oracle(target, c)
    assert np.max(np.abs(p3.conj().T @ exact @ p3 - exact)) < 1e-12
    err = np.linalg.norm(u - exact, 2)
    assert np.linalg.norm(p3.conj().T @ u @ p3 - u, 2) <= 2 * err + 1e-12


def test_triple_rejects_bad_splits():
    with pytest.raises(ValueError):
        compile_triple_zzz(0.1, 0)


# -- full steps


def test_terms_cover_polynomial():
    assert {t.powers: t.coefficient for t in PROBLEM_TERMS} == PROBLEM_POLYNOMIAL
    assert len({t.kind for t in PROBLEM_TERMS}) == len(TermKind)


def test_problem_step_manifest_and_identity_at_zero():
    cfg = AnnealConfig()
    st0 = compile_problem_step(0, cfg)
    assert len(st0.program) == 0
    st = compile_problem_step(7, cfg)
    assert st.coefficient_table() == PROBLEM_POLYNOMIAL
    for term, phase in st.term_manifest:
        assert phase == pytest.approx(term.coefficient * TAU)


def three_spin_bound(step, cfg):
    total = 0.0
    for term, phase in step.term_manifest:
        if term.kind in (TermKind.TRIPLE_ZZZ, TermKind.TRIPLE_ZSQZZ):
            from qutrit_anneal.verification import _target

            total += spec_dev(compile_term(term, phase, cfg.split_three_spin), _target((1, 2, 3), term.powers),
                              phase)
    return total


@pytest.mark.parametrize("l", [3, 10])
def test_problem_step_error_bounded_by_three_spin_terms(l):
    cfg = AnnealConfig()
    st = compile_problem_step(l, cfg)
    err = spec_dev(st.program, h_problem(), cfg.dt * l / cfg.n_steps)
    bound = three_spin_bound(st, cfg)
    assert 0 < err <= bound + 1e-10


def test_exact_terms_only_is_exact():
    cfg = AnnealConfig()
    exact_terms = [t for t in PROBLEM_TERMS if t.kind not in (TermKind.TRIPLE_ZZZ, TermKind.TRIPLE_ZSQZZ)]
    st = compile_problem_step(10, cfg, terms=exact_terms)
    hp_exact = sum(t.coefficient * np.diag([a1**t.powers[0] * a2**t.powers[1] * b**t.powers[2]
                                            for a1 in (1, 0, -1) for a2 in (1, 0, -1) for b in (1, 0, -1)])
                   for t in exact_terms)
    assert dev(st.program, hp_exact, 0.01) < 1e-10


def test_term_order_independence():
    cfg = AnnealConfig()
    tau = 0.01
    parts = [compile_term(t, t.coefficient * tau, 7) for t in PROBLEM_TERMS]
    st = compile_problem_step(10, cfg)
    bound = three_spin_bound(st, cfg)
    base = evaluate_program(concat(parts))
    rev = evaluate_program(concat(parts[::-1]))
    rot = evaluate_program(concat(parts[5:] + parts[:5]))
    assert np.linalg.norm(base - rev, 2) <= 2 * bound
    assert np.linalg.norm(base - rot, 2) <= 2 * bound


def test_full_model_matches_ddi_up_to_phase():
    cfg = AnnealConfig(model="full")
    u_full = evaluate_program(compile_problem_step(6, cfg).program, cfg.couplings, cfg.params)
    u_ddi = evaluate_program(compile_problem_step(6, AnnealConfig()).program)
    assert equal_up_to_phase(u_ddi, u_full, 1e-8)[0]


def test_field_step():
    cfg = AnnealConfig(n_steps=10, dt=0.01, field=100)
    assert len(compile_field_step(10, cfg)) == 0
    prog = compile_field_step(0, cfg)
    assert [abs(s.angle) for s in prog] == [pytest.approx(1.0)] * 3
    for l in (0, 4, 9):
        assert dev(compile_field_step(l, cfg), h_field(100), (1 - l / 10) * 0.01) < 1e-12


def test_compile_anneal_single_step():
    cfg = AnnealConfig(n_steps=1, dt=0.01, field=100)
    steps = compile_anneal(cfg)
    assert [s.l for s in steps] == [0, 1]
    assert len(steps[0].program) == 3
    assert all(isinstance(p, NonSelectiveRotation) for p in steps[0].program)
    assert steps[1].program.count(FreeEvolution) > 0
    assert compile_field_step(1, cfg).steps == ()


def test_compile_anneal_field_schedule():
    cfg = AnnealConfig(n_steps=5, dt=0.02, field=30)
    total = 0.0
    for st in compile_anneal(cfg):
        field = [p for p in st.program if isinstance(p, NonSelectiveRotation) and p.axis is SpinAxis.X
                 and abs(abs(p.angle) - 30 * 0.02 * (1 - st.l / 5)) < 1e-12]
        assert len(field) == (3 if st.l < 5 else 0)
        total += sum(abs(p.angle) for p in field if p.site == 1)
    assert total == pytest.approx(30 * 0.02 * (5 + 1) / 2)


def test_compile_anneal_symmetrized_has_half_angles():
    cfg = AnnealConfig(n_steps=4, dt=0.01, field=100)
    st = compile_anneal(cfg, symmetrized=True)[1]
    first, last = st.program.steps[0], st.program.steps[-1]
    assert abs(first.angle) == abs(last.angle) == pytest.approx(0.5 * 100 * 0.01 * 0.75)


def test_compile_anneal_step_order_matches_ideal_factor():
    cfg = AnnealConfig(n_steps=4, dt=0.002, field=100)
    l = 2
    st = compile_anneal(cfg)[l]
    s = l / 4
    want = expm_oracle(h_field(100), (1 - s) * 0.002) @ expm_oracle(h_problem(), s * 0.002)
    bound = three_spin_bound(compile_problem_step(l, cfg), cfg)
    assert np.linalg.norm(evaluate_program(st.program) - want, 2) <= bound + 1e-10
