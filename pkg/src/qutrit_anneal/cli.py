"""Command-line interface: ``qutrit-anneal {anneal,sweep,compile,verify,spectrum}``."""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import sys

import numpy as np

from . import verification
from .compiler import compile_problem_step
from .engine import SWEEP_AXES, run, run_sweep
from .hamiltonians import (
    AnnealConfig,
    Couplings,
    Method,
    RunMode,
    SystemParams,
    factors,
    h_problem,
    problem_spectrum,
)
from .pulses import (
    evaluate_program,
    format_program,
    physical_program,
    program_to_json,
)
from .spinops import basis_label, equal_up_to_phase
from .verification import diag_exp, max_dev, spectral_dev

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("qutrit_anneal")


def _g12(x: float) -> str:
    return format(x, ".12g")


def _positive_float(text: str) -> float:
    x = float(text)
    if not np.isfinite(x) or x <= 0:
        raise argparse.ArgumentTypeError(f"must be a finite number > 0, got {text!r}")
    return x


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be an integer >= 1, got {text!r}")
    return n


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("-N", "--steps", type=_positive_int, default=10, help="number of time steps N")
    p.add_argument("--dt", type=_positive_float, default=0.01, help="time step")
    p.add_argument("--field", "--h-field", dest="field", type=float, default=100.0,
                   help="transverse field h")
    p.add_argument("--mode", choices=[m.value for m in Method], default="compiled")
    p.add_argument("--symmetrized", action="store_true", help="half-field / problem / half-field steps")
    p.add_argument("--splits", type=_positive_int, default=7, help="splits of each three-spin term")
    p.add_argument("--model", choices=("ddi", "full"), default="ddi", help="free-evolution model")
    p.add_argument("--json", action="store_true", help="structured output")
    p.add_argument("--out", metavar="FILE", help="write output to FILE instead of stdout")
    return p


def _config(args) -> AnnealConfig:
    return AnnealConfig(
        n_steps=args.steps,
        dt=args.dt,
        field=args.field,
        couplings=Couplings(),
        params=SystemParams(),
        mode=RunMode(Method(args.mode), args.symmetrized),
        split_three_spin=args.splits,
        model=args.model,
    )


def config_dict(cfg: AnnealConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d["mode"] = str(cfg.mode)
    return d


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- anneal ----------------------------------------------------------------------


def amplitude_table(state: np.ndarray) -> list[dict]:
    rows = []
    for k, c in enumerate(state):
        m1, m2, m3 = basis_label(k)
        rows.append({"m1": m1, "m2": m2, "m3": m3, "prob": float(abs(c) ** 2),
                     "phase": float(np.angle(c)) if abs(c) > 0 else 0.0})
    return rows


def cmd_anneal(args) -> int:
    cfg = _config(args)
    res = run(cfg)
    rows = amplitude_table(res.final_state)
    if args.json:
        doc = {"R": res.fidelity, "mode": str(res.mode), "final_norm": res.final_norm,
               "config": config_dict(res.config_echo), "amplitudes": rows}
        _emit(args, json.dumps(doc, indent=1) + "\n")
        return EXIT_OK
    out = io.StringIO()
    print(f"R = {res.fidelity:.6f}   (probability of |1,-1,1>, p=5 q=3)", file=out)
    print(f"mode = {res.mode}   N = {cfg.n_steps}  dt = {cfg.dt:g}  h = {cfg.field:g}  "
          f"T = {cfg.total_time:g}  splits = {cfg.split_three_spin}  model = {cfg.model}", file=out)
    print(f"final norm = {res.final_norm:.15f}", file=out)
    print(f"{'m1':>3} {'m2':>3} {'m3':>3} {'p':>3} {'q':>3} {'|C|^2':>12} {'phase':>9}", file=out)
    for r in rows:
        p, q = factors((r["m1"], r["m2"], r["m3"]))
        print(f"{r['m1']:>3} {r['m2']:>3} {r['m3']:>3} {p:>3} {q:>3} {r['prob']:12.6e} {r['phase']:9.4f}",
              file=out)
    _emit(args, out.getvalue())
    return EXIT_OK


# -- sweep -----------------------------------------------------------------------

CSV_HEADER = ["axis", "value", "N", "dt", "h", "mode", "splits", "R", "final_norm", "error"]


@dataclasses.dataclass(frozen=True)
class SweepSpec:
    axis: str
    start: float
    stop: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"axis must be one of {SWEEP_AXES}")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.start > self.stop:
            raise ValueError("start must be <= stop")
        if self.scale not in ("linear", "log"):
            raise ValueError("scale must be 'linear' or 'log'")
        if self.scale == "log" and self.start <= 0:
            raise ValueError("log scale needs start > 0")

    def values(self) -> list[float]:
        if self.count == 1:
            vals = [self.start]
        elif self.scale == "log":
            vals = list(np.geomspace(self.start, self.stop, self.count))
        else:
            vals = list(np.linspace(self.start, self.stop, self.count))
        if self.axis == "N":
            vals = [int(round(v)) for v in vals]
        return [float(v) if self.axis != "N" else v for v in vals]


def sweep_csv(points, base: AnnealConfig) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for pt in points:
        if pt.result is None:
            w.writerow([pt.axis, _g12(pt.value), "", "", "", str(base.mode), base.split_three_spin,
                        "", "", pt.error])
            continue
        cfg = pt.result.config_echo
        w.writerow([pt.axis, _g12(pt.value), cfg.n_steps, _g12(cfg.dt), _g12(cfg.field), str(cfg.mode),
                    cfg.split_three_spin, _g12(pt.result.fidelity), _g12(pt.result.final_norm), ""])
    return out.getvalue()


def cmd_sweep(args) -> int:
    try:
        spec = SweepSpec(args.axis, args.start, args.stop, args.count, args.scale)
    except ValueError as exc:
        print(f"sweep: {exc}", file=sys.stderr)
        return EXIT_USAGE
    base = _config(args)
    points = run_sweep(base, spec.axis, spec.values(), base.mode, workers=args.workers)
    _emit(args, sweep_csv(points, base))
    return EXIT_FAIL if any(p.result is None for p in points) else EXIT_OK


# -- compile ---------------------------------------------------------------------


def _three_spin_bound(step, cfg: AnnealConfig) -> float:
    from .compiler import TermKind, compile_term
    from .verification import _target

    bound = 0.0
    for term, phase in step.term_manifest:
        if term.kind in (TermKind.TRIPLE_ZZZ, TermKind.TRIPLE_ZSQZZ) and phase != 0:
            u = evaluate_program(compile_term(term, phase, cfg.split_three_spin, cfg.couplings),
                                 cfg.couplings, cfg.params)
            bound += spectral_dev(u, diag_exp(_target((1, 2, 3), term.powers), phase))
    return bound


def cmd_compile(args) -> int:
    cfg = _config(args)
    try:
        step = compile_problem_step(args.l, cfg)
    except ValueError as exc:
        print(f"compile: {exc}", file=sys.stderr)
        return EXIT_USAGE
    prog = step.program
    if args.physical:
        prog = physical_program(prog, cfg.couplings, cfg.params)
    manifest = [{"term": t.name, "kind": t.kind.value, "sites": list(t.sites),
                 "coefficient": t.coefficient, "phase": ph} for t, ph in step.term_manifest]
    report = None
    status = EXIT_OK
    if args.verify:
        u = evaluate_program(prog, cfg.couplings, cfg.params)
        exact = diag_exp(h_problem(), cfg.dt * args.l / cfg.n_steps)
        if args.physical:
            # wrapped durations only change the global phase
            _, phase = equal_up_to_phase(u, exact, tol=np.inf)
            u = np.exp(1j * phase) * u
        bound = _three_spin_bound(step, cfg)
        tol = args.tol if args.tol is not None else bound + 1e-10
        dev2 = spectral_dev(u, exact)
        report = {"max_deviation": max_dev(u, exact), "spectral_deviation": dev2,
                  "three_spin_bound": bound, "tolerance": tol, "passed": bool(dev2 <= tol)}
        if not report["passed"]:
            status = EXIT_FAIL
    if args.json:
        doc = json.loads(program_to_json(prog))
        doc["manifest"] = manifest
        if report:
            doc["verify"] = report
        text = json.dumps(doc, indent=1) + "\n"
    else:
        lines = [format_program(prog).rstrip("\n")]
        lines.append(f"# steps: {len(prog)}")
        for m in manifest:
            lines.append(f"# term {m['term']} kind={m['kind']} coefficient={m['coefficient']} "
                         f"phase={m['phase'] + 0.0:.17g}")
        if report:
            for k, v in report.items():
                lines.append(f"# verify {k}={v}")
        text = "\n".join(lines) + "\n"
    _emit(args, text)
    if status != EXIT_OK:
        print("compile: verification failed", file=sys.stderr)
    return status


# -- verify / spectrum -----------------------------------------------------------


def cmd_verify(args) -> int:
    checks = verification.run_all(tol=args.tol)
    if args.json:
        _emit(args, json.dumps([dataclasses.asdict(c) for c in checks], indent=1) + "\n")
    else:
        _emit(args, "\n".join(c.row() for c in checks) + "\n")
    failed = [c for c in checks if not c.passed]
    if failed:
        print(f"verify: {len(failed)} check(s) failed", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_spectrum(args) -> int:
    rows = []
    for lab, energy in problem_spectrum():
        p, q = factors(lab)
        rows.append({"m1": lab.m1, "m2": lab.m2, "m3": lab.m3, "p": p, "q": q, "energy": energy,
                     "ground": energy == 0})
    if args.json:
        _emit(args, json.dumps(rows, indent=1) + "\n")
        return EXIT_OK
    out = io.StringIO()
    print(f"{'m1':>3} {'m2':>3} {'m3':>3} {'p':>3} {'q':>3} {'energy':>7}", file=out)
    for r in rows:
        flag = "  <- ground state (p*q = 15)" if r["ground"] else ""
        print(f"{r['m1']:>3} {r['m2']:>3} {r['m3']:>3} {r['p']:>3} {r['q']:>3} {r['energy']:>7}{flag}",
              file=out)
    _emit(args, out.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="qutrit-anneal",
                                     description="Quantum annealing of 15 = 5 x 3 on three qutrits.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("anneal", parents=[common], help="run one anneal and report R").set_defaults(fn=cmd_anneal)

    sp = sub.add_parser("sweep", parents=[common], help="sweep N, dt or h and write CSV")
    sp.add_argument("--axis", choices=SWEEP_AXES, required=True)
    sp.add_argument("--start", type=float, required=True)
    sp.add_argument("--stop", type=float, required=True)
    sp.add_argument("--count", type=_positive_int, default=10)
    sp.add_argument("--scale", choices=("linear", "log"), default="linear")
    sp.add_argument("--workers", type=_positive_int, default=1)
    sp.set_defaults(fn=cmd_sweep)

    cp = sub.add_parser("compile", parents=[common], help="emit the pulse program of one problem step")
    cp.add_argument("-l", "--l", dest="l", type=int, required=True, help="discrete time l (0..N)")
    cp.add_argument("--physical", action="store_true", help="rewrite durations as nonnegative equivalents")
    cp.add_argument("--verify", action="store_true", help="compare against the exact problem factor")
    cp.add_argument("--tol", type=float, default=None, help="verification tolerance (spectral norm)")
    cp.set_defaults(fn=cmd_compile)

    vp = sub.add_parser("verify", help="run the identity and scaling checks")
    vp.add_argument("--tol", type=float, default=1e-10)
    vp.add_argument("--json", action="store_true")
    vp.add_argument("--out", metavar="FILE")
    vp.set_defaults(fn=cmd_verify)

    pp = sub.add_parser("spectrum", help="list the 27 problem energies")
    pp.add_argument("--json", action="store_true")
    pp.add_argument("--out", metavar="FILE")
    pp.set_defaults(fn=cmd_spectrum)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"{args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except BrokenPipeError:
        # downstream reader (head, less) closed early
        sys.stderr.close()
        return EXIT_OK
    except ValueError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
