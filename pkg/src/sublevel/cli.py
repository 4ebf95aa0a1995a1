"""``sublevel`` command line.

Exit codes: 0 success, 1 exhausted or inconclusive, 2 input error. Tables go
to stdout (or ``--out DIR``) as LF-terminated CSV with a header row.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import corpus, selftest
from .degeneracy import annihilator_test, decide_degeneracy
from .density import SolverCapExceeded, density_curve
from .exactpoly import DimensionError
from .measure import (
    DEFAULT_EPSILONS,
    DEFAULT_RESOLUTION,
    degenerate_adversary,
    measure_periodic_sublevel,
    measure_sublevel,
    zero_functions,
)
from .oscint import CutoffSpec, ResolutionTooLow, cancelling_functions, decay_curve
from .problem import Frequency, ProblemError, format_rational, parse_problem_text, phase_to_dict
from .witness import SearchSchedule, Witness, WitnessFound, find_witness, integerize

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2
DEFAULT_LAMBDAS = tuple(Frequency(Fraction(2**k)) for k in range(8))


class InputError(Exception):
    pass


class Inconclusive(Exception):
    pass


def csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def witness_csv(w: Witness) -> str:
    d = w.dimension
    return csv_text([f"s{i + 1}" for i in range(d)] + ["c_s"],
                     [list(p) + [format_rational(c) if c.denominator != 1 else c.numerator]
                      for p, c in zip(w.points, w.coeffs)])


def load_witness_csv(text: str) -> Witness:
    rows = list(csv.reader(io.StringIO(text)))[1:]
    return Witness(tuple(tuple(int(v) for v in r[:-1]) for r in rows),
                   tuple(Fraction(r[-1]) for r in rows))


def _load(path: Optional[str]):
    if path is None:
        raise InputError("a problem file is required")
    try:
        return parse_problem_text(corpus.resolve(path))
    except FileNotFoundError:
        raise InputError(f"no such problem file: {path}") from None


def _need_phase(prob):
    if prob.phase is None:
        raise InputError("problem has no 'phase'")
    return prob


def _emit(args, stem: str, text: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / f"{stem}.csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _stem(args, prob, command: str) -> str:
    name = prob.name if prob is not None and prob.name else Path(args.problem or "density").stem
    return f"{name}_{command}"


def cmd_analyze(args) -> int:
    prob = _need_phase(_load(args.problem))
    verdict = decide_degeneracy(prob.phase, prob.maps)
    report: dict = {"name": prob.name, "verdict": verdict.label}
    if verdict.degenerate:
        report["decomposition"] = [phase_to_dict(p) for p in verdict.decomposition]
    else:
        cert = verdict.certificate
        report["certificate"] = {
            "monomial": list(cert.monomial),
            "span_rank": cert.span_rank,
            "monomial_count": cert.monomial_count,
        }
    ann = None if prob.maps.invertible_maps else annihilator_test(prob.phase, prob.maps)
    report["annihilator"] = str(ann.operator) if ann else None
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{_stem(args, prob, 'analyze')}.json").write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _moduli(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise InputError(f"--modulus expects integers like 1,2, got {text!r}") from None


def cmd_witness(args) -> int:
    prob = _need_phase(_load(args.problem))
    budget = args.budget or prob.budget or SearchSchedule().max_radius
    sched = SearchSchedule(max_radius=budget, modulus_sequence=_moduli(args.modulus))
    found = find_witness(prob.phase, prob.maps, sched)
    if not isinstance(found, WitnessFound):
        raise Inconclusive(f"no witness in cubes up to radius {budget}, moduli {args.modulus}")
    w = integerize(found.witness)
    print(f"witness: {len(w.points)} points, radius {found.radius}, modulus {found.modulus}, "
          f"value {format_rational(w.value(prob.phase))}", file=sys.stderr)
    _emit(args, _stem(args, prob, "witness"), witness_csv(w))
    return EXIT_OK


SUBLEVEL_HEADER = ["epsilon", "lambda", "resolution", "mode", "sample_count", "hits",
                   "estimated_measure", "volume"]


def _report_row(rep, lam: str):
    return [format_rational(rep.epsilon), lam, rep.resolution, rep.mode, rep.sample_count,
            rep.hits, repr(rep.estimated_measure), repr(rep.volume)]


def _adversary_or_zero(args, prob, eps):
    if args.functions == "zero":
        return zero_functions(prob.maps)
    verdict = decide_degeneracy(prob.phase, prob.maps)
    if not verdict.degenerate:
        raise Inconclusive("phase is nondegenerate; no adversary exists")
    return degenerate_adversary(prob.phase, prob.maps, verdict.decomposition, eps,
                                prob.box_or_default())[0]


def cmd_sublevel(args) -> int:
    prob = _need_phase(_load(args.problem))
    box = prob.box_or_default()
    rows = []
    for eps in prob.epsilons or DEFAULT_EPSILONS:
        fns = _adversary_or_zero(args, prob, eps)
        rep = measure_sublevel(prob.phase, prob.maps, fns, eps, box,
                               args.resolution or DEFAULT_RESOLUTION, args.mode, args.seed)
        rows.append(_report_row(rep, "1"))
    _emit(args, _stem(args, prob, "sublevel"), csv_text(SUBLEVEL_HEADER, rows))
    return EXIT_OK


def cmd_periodic(args) -> int:
    prob = _need_phase(_load(args.problem))
    box = prob.box_or_default()
    rows = []
    for lam in prob.lambdas or (Frequency(Fraction(1)),):
        for eps in prob.epsilons or DEFAULT_EPSILONS:
            rep = measure_periodic_sublevel(prob.phase, prob.maps, zero_functions(prob.maps), eps,
                                            float(lam), box, args.resolution or DEFAULT_RESOLUTION,
                                            args.mode, args.seed)
            rows.append(_report_row(rep, str(lam)))
    _emit(args, _stem(args, prob, "periodic"), csv_text(SUBLEVEL_HEADER, rows))
    return EXIT_OK


def _pattern(text: str, d: int):
    try:
        pts = [tuple(int(v) for v in chunk.split(",")) for chunk in text.split(";")]
    except ValueError:
        raise InputError(f"bad --pattern {text!r}") from None
    if d == 1 and len(pts) == 1:
        pts = [(v,) for v in pts[0]]
    if any(len(p) != d for p in pts):
        raise InputError(f"--pattern points must have {d} coordinates; separate points with ';'")
    return pts


def cmd_density(args) -> int:
    prob = _load(args.problem) if args.problem else None
    if args.pattern:
        pattern = _pattern(args.pattern, args.d)
    elif prob is not None and prob.pattern:
        pattern = prob.pattern
    else:
        raise InputError("give --pattern or a problem file with 'pattern'")
    top = args.N or (prob.budget if prob is not None and prob.budget else 9)
    rows = density_curve(pattern, range(1, top + 1), seed=args.seed)
    text = csv_text(["N", "max_size", "density", "exact"],
                    [[r.N, r.max_size, format_rational(r.density), str(r.exact).lower()] for r in rows])
    _emit(args, _stem(args, prob, "density"), text)
    return EXIT_OK


def cmd_oscint(args) -> int:
    prob = _need_phase(_load(args.problem))
    eta = CutoffSpec(prob.box_or_default())
    lams = [float(l) for l in (prob.lambdas or DEFAULT_LAMBDAS)]
    if args.functions == "zero":
        fns = None
    else:
        verdict = decide_degeneracy(prob.phase, prob.maps)
        if not verdict.degenerate:
            raise Inconclusive("phase is nondegenerate; no adversary exists")
        fns = lambda lam: cancelling_functions(prob.phase, prob.maps, verdict.decomposition, lam, eta.box)
    policy = (lambda lam: args.resolution) if args.resolution else None
    curve = decay_curve(prob.phase, prob.maps, fns, eta, lams, policy)
    print(f"fitted_slope {curve.fitted_slope!r}", file=sys.stderr)
    text = csv_text(["lambda", "magnitude", "resolution"],
                    [[repr(r.lam), repr(r.magnitude), r.resolution] for r in curve.rows])
    _emit(args, _stem(args, prob, "oscint"), text)
    return EXIT_OK


def cmd_selftest(args) -> int:
    return EXIT_OK if selftest.run() else EXIT_INCONCLUSIVE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--resolution", type=int, help="samples per axis")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--mode", choices=["grid", "mc"], default="grid")
    common.add_argument("--out", metavar="DIR", help="write the report into DIR instead of stdout")

    parser = argparse.ArgumentParser(prog="sublevel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, problem=True):
        p = sub.add_parser(name, parents=[common], help=help_)
        if problem:
            p.add_argument("problem", nargs="?" if name == "density" else None)
        p.set_defaults(func=fn)
        return p

    add("analyze", cmd_analyze, "decide degeneracy and try the kernel annihilator")
    w = add("witness", cmd_witness, "search for a finite witness")
    w.add_argument("--budget", type=int, help="largest cube radius")
    w.add_argument("--modulus", default="1,2", help="comma-separated cube moduli")
    for name, fn, help_ in (("sublevel", cmd_sublevel, "sublevel-set measure over the epsilon sweep"),
                            ("oscint", cmd_oscint, "oscillatory-integral decay curve")):
        p = add(name, fn, help_)
        p.add_argument("--functions", choices=["zero", "adversary"], default="zero",
                       help="f_j = 0 (f_j = 1 for oscint) or the degenerate adversary")
    add("periodic", cmd_periodic, "periodic sublevel measure over lambda and epsilon")
    d = add("density", cmd_density, "largest pattern-free subsets of {1..N}^d")
    d.add_argument("--pattern", help="points separated by ';', coordinates by ','")
    d.add_argument("--d", type=int, default=1, help="pattern dimension")
    d.add_argument("--N", type=int, help="largest grid side")
    add("selftest", cmd_selftest, "run the fast invariant checks", problem=False)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Inconclusive as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (InputError, ProblemError, DimensionError, ResolutionTooLow, SolverCapExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
