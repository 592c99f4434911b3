"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 property falsified or report inconsistent.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io, tolerances
from .algebra_core import DimensionError, DomainError, MatrixAlgebra, NotPositiveError, fk_determinant
from .certifier import FAMILIES, condition_report, falsification_fuzz
from .factorization import ConsistencyError, FactorizationError, NotInDError, factor_cholesky, \
    factor_projection, unique_state_extension_check
from .invariant_subspaces import NOT_FOUND, NotInvariantError, beurling_witness, bn_factor, \
    is_simply_invariant
from .subalgebra import NotTracialError, l2_density_check, tau_maximality_check
from .szego import SzegoNumericsError, SzegoOptions, checked_szego_infimum

EXIT_OK, EXIT_INPUT, EXIT_FALSIFIED = 0, 1, 2

EVIDENCE_KIND = {"a": "exact", "b": "empirical", "c": "empirical", "d": "optimizer", "e": "exact", "f": "exact"}
CONDITION_NAMES = {
    "a": "A + A* dense",
    "b": "factorization b = a*a",
    "c": "logmodularity",
    "d": "Szego equality",
    "e": "tau-maximal and unique extension",
    "f": "unique extension and density",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _emit(args, payload: dict, human: str) -> None:
    if args.json:
        sys.stdout.write(io.dumps(payload) + "\n")
    else:
        sys.stdout.write(human.rstrip("\n") + "\n")


def _fmt(x) -> str:
    return "n/a" if x is None else f"{x:.6g}"


# -- commands ---------------------------------------------------------------

def cmd_validate(args) -> int:
    try:
        S = io.load_algebra(args.algebra)
    except NotTracialError as exc:
        _emit(args, {"tracial": False, "reason": str(exc), "residual": exc.residual},
              f"not tracial: {exc}")
        return EXIT_FALSIFIED
    rep = tau_maximality_check(S)
    payload = {"tracial": True, "kind": S.kind, "n": S.n, "dim_A": S.dim_A, "dim_D": S.dim_D,
               "dim_A0": S.dim_A0, "tau_maximal": rep.maximal, "annihilator_dim": rep.dim_annihilator,
               "dense": l2_density_check(S), "unique_extension": bool(unique_state_extension_check(S))}
    human = "\n".join(f"{k}: {v}" for k, v in payload.items())
    _emit(args, payload, human)
    return EXIT_OK


def cmd_certify(args) -> int:
    S = io.load_algebra(args.algebra)
    rep = condition_report(S, trials=args.trials, seed=args.seed, szego_h_samples=args.h_samples)
    lines = []
    for k, v in rep.conditions.items():
        lines.append(f"({k}) {CONDITION_NAMES[k]:<34} {str(v).lower():<13} [{EVIDENCE_KIND[k]}]")
    for s in rep.evidence["d"]["samples"]:
        lines.append(f"    szego sample: {s['status']}, Delta(h) = {_fmt(s['delta_h'])}, "
                     f"upper = {_fmt(s['upper_bound'])}, lower = {_fmt(s['lower_bound'])}")
    lines.append(f"consistency: {str(rep.consistency).lower()}")
    _emit(args, rep.to_dict(), "\n".join(lines))
    return EXIT_OK if rep.consistency else EXIT_FALSIFIED


def cmd_det(args) -> int:
    x = io.load_matrix(args.matrix)
    d = fk_determinant(MatrixAlgebra(x.shape[0]), x)
    _emit(args, {"determinant": d, "n": x.shape[0]}, repr(d))
    return EXIT_OK


def cmd_factor(args) -> int:
    S = io.load_algebra(args.algebra)
    b = io.load_matrix(args.b, S.n)
    method = factor_projection if args.method == "projection" else factor_cholesky
    try:
        res = method(S, b, args.side)
    except NotInDError as exc:
        _emit(args, {"factorized": False, "reason": str(exc), "off_diagonal": exc.off_diagonal},
              f"no factorization: {exc}")
        return EXIT_FALSIFIED
    except FactorizationError as exc:
        _emit(args, {"factorized": False, "reason": str(exc)}, f"no factorization: {exc}")
        return EXIT_FALSIFIED
    payload = {"factorized": True, "method": args.method, **res.to_dict()}
    human = (f"side: {res.side}\nresidual: {_fmt(res.residual)}\n"
             f"membership a: {_fmt(res.membership_a)}\nmembership a^-1: {_fmt(res.membership_a_inv)}\n"
             f"phi certificate: {_fmt(res.phi_certificate)}\nfactor:\n{np.array2string(res.factor, precision=6)}")
    _emit(args, payload, human)
    return EXIT_OK


def cmd_szego(args) -> int:
    S = io.load_algebra(args.algebra)
    h = io.load_matrix(args.h, S.n)
    res = checked_szego_infimum(S, h, SzegoOptions(seed=args.seed))
    human = (f"status: {res.status}\nDelta(h): {_fmt(res.delta_h)}\n"
             f"infimum (upper bound): {_fmt(res.upper_bound)}\nlower bound: {_fmt(res.lower_bound)}\n"
             f"gap: {_fmt(res.gap)}")
    _emit(args, res.to_dict(), human)
    return EXIT_FALSIFIED if res.status == "fails_certified" else EXIT_OK


def cmd_beurling(args) -> int:
    S = io.load_algebra(args.algebra)
    if (args.subspace is None) == (args.f is None):
        raise io.InputError("give exactly one of --subspace or --f")
    if args.subspace is not None:
        W = io.load_subspace(args.subspace, S.alg)
        simple, omega = is_simply_invariant(S, W)
        if not simple:
            raise io.InputError("subspace is not simply invariant")
        u = beurling_witness(S, W, seed=args.seed)
        payload = {"found": u is not NOT_FOUND, "wandering_dim": omega.dim}
        if u is not NOT_FOUND:
            payload["unitary"] = io.matrix_to_json(u)
        human = f"wandering subspace dim: {omega.dim}\nwitness: {'found' if u is not NOT_FOUND else 'NotFound'}"
    else:
        f = io.load_matrix(args.f, S.n)
        out = bn_factor(S, f, seed=args.seed)
        payload = {"found": out is not NOT_FOUND}
        human = "witness: NotFound"
        if out is not NOT_FOUND:
            u, h = out
            payload.update(unitary=io.matrix_to_json(u), h=io.matrix_to_json(h),
                           round_trip=float(np.linalg.norm(u @ h - f) / np.linalg.norm(f)))
            human = f"witness: found\nround trip |uh - f|/|f|: {_fmt(payload['round_trip'])}"
    _emit(args, payload, human)
    return EXIT_OK


def cmd_fuzz(args) -> int:
    families = [f.strip() for f in args.families.split(",") if f.strip()]
    bad = [f for f in families if f not in FAMILIES]
    if bad:
        raise io.InputError(f"unknown families {bad}; choose from {list(FAMILIES)}")
    if not 1 <= args.n_min <= args.n_max <= 12:
        raise io.InputError("need 1 <= n-min <= n-max <= 12")
    summary = falsification_fuzz(families, (args.n_min, args.n_max), args.trials, args.seed,
                                 report_trials=args.report_trials, szego_h_samples=args.h_samples)
    human = "\n".join(
        [f"reports: {summary['reports']}", f"consistent: {summary['consistent']}",
         f"falsifications: {summary['falsifications']}", f"all true: {summary['all_true']}",
         f"all false: {summary['all_false']}",
         f"inconclusive conditions: {summary['inconclusive_conditions']}"])
    _emit(args, summary, human)
    return EXIT_FALSIFIED if summary["falsifications"] else EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0, help="seed for every stochastic battery")
    common.add_argument("--tol", type=float, default=None,
                        help="override membership/factor/identity/subspace tolerances uniformly")

    p = _Parser(prog="nchinf", description="Finite-dimensional checks for subdiagonal algebras.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", parents=[common], help="build and validate an algebra spec")
    s.add_argument("algebra")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("certify", parents=[common], help="evaluate the six equivalent conditions")
    s.add_argument("algebra")
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--h-samples", type=int, default=5)
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("det", parents=[common], help="Fuglede-Kadison determinant of a matrix")
    s.add_argument("--matrix", required=True)
    s.set_defaults(func=cmd_det)

    s = sub.add_parser("factor", parents=[common], help="factor a positive matrix through A")
    s.add_argument("algebra")
    s.add_argument("--b", required=True)
    s.add_argument("--side", choices=("right", "left"), default="right")
    s.add_argument("--method", choices=("projection", "cholesky"), default="projection")
    s.set_defaults(func=cmd_factor)

    s = sub.add_parser("szego", parents=[common], help="Szego infimum for a positive h")
    s.add_argument("algebra")
    s.add_argument("--h", required=True)
    s.set_defaults(func=cmd_szego)

    s = sub.add_parser("beurling", parents=[common], help="Beurling witness or f = u h factorization")
    s.add_argument("algebra")
    s.add_argument("--subspace")
    s.add_argument("--f")
    s.set_defaults(func=cmd_beurling)

    s = sub.add_parser("fuzz", parents=[common], help="falsification fuzzing over algebra families")
    s.add_argument("--families", default="nest")
    s.add_argument("--n-min", type=int, default=2)
    s.add_argument("--n-max", type=int, default=6)
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--report-trials", type=int, default=20)
    s.add_argument("--h-samples", type=int, default=5)
    s.set_defaults(func=cmd_fuzz)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors exit 1, --help exits 0
        return int(exc.code or 0)
    tol = tolerances.uniform(args.tol) if args.tol is not None else None
    try:
        with tolerances.use_tolerances(tol):
            return args.func(args)
    except (io.InputError, DimensionError, DomainError, NotPositiveError, NotTracialError,
            NotInvariantError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (SzegoNumericsError, ConsistencyError) as exc:
        sys.stderr.write(f"falsified: {exc}\n")
        return EXIT_FALSIFIED


if __name__ == "__main__":
    sys.exit(main())
