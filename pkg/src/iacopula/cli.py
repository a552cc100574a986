"""Command-line front end.

Every subcommand prints one artifact (JSON or a table) and exits with 0 on
success or a passing check, 1 on a failing check (including "not a model"),
and 2 on bad input.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .conformance import (
    check_extraction_against,
    check_ia_at,
    check_ia_randomized,
    check_m_neutrality,
    check_m_neutrality_randomized,
    extract_copula,
    extracted_copula,
    extraction_grid,
    verify_extraction_consistency,
    verify_factorization,
)
from .copulas import CopulaSpec, check_copula_axioms, max_grid_depth
from .io import InputError, dumps, load_json_arg, parse_profile
from .joint import build_joint
from .marginals import collapse_profile
from .oracles import CopulaModel, OracleError, available_models, get_model
from .tables import render_slices, render_table

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _copula(value, n=None) -> CopulaSpec:
    """``--copula`` takes a family name, inline JSON, or a JSON file."""
    text = value.strip()
    obj = load_json_arg(value, "--copula") if text.startswith("{") or os.path.exists(value) else text
    return CopulaSpec.from_dict(obj, dim=n)


def _profile(args):
    if args.profile is None:
        return None
    return parse_profile(load_json_arg(args.profile, "--profile"))


def _json_list(value, what):
    obj = load_json_arg(value, what)
    if not isinstance(obj, list):
        raise InputError(f"{what} must be a JSON array")
    return obj


def _default_tol(args, spec, closed=1e-9, gaussian=1e-5):
    if args.tol is not None:
        return args.tol
    if spec is not None and getattr(spec, "family", None) == "gaussian":
        return gaussian
    return closed


def _oracle(args, n):
    """The model under test and, when it is a copula model, its spec."""
    if (args.model is None) == (args.copula is None):
        raise InputError("give exactly one of --model or --copula")
    if args.copula is not None:
        spec = _copula(args.copula, n)
        return CopulaModel(spec, seed=args.seed), spec
    try:
        return get_model(args.model, n), None
    except KeyError as exc:
        raise InputError(exc.args[0]) from None


def _dims(args, p):
    if p is not None:
        if args.dims is not None and args.dims != p.n:
            raise InputError(f"--dims {args.dims} disagrees with a profile of {p.n} marginals")
        return p.n
    return args.dims if args.dims is not None else 2


def _report(rep):
    return rep.to_dict(), (EXIT_OK if rep.passed else EXIT_FAIL)


def cmd_build(args):
    p = _profile(args)
    if p is None:
        raise InputError("build needs --profile")
    if args.copula is None:
        raise InputError("build needs --copula")
    spec = _copula(args.copula, p.n)
    jp = build_joint(spec, p, seed=args.seed)
    if args.format == "table" and jp.n <= 2:
        return render_table(jp), EXIT_OK
    if args.format == "table" and args.slices:
        return dumps(jp.to_dict()) + "\n\n" + render_slices(jp), EXIT_OK
    return jp.to_dict(), EXIT_OK


def cmd_collapse(args):
    p = _profile(args)
    if p is None:
        raise InputError("collapse needs --profile")
    i = 1 if args.i is None else args.i
    if args.j is None:
        raise InputError("collapse needs --j")
    return collapse_profile(p, i, args.j).tolist(), EXIT_OK


def cmd_check_ia(args):
    p = _profile(args)
    n = _dims(args, p)
    f, spec = _oracle(args, n)
    tol = _default_tol(args, spec)
    if p is not None:
        if args.j is None:
            raise InputError("check-ia with --profile needs --j")
        rep = check_ia_at(f, p, 1 if args.i is None else args.i, args.j, tol)
    else:
        rep = check_ia_randomized(f, args.trials, args.seed, n, args.zmax, tol)
    return _report(rep)


def cmd_extract(args):
    n = args.dims
    point = None
    if args.x is not None:
        point = np.asarray(_json_list(args.x, "--x"), dtype=float)
        n = point.size if n is None else n
        if point.size != n:
            raise InputError(f"--x has {point.size} coordinates but --dims is {n}")
    n = 2 if n is None else n
    f, spec = _oracle(args, n)
    k = 6 if args.grid_depth is None else args.grid_depth
    if point is not None:
        return {"x": point.tolist(), "value": extract_copula(f, point)}, EXIT_OK
    if args.against is not None:
        hyp = _copula(args.against, n)
        return _report(check_extraction_against(f, hyp, k, _default_tol(args, hyp)))
    if args.verify:
        hyp = extracted_copula(f, n, k)
        tol = _default_tol(args, spec)
        return _report(verify_extraction_consistency(f, hyp, args.trials, args.seed, tol, args.zmax))
    grid = extraction_grid(f, n, k)
    return {"n": n, "depth": k, "values": grid.reshape(-1).tolist()}, EXIT_OK


def cmd_check_neutrality(args):
    p = _profile(args)
    n = _dims(args, p)
    f, spec = _oracle(args, n)
    tol = _default_tol(args, spec, closed=1e-12)
    if p is not None:
        if args.sigma is None:
            raise InputError("check-neutrality with --profile needs --sigma")
        sigma = _json_list(args.sigma, "--sigma")
        rep = check_m_neutrality(f, p, 1 if args.i is None else args.i, sigma, tol)
    else:
        M = None if args.M is None else _json_list(args.M, "--M")
        rep = check_m_neutrality_randomized(f, args.trials, args.seed, n, args.zmax, M, tol)
    return _report(rep)


def cmd_verify_factorization(args):
    if args.copula is None:
        raise InputError("verify-factorization needs --copula")
    spec = _copula(args.copula, args.dims)
    if args.M is None:
        raise InputError("verify-factorization needs --M, e.g. --M '[1]'")
    M = _json_list(args.M, "--M")
    tol = args.tol if args.tol is not None else (1e-5 if spec.family == "gaussian" else 1e-12)
    k = 5 if args.grid_depth is None else args.grid_depth
    return _report(verify_factorization(spec, M, k, tol))


def cmd_axioms(args):
    if args.copula is None:
        raise InputError("axioms needs --copula")
    spec = _copula(args.copula, args.dims)
    k = args.grid_depth if args.grid_depth is not None else min(6, max_grid_depth(spec.dim))
    rep = check_copula_axioms(spec, k, seed=args.seed)
    return rep.to_dict(), (EXIT_OK if rep.passed else EXIT_FAIL)


COMMANDS = {
    "build": (cmd_build, "joint pmf of a copula model"),
    "collapse": (cmd_collapse, "merge bins j and j+1 of marginal i"),
    "check-ia": (cmd_check_ia, "test invariance under bin aggregation"),
    "extract": (cmd_extract, "extract the copula of a model"),
    "check-neutrality": (cmd_check_neutrality, "test invariance under bin relabeling"),
    "verify-factorization": (cmd_verify_factorization, "test C(x) = prod_{i in M} x_i * C(rest)"),
    "axioms": (cmd_axioms, "check the copula axioms on a dyadic grid"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--copula", help="family name, JSON spec, or path to a JSON spec")
    common.add_argument("--profile", help="JSON array of marginals, inline or a file path")
    common.add_argument("--model", help=f"oracle name ({', '.join(available_models())}) or exec:<command>")
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None, help="default depends on family")
    common.add_argument("--format", choices=("json", "table"), default=None)
    common.add_argument("--grid-depth", type=int, default=None)
    common.add_argument("--out", help="write the artifact here instead of stdout")
    common.add_argument("--dims", type=int, default=None, help="number of marginals (default 2)")
    common.add_argument("--zmax", type=int, default=6, help="largest random support size")
    common.add_argument("--i", type=int, default=None, help="dimension index, 1-based")
    common.add_argument("--j", type=int, default=None, help="merge index, 1-based")
    common.add_argument("--sigma", help="permutation as a JSON array, e.g. [2,1,3]")
    common.add_argument("--M", help="dimension subset as a JSON array, e.g. [1]")
    common.add_argument("--x", help="extraction point as a JSON array")
    common.add_argument("--against", help="copula spec to compare an extracted grid with")
    common.add_argument("--verify", action="store_true", help="check the model against its own extracted copula")
    common.add_argument("--slices", action="store_true", help="per-slice tables for n >= 3")

    parser = argparse.ArgumentParser(prog="iacopula", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def _emit(artifact, args):
    text = artifact if isinstance(artifact, str) else dumps(artifact)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.format is None:
        args.format = "table" if args.command == "build" else "json"
    func = COMMANDS[args.command][0]
    try:
        artifact, status = func(args)
    except (ValueError, OracleError, IndexError) as exc:
        # input, marginal, copula and joint errors are all ValueErrors
        print(f"iacopula {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(artifact, args)
    return status


if __name__ == "__main__":
    sys.exit(main())
