"""Command-line front door: matrix analysis, verification suites, and
symbolic determinant export.

Exit codes: 0 success, 1 suite failure (report still emitted), 2 malformed
input or config (including a dimension above the symbolic bound), 3
conjugation requested on a non-regular matrix.

The environment variable AFFINV_NMAX overrides the symbolic feasibility
bound (default 4).  All JSON output is emitted with sorted keys and fixed
indentation so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .exactmat import (
    MatrixJSONError,
    char_poly,
    matrix_from_json,
    matrix_to_json,
    min_poly,
)
from .krylov import (
    NotRegular,
    conjugate_into_omega,
    in_omega,
    is_regular,
    krylov_determinant,
)
from .exactmat import format_rational
from .report import SuiteConfigError, run_suite_from_config
from .sympoly import (
    DEFAULT_N_MAX,
    FeasibilityBoundError,
    homogeneous_degree,
    symbolic_krylov_determinant,
    term_list_json,
)

EXIT_OK = 0
EXIT_SUITE_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_NOT_REGULAR = 3


def _n_max() -> int:
    raw = os.environ.get("AFFINV_NMAX")
    if raw is None:
        return DEFAULT_N_MAX
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(EXIT_BAD_INPUT)


def _read_json(path: str | None):
    try:
        if path is None or path == "-":
            return json.load(sys.stdin)
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read JSON input: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_BAD_INPUT)


def _dump(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    try:
        x = matrix_from_json(_read_json(args.input))
    except MatrixJSONError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    conjugator = None
    if args.conjugate:
        g = conjugate_into_omega(x, seed=args.seed)
        if isinstance(g, NotRegular):
            print(
                "error: matrix is not regular (minimal polynomial degree "
                f"{g.min_poly.degree} < {x.n}); no conjugate has a nonzero "
                "Krylov determinant",
                file=sys.stderr,
            )
            return EXIT_NOT_REGULAR
        conjugator = matrix_to_json(g)
    result = {
        "D": format_rational(krylov_determinant(x)),
        "in_omega": in_omega(x),
        "regular": is_regular(x),
        "min_poly": min_poly(x).to_strings(),
        "char_poly": char_poly(x).to_strings(),
        "conjugator": conjugator,
        "sign_convention": "(-1)^(n(n-1)/2)",
    }
    if args.markdown:
        sys.stdout.write(_analyze_markdown(result))
        if args.out:
            _emit(_dump(result), args.out)
    else:
        _emit(_dump(result), args.out)
    return EXIT_OK


def _analyze_markdown(result: dict) -> str:
    lines = [
        "| quantity | value |",
        "| --- | --- |",
        f"| D | {result['D']} |",
        f"| in Omega | {result['in_omega']} |",
        f"| regular | {result['regular']} |",
        f"| min poly (ascending) | {', '.join(result['min_poly'])} |",
        f"| char poly (ascending) | {', '.join(result['char_poly'])} |",
        f"| conjugator | {json.dumps(result['conjugator'])} |",
    ]
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    config = _read_json(args.config)
    if args.seed is not None and isinstance(config, dict):
        config = {**config, "seed": args.seed}
    try:
        report = run_suite_from_config(config)
    except SuiteConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    payload = report.to_json()
    if args.markdown:
        sys.stdout.write(_report_markdown(payload))
        if args.out:
            _emit(_dump(payload), args.out)
    else:
        _emit(_dump(payload), args.out)
    return EXIT_OK if report.passed else EXIT_SUITE_FAILED


def _report_markdown(payload: dict) -> str:
    lines = [
        f"# suite `{payload['suite']}` (n={payload['n']}, samples={payload['samples']}, seed={payload['seed']})",
        "",
        f"**{'PASS' if payload['pass'] else 'FAIL'}** (tool {payload['version']})",
        "",
        "| property | checked | failures | worst residual |",
        "| --- | --- | --- | --- |",
    ]
    for rec in payload["properties"]:
        worst = rec["worst_residual"]
        shown = worst if isinstance(worst, str) else f"{worst:.3e}"
        lines.append(
            f"| {rec['name']} | {rec['checked']} | {rec['failures']} | {shown} |"
        )
    return "\n".join(lines) + "\n"


def cmd_sympoly(args) -> int:
    try:
        poly = symbolic_krylov_determinant(args.n, n_max=_n_max())
    except FeasibilityBoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    degree = homogeneous_degree(poly)
    payload = {
        "n": args.n,
        "degree": degree if isinstance(degree, int) else None,
        "homogeneous": isinstance(degree, int),
        "terms": len(poly.terms),
        "term_list": term_list_json(poly),
    }
    _emit(_dump(payload), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed override")
    common.add_argument("--out", type=str, default=None, help="write JSON to file")
    common.add_argument(
        "--markdown", action="store_true", help="render human-readable output"
    )
    parser = argparse.ArgumentParser(
        prog="affinv",
        description=(
            "Krylov-row determinant analysis, exact and finite-difference "
            "verification suites, and symbolic determinant export."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser(
        "analyze", parents=[common], help="analyze a matrix JSON file"
    )
    p_an.add_argument("input", nargs="?", default=None, help="path or - for stdin")
    p_an.add_argument(
        "--conjugate",
        action="store_true",
        help="also search for g with D(g x g^-1) != 0",
    )
    p_an.set_defaults(func=cmd_analyze)

    p_vf = sub.add_parser(
        "verify", parents=[common], help="run a verification suite from config JSON"
    )
    p_vf.add_argument("config", nargs="?", default=None, help="path or - for stdin")
    p_vf.set_defaults(func=cmd_verify)

    p_sp = sub.add_parser(
        "sympoly", parents=[common], help="export the symbolic determinant"
    )
    p_sp.add_argument("--n", type=int, required=True, help="matrix dimension")
    p_sp.set_defaults(func=cmd_sympoly)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is None and getattr(args, "func", None) is cmd_analyze:
        args.seed = 0
    try:
        return args.func(args)
    except SystemExit as exc:  # raised by input helpers; normalize to a code
        return exc.code if isinstance(exc.code, int) else EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
