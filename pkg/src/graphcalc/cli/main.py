"""Command-line entry point.

Exit codes: 0 success, 1 identity check failure, 2 usage, parse or bind
error, 3 evaluation budget or materialization cap exceeded.

Global flags fall back to ``GRAPHCALC_TOLERANCE``, ``GRAPHCALC_BUDGET``,
``GRAPHCALC_SEED`` and ``GRAPHCALC_JSON_REPORT``; a flag always wins.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .. import identities, products
from ..contraction import einsum_eval
from ..convolution import conv1d
from ..diagram import load_diagram, simplify, to_dot, to_json
from ..errors import BudgetExceeded, CapExceeded, GraphCalcError
from ..serialization import dumps_tensor, load_tensor, loads_tensor, tensor_from_record
from .program import load_program, parse, parse_builtin

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

ENV_PREFIX = "GRAPHCALC_"
GLOBALS = {
    "tolerance": (float, identities.IDENTITY_TOL),
    "budget": (int, None),
    "seed": (int, 0),
    "json_report": (str, None),
}


class UsageError(Exception):
    pass


def _global_flags(defaults: bool) -> argparse.ArgumentParser:
    # subcommands get SUPPRESS defaults so a flag given before the
    # subcommand is not overwritten by the subparser
    p = argparse.ArgumentParser(add_help=False)
    kw = {} if defaults else {"default": argparse.SUPPRESS}
    p.add_argument("--tolerance", type=float, help="pass threshold for identity residuals", **kw)
    p.add_argument("--budget", type=int, help="max multiply-adds for one contraction", **kw)
    p.add_argument("--seed", type=int, help="seed for random operands", **kw)
    p.add_argument("--json-report", metavar="PATH", help="write a machine-readable report", **kw)
    return p


def _read_tensor(text: str):
    """A tensor from a file path, an inline JSON record or an inline nested list."""
    stripped = text.strip()
    if stripped.startswith("{"):
        return loads_tensor(stripped)
    if stripped.startswith("["):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise UsageError(f"inline tensor is not JSON: {exc.msg}") from None
        import numpy as np

        arr = np.asarray(data)
        if arr.dtype.kind not in "iuf":
            raise UsageError("inline tensor must be a nested list of numbers")
        return tensor_from_record({"shape": list(arr.shape), "dtype": "f64",
                                   "data": [float(x) for x in arr.reshape(-1)]})
    return load_tensor(text)


def _write_tensor(t, out: str | None) -> None:
    text = dumps_tensor(t)
    if out is None:
        sys.stdout.write(text + "\n")
        print(f"shape {list(t.shape)} dtype {t.dtype}", file=sys.stderr)
    else:
        Path(out).write_text(text + "\n")
        print(f"wrote {out}: shape {list(t.shape)} dtype {t.dtype}")


def _report(args, payload: dict) -> None:
    if args.json_report:
        Path(args.json_report).write_text(json.dumps(payload, indent=2) + "\n")


# ---------------------------------------------------------------------------
# subcommands


def run_eval(args) -> int:
    if args.program_file:
        if args.program:
            args.tensors.insert(0, args.program)
        program = load_program(args.program_file)
    elif args.program:
        program = parse(args.program)
    else:
        raise UsageError("eval needs a program string or --program-file")
    extra = {}
    for item in args.bind:
        pos, sep, value = item.partition("=")
        if not sep or not pos.strip().isdigit():
            raise UsageError(f"--bind expects N=VALUE, got {item!r}")
        extra[int(pos)] = value
    builtins = dict(program.builtins)
    tensors = iter(args.tensors)
    operands = []
    for p in range(1, program.n_operands + 1):
        if p in extra:
            value = extra[p]
            if value.strip()[:1].isalpha() and "[" in value and not Path(value).exists():
                operands.append(parse_builtin(value).dense())
            else:
                operands.append(_read_tensor(value))
        elif p in builtins:
            operands.append(builtins[p].dense())
        else:
            try:
                operands.append(_read_tensor(next(tensors)))
            except StopIteration:
                raise UsageError(f"no tensor given for operand {p}") from None
    leftover = list(tensors)
    if leftover:
        raise UsageError(f"{len(leftover)} unused operand tensor(s)")
    result = einsum_eval(program.spec, operands, budget=args.budget)
    _write_tensor(result, args.output)
    _report(args, {"command": "eval", "program": str(program), "shape": list(result.shape)})
    return EXIT_OK


def run_check(args) -> int:
    lo, hi = args.min_extent, args.max_extent
    if lo < 1 or hi < lo:
        raise UsageError(f"bad extent range {lo}..{hi}")
    names = args.names or None
    report = identities.check_all((lo, hi), args.trials, args.seed, names=names,
                                  tolerance=args.tolerance)
    if args.structural:
        for entry in (identities.CATALOG if names is None else map(identities.lookup, names)):
            dims = {s: hi for s in entry.symbols}
            case = identities.check_structural(entry, dims, args.seed)
            report.append(identities.IdentityCase(
                entry.name + " (diagram)", case.dims, case.seed, case.residual, args.tolerance))
    width = max([len(c.name) for c in report] + [8])
    print(f"{'identity':<{width}}  {'dims':<32}  {'residual':>10}  result")
    for c in report:
        dims = ",".join(f"{k}={v}" for k, v in c.dims.items())
        print(f"{c.name:<{width}}  {dims:<32}  {c.residual:10.3e}  {'PASS' if c.passed else 'FAIL'}")
    ok = all(c.passed for c in report)
    print(f"{sum(c.passed for c in report)}/{len(report)} passed")
    _report(args, {"command": "check", "passed": ok, "tolerance": args.tolerance,
                   "cases": [c.to_dict() for c in report]})
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def run_conv(args) -> int:
    a, b = _read_tensor(args.a), _read_tensor(args.b)
    result = conv1d(a, b, args.sig, method=args.method)
    _write_tensor(result, args.output)
    _report(args, {"command": "conv", "signature": args.sig, "shape": list(result.shape)})
    return EXIT_OK


def run_simplify(args) -> int:
    d = load_diagram(args.diagram)
    trace: list = []
    out = simplify(d, trace)
    text = json.dumps(to_json(out), indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if args.dot:
        Path(args.dot).write_text(to_dot(out))
    steps = [{"rule": s.rule, "before": list(s.before), "after": list(s.after)} for s in trace]
    print(f"{len(steps)} rewrite(s): nodes {d.node_count} -> {out.node_count}", file=sys.stderr)
    _report(args, {"command": "simplify", "steps": steps})
    return EXIT_OK


def _product(name: str):
    def run(args) -> int:
        a, b = _read_tensor(args.a), _read_tensor(args.b)
        if name == "kron":
            result = products.kronecker(a, b, args.layout)
        elif name == "kr":
            fn = products.khatri_rao_col if args.mode == "col" else products.khatri_rao_row
            result = fn(a, b, args.layout)
        elif name == "ts":
            result = products.tracy_singh(a, b)
        else:
            result = {"dot": products.dot, "hadamard": products.hadamard}[name](a, b)
        _write_tensor(result, args.output)
        _report(args, {"command": name, "shape": list(result.shape)})
        return EXIT_OK

    return run


def run_mediator(args) -> int:
    b = parse_builtin(args.builtin)
    result = b.dense()
    _write_tensor(result, args.output)
    _report(args, {"command": "mediator", "builtin": str(b), "shape": list(result.shape)})
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphcalc", parents=[_global_flags(True)],
        description="Tensor contractions with Kronecker, vectorization and convolution tensors.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_global_flags(False)]

    def add(name, fn, help):
        p = sub.add_parser(name, parents=common, help=help)
        p.set_defaults(func=fn)
        return p

    p = add("eval", run_eval, "evaluate an einsum program")
    p.add_argument("program", nargs="?", help='e.g. "ij,jk->ik" or "ij,ijk->k @ 2=delta[3,4]"')
    p.add_argument("tensors", nargs="*", help="tensor files or inline literals, in operand order")
    p.add_argument("--program-file", metavar="PATH", help="JSON program (integer-list form)")
    p.add_argument("--bind", action="append", default=[], metavar="N=VALUE",
                   help="bind operand N to a builtin, a file or an inline literal")
    p.add_argument("-o", "--output")

    p = add("check", run_check, "run the identity catalog")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--min-extent", type=int, default=2)
    p.add_argument("--max-extent", type=int, default=5)
    p.add_argument("--names", nargs="*", choices=identities.NAMES, metavar="NAME")
    p.add_argument("--structural", action="store_true",
                   help="also check each identity through the diagram rewriter")

    p = add("conv", run_conv, "signed circular convolution of two vectors")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--sig", default="++-")
    p.add_argument("--method", choices=("auto", "direct", "fft"), default="auto")
    p.add_argument("-o", "--output")

    p = add("simplify", run_simplify, "simplify a diagram JSON file")
    p.add_argument("diagram")
    p.add_argument("--dot", metavar="PATH", help="also write GraphViz text")
    p.add_argument("-o", "--output")

    for name, help in (("kron", "Kronecker product"), ("dot", "matrix product"),
                       ("hadamard", "elementwise product"), ("kr", "Khatri-Rao product"),
                       ("ts", "Tracy-Singh product of rank-4 block tensors")):
        p = add(name, _product(name), help)
        p.add_argument("a")
        p.add_argument("b")
        if name in ("kron", "kr"):
            p.add_argument("--layout", choices=products.LAYOUTS, default="gamma")
        if name == "kr":
            p.add_argument("--mode", choices=("col", "row"), default="col")
        p.add_argument("-o", "--output")

    p = add("mediator", run_mediator, "write a dense delta/gamma/chi/fourier tensor")
    p.add_argument("builtin", help='e.g. "delta[3,4]", "chi[+--,5]", "fourier[4,inverse]"')
    p.add_argument("-o", "--output")
    return parser


def _apply_env(args) -> None:
    for name, (kind, default) in GLOBALS.items():
        if getattr(args, name, None) is not None:
            continue
        raw = os.environ.get(ENV_PREFIX + name.upper())
        if raw is None:
            setattr(args, name, default)
            continue
        try:
            setattr(args, name, kind(raw))
        except ValueError:
            raise UsageError(f"{ENV_PREFIX + name.upper()}={raw!r} is not a valid {kind.__name__}") from None


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        _apply_env(args)
        return args.func(args)
    except (BudgetExceeded, CapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, GraphCalcError, OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
