"""Command line interface: ``cap <command> ...``.

Exit codes: 0 success (for ``check``: closed, i.e. capable), 10 not closed,
2 input error, 1 catalog mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__, bounds, constructions, search
from .closure import capability_report, closure, star_V, witness_report
from .fpalg import PrimeModulus
from .io import ParseError, dumps_subspace, format_vector, loads_subspace
from .spaces import kernel_basis, make_context, orthogonal_complement

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_NOT_CLOSED = 10
SCHEMA_VERSION = 1


class InputError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: not valid UTF-8 ({exc.reason})") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def _load(path: str, space: str = "V"):
    try:
        f = loads_subspace(_read(path))
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from None
    if f.space != space:
        raise InputError(f"{path}: expected a subspace of {space}, header declares {f.space}")
    return f.ctx, f.subspace


def report_dict(report, witness=None) -> dict:
    """JSON-ready report with a stable field order."""
    gv = report.group_view
    out = {
        "schema_version": SCHEMA_VERSION,
        "n": report.n,
        "p": report.p,
        "verdict": report.verdict,
        "dim_X": report.dim_X,
        "dim_Xstar": report.dim_Xstar,
        "dim_Xclosure": report.dim_Xclosure,
        "epicenter_dim": report.epicenter_dim,
        "certificates": list(report.certificates),
        "certificate_states": dict(report.certificate_states),
        "group_view": {
            "rank_Gab": gv.rank_Gab,
            "rank_comm": gv.rank_comm,
            "rank_GmodZ": gv.rank_GmodZ,
            "order_exponent": gv.rank_Gab + gv.rank_comm,
            "epicenter_order_exponent": report.epicenter_dim,
        },
    }
    if witness is not None:
        out["witness"] = witness_dict(witness)
    return out


def witness_dict(w) -> dict:
    return {
        "order_exponent_G": w.g_exponent,
        "order_exponent_H": w.h_exponent,
        "layers_G": list(w.g_layers),
        "layers_H": list(w.h_layers),
    }


def json_report(report, witness=None) -> str:
    return json.dumps(report_dict(report, witness), indent=2) + "\n"


def text_report(report) -> str:
    gv = report.group_view
    lines = [
        f"verdict: {report.verdict}",
        f"capable: {'yes' if report.closed else 'no'}",
        f"n={report.n} p={report.p}",
        f"dim X = {report.dim_X}",
        f"dim X* = {report.dim_Xstar}",
        f"dim closure = {report.dim_Xclosure}",
        f"epicenter dim = {report.epicenter_dim}",
        f"certificates: {' '.join(report.certificates) or '-'}",
        f"group: |G| = p^{gv.rank_Gab + gv.rank_comm}, rank G^ab = {gv.rank_Gab}, "
        f"rank [G,G] = {gv.rank_comm}, rank G/Z(G) = {gv.rank_GmodZ}",
    ]
    return "\n".join(lines) + "\n"


# -- commands ------------------------------------------------------------------


def cmd_check(args) -> int:
    ctx, X = _load(args.path)
    report = capability_report(ctx, X, certified_only=args.certified_only)
    if args.json:
        sys.stdout.write(json_report(report, witness_report(ctx, X)))
    else:
        sys.stdout.write(text_report(report))
    return EXIT_OK if report.closed else EXIT_NOT_CLOSED


def cmd_closure(args) -> int:
    ctx, X = _load(args.path)
    cl = closure(ctx, X)
    sys.stdout.write(dumps_subspace(ctx, cl, comment=f"closure: dim {cl.dim} (input dim {X.dim})"))
    return EXIT_OK


def cmd_star(args) -> int:
    ctx, X = _load(args.path)
    Y = star_V(ctx, X)
    sys.stdout.write(dumps_subspace(ctx, Y, space="W", comment=f"star: dim {Y.dim} in W of dim {ctx.dim_w}"))
    return EXIT_OK


def cmd_complement(args) -> int:
    ctx, X = _load(args.path)
    C = orthogonal_complement(ctx, X)
    sys.stdout.write(dumps_subspace(ctx, C, comment=f"orthogonal complement: dim {C.dim}"))
    return EXIT_OK


def cmd_kernel(args) -> int:
    ctx = make_context(args.n, args.p)
    basis = kernel_basis(ctx)
    out = [f"p={ctx.p} n={ctx.n}", f"# kernel of Phi: dim {len(basis)} in V^{ctx.n}"]
    for ke in basis:
        out.append(f"# element {','.join(map(str, ke.label))}")
        for slot, comp in enumerate(ke.components, start=1):
            if comp.any():
                out.append(f"# slot {slot}: {format_vector(ctx, comp)}")
    sys.stdout.write("\n".join(out) + "\n")
    return EXIT_OK


def cmd_witness(args) -> int:
    ctx, X = _load(args.path)
    w = witness_report(ctx, X)
    if args.json:
        sys.stdout.write(json.dumps({"schema_version": SCHEMA_VERSION, **witness_dict(w)}, indent=2) + "\n")
    else:
        sys.stdout.write(
            f"G: order p^{w.g_exponent}, layers {' '.join(map(str, w.g_layers))}\n"
            f"H: order p^{w.h_exponent}, layers {' '.join(map(str, w.h_layers))}\n"
        )
    return EXIT_OK


def cmd_bounds(args) -> int:
    if args.f_max is not None:
        sys.stdout.write(bounds.format_table(bounds.f_table(args.f_max), ("m", "f(m)")))
    else:
        sys.stdout.write(bounds.format_table(bounds.r_table(args.r_max), ("d", "r(d)")))
    return EXIT_OK


def cmd_catalog(args) -> int:
    try:
        entries = constructions.catalog_n5()
        if not args.verify:
            for e in entries:
                param = constructions.resolve_parameter(e.parameter_rule, args.p)
                extra = f" r={param}" if param is not None else ""
                print(f"{e.name} dim={e.dim} expected={e.expected_verdict}{extra}")
            return EXIT_OK
        results = constructions.verify_catalog(args.p)
    except constructions.CatalogError as exc:
        raise InputError(str(exc)) from None
    ok = True
    for r in results:
        ok &= r.matches
        param = f" r={r.parameter}" if r.parameter is not None else ""
        print(f"{r.entry.name} expected={r.entry.expected_verdict} got={r.verdict} "
              f"epicenter_dim={r.epicenter_dim}{param} {'ok' if r.matches else 'MISMATCH'}")
    print(f"{sum(r.matches for r in results)}/{len(results)} entries match at p={args.p}")
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_search(args) -> int:
    ctx = make_context(args.n, args.p)
    mode = "random" if args.random is not None else "exhaustive"
    t0 = time.perf_counter()
    res = search.scan(ctx, args.dim, mode=mode, count=args.random, workers=args.jobs, seed=args.seed,
                      certified_only=args.certified_only, checkpoint=args.checkpoint)
    elapsed = time.perf_counter() - t0
    for line in res.summary.lines():
        print(line)
    if args.out:
        Path(args.out).write_text(search.format_records(res.records), encoding="utf-8")
    rate = res.summary.checked / elapsed if elapsed > 0 else float("inf")
    print(f"elapsed={elapsed:.2f}s rate={rate:.0f}/s jobs={args.jobs}", file=sys.stderr)
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def _prime(text: str) -> int:
    try:
        return int(PrimeModulus(int(text)))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cap", description="Capability of class-two exponent-p groups "
                                 "via closures of subspaces of V = U ^ U.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide whether the group of a subspace file is capable")
    p.add_argument("path")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.add_argument("--certified-only", action="store_true",
                   help="trust closedness certificates and skip the closure computation")
    p.set_defaults(func=cmd_check)

    for name, func, text in (("closure", cmd_closure, "print the closure"),
                             ("star", cmd_star, "print X* inside W"),
                             ("complement", cmd_complement, "print the orthogonal complement")):
        p = sub.add_parser(name, help=text)
        p.add_argument("path")
        p.set_defaults(func=func)

    p = sub.add_parser("kernel", help="print the standard basis of ker(Phi)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=_prime, required=True)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("witness", help="orders of G and of the canonical witness")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("bounds", help="tables of f(m) or r(d)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--f-max", type=_nonneg, metavar="M")
    g.add_argument("--r-max", type=_nonneg, metavar="D")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("catalog", help="the n = 5 orbit representatives")
    p.add_argument("--verify", action="store_true", help="compare direct verdicts with expectations")
    p.add_argument("--p", type=_prime, default=3)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("search", help="scan subspaces for non-closed ones")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=_prime, required=True)
    p.add_argument("--dim", type=_nonneg, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--exhaustive", action="store_true")
    g.add_argument("--random", type=_nonneg, metavar="N")
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--seed", type=_nonneg, default=0)
    p.add_argument("--certified-only", action="store_true")
    p.add_argument("--checkpoint", metavar="PATH")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_search)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"cap {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
