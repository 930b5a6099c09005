"""Command-line front end: ``lgstat gen|stats|compare|verify``.

JSON is written to stdout (or ``--out``); ``--pretty`` renders the same data as a
plain table. Exit codes: 0 success, 1 verification failure, 2 usage error,
3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .canonical import DEFAULT_BALL_CAP
from .errors import BallSizeCapExceeded, EnumerationCapExceeded, LgstatError
from .graph import Coloring, Graph, dump_graph, generate, load_coloring, load_graph
from .search import DEFAULT_ENUMERATION_CAP, SearchConfig, compare_graphs
from .statistics import KINDS, sigma, chi, tau_r
from .verify import SUITES, run_suites

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read_graph(path: str, d: int | None = None) -> Graph:
    G = load_graph(Path(path).read_text())
    return G.with_degree_bound(d) if d is not None else G


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, args, table=None) -> None:
    if args.pretty and table is not None:
        text = "\n".join(table) + "\n"
    else:
        text = json.dumps(obj, indent=2, sort_keys=False) + "\n"
    _emit(text, args.out)


def _statistic(G: Graph, f: Coloring, kind: str, r: int | None, cap: int):
    if kind == "tau":
        if r is None:
            raise UsageError("--r is required for tau")
        return tau_r(G, f, r, cap)
    return sigma(G, f) if kind == "sigma" else chi(G, f)


# ---------------------------------------------------------------- commands


def cmd_gen(args) -> int:
    if args.family == "disjoint_union":
        parts = [_read_graph(p) for p in args.params]
        G = generate("disjoint_union", parts)
    else:
        try:
            G = generate(args.family, args.params, seed=args.seed)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad parameters for {args.family}: {exc}") from exc
    if args.d is not None:
        G = G.with_degree_bound(args.d)
    _emit(dump_graph(G), args.out)
    return EXIT_OK


def cmd_stats(args) -> int:
    kind = args.kind or args.kind_pos
    if kind not in KINDS:
        raise UsageError(f"kind must be one of {', '.join(KINDS)}")
    G = _read_graph(args.graph, args.d)
    if (args.constant is None) == (args.coloring is None):
        raise UsageError("give exactly one of --constant K or --coloring FILE")
    if args.constant is not None:
        f = Coloring.constant(G.n, args.constant)
    else:
        f = load_coloring(Path(args.coloring).read_text(), G.n)
    mu = _statistic(G, f, kind, args.r, args.cap)
    obj = mu.to_json()
    table = [f"{atom}\t{p}" for atom, p in obj["atoms"].items()]
    _emit_json(obj, args, table)
    return EXIT_OK


def cmd_compare(args) -> int:
    G, H = _read_graph(args.graph_a), _read_graph(args.graph_b)
    d = max(G.d, H.d) if args.d is None else args.d
    G, H = G.with_degree_bound(d), H.with_degree_bound(d)
    if args.kind == "tau" and args.r is None:
        raise UsageError("--r is required for tau")
    mode = "exact" if args.exact else args.mode
    cfg = SearchConfig(seed=args.seed, restarts=args.restarts, budget=args.budget, enumeration_cap=args.enum_cap)
    report = compare_graphs(G, H, args.k, args.kind, args.r, mode, cfg)
    obj = report.to_json()
    table = [
        f"mode\t{obj['mode']}",
        f"distance\t{obj['distance']}",
        f"a_to_b\t{obj['directed']['a_to_b']}",
        f"b_to_a\t{obj['directed']['b_to_a']}",
        f"sizes\t{obj['sizes']['a']} {obj['sizes']['b']}",
    ] + [f"caveat\t{c}" for c in obj["caveats"]]
    _emit_json(obj, args, table)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = args.suites or ["all"]
    unknown = [s for s in names if s != "all" and s not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {unknown}; choose from all, {', '.join(SUITES)}")
    suites = {name: [c.to_json() for c in checks] for name, checks in run_suites(names, args.seed)}
    passed = all(c["passed"] for checks in suites.values() for c in checks)
    obj = {"seed": args.seed, "passed": passed, "suites": suites}
    table = [
        f"{'PASS' if c['passed'] else 'FAIL'}\t{name}\t{c['tag']}\t{c['instances']}"
        + (f"\t{c['data']}" if "data" in c else "")
        for name, checks in suites.items()
        for c in checks
    ]
    _emit_json(obj, args, table)
    return EXIT_OK if passed else EXIT_FAIL


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lgstat", description="Colored local statistics of bounded-degree graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--pretty", action="store_true", help="plain table instead of JSON")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("gen", help="generate a graph file")
    p.add_argument("family", help="cycle, path, complete, star, grid_torus, random_regular, random_bounded, disjoint_union")
    p.add_argument("params", nargs="*", help="family parameters, or graph files for disjoint_union")
    p.add_argument("--d", type=int, help="re-declare the degree bound")
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("stats", help="exact statistic of one colored graph")
    p.add_argument("graph")
    p.add_argument("kind_pos", nargs="?", metavar="kind", help="tau, sigma or chi")
    p.add_argument("--kind", choices=KINDS)
    p.add_argument("--constant", type=int, metavar="K", help="constant coloring with K colors")
    p.add_argument("--coloring", help="coloring file")
    p.add_argument("--r", type=int)
    p.add_argument("--d", type=int, help="re-declare the degree bound")
    p.add_argument("--cap", type=int, default=DEFAULT_BALL_CAP, help="ball size cap for tau")
    common(p, seed=False)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("compare", help="Hausdorff distance between two statistic sets")
    p.add_argument("graph_a")
    p.add_argument("graph_b")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--kind", choices=KINDS, default="sigma")
    p.add_argument("--r", type=int)
    p.add_argument("--d", type=int, help="common degree bound (default: the larger declared one)")
    p.add_argument("--mode", choices=("exact", "approx"), default="approx")
    p.add_argument("--exact", action="store_true", help="shorthand for --mode exact")
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--budget", type=int, default=20_000)
    p.add_argument("--cap", dest="enum_cap", type=int, default=DEFAULT_ENUMERATION_CAP, help="enumeration cap")
    common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify", help="run property suites")
    p.add_argument("suites", nargs="*", help=f"all or any of {', '.join(SUITES)}")
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    # argparse will not attach a trailing positional after options; allow `stats G --constant 1 sigma`
    if args.command == "stats" and args.kind_pos is None and len(extra) == 1 and not extra[0].startswith("-"):
        args.kind_pos, extra = extra[0], []
    if extra:
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    try:
        return args.func(args)
    except (BallSizeCapExceeded, EnumerationCapExceeded) as exc:
        print(f"lgstat: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, ValueError, OSError, LgstatError) as exc:
        print(f"lgstat: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
