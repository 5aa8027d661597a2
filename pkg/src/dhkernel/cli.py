"""Command-line interface.

Exit codes: 0 success, 1 certified NO (or a negative verdict where one
applies), 2 input error, 3 resource guard tripped.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .approx import approx_modulator
from .driver import (
    Instance,
    KernelConfig,
    ResourceGuard,
    kernelize,
    solve_exact,
    verify_equivalence,
)
from .goodmod import good_modulator
from .graph import components
from .graphio import ParseError, emit_graph, generate_instance, parse_graph
from .obstructions import find_any_obstruction, is_distance_hereditary
from .reductions import DEFAULT_RULE_ORDER
from .splitdec import canonical_decomposition, format_tree

EXIT_OK = 0
EXIT_NO = 1
EXIT_INPUT = 2
EXIT_GUARD = 3


def _read_graph(path: str):
    text = sys.stdin.read() if path == "-" else open(path, "r", encoding="utf-8").read()
    return parse_graph(text)


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, indent=2))


def _obstruction_json(obs):
    if obs is None:
        return None
    out = {"kind": obs.kind.capitalize(), "vertices": sorted(obs.vertices)}
    if obs.kind == "hole":
        out["length"] = obs.length
    return out


def _cmd_recognize(args) -> int:
    g = _read_graph(args.graph)
    obs = find_any_obstruction(g)
    _emit({"distanceHereditary": obs is None, "obstruction": _obstruction_json(obs)})
    return EXIT_OK


def _cmd_decompose(args) -> int:
    g = _read_graph(args.graph)
    if not is_distance_hereditary(g):
        print("error: input graph is not distance-hereditary", file=sys.stderr)
        return EXIT_NO
    out = []
    for comp in components(g):
        d = canonical_decomposition(g.induced(comp))
        out.append(
            {
                "vertices": list(comp),
                "bags": [
                    {
                        "kind": b.kind,
                        "unmarked": list(b.unmarked),
                        "center": (b.center if b.center is not None and b.center >= 0 else None),
                    }
                    for b in d.bags
                ],
                "tree": format_tree(d).rstrip("\n").splitlines(),
            }
        )
    _emit({"components": out})
    return EXIT_OK


def _cmd_approx(args) -> int:
    g = _read_graph(args.graph)
    s = approx_modulator(g, args.k, args.arithmetic)
    if s is None:
        _emit({"no": True, "k": args.k})
        return EXIT_NO
    _emit({"modulator": list(s), "size": len(s), "k": args.k})
    return EXIT_OK


def _cmd_good_mod(args) -> int:
    g = _read_graph(args.graph)
    s = approx_modulator(g, args.k, args.arithmetic)
    if s is None:
        _emit({"no": True, "k": args.k})
        return EXIT_NO
    res = good_modulator(g, args.k, s, args.arithmetic)
    if res is None:
        _emit({"no": True, "k": args.k})
        return EXIT_NO
    _emit(
        {
            "k": res.budget,
            "modulator": list(res.modulator),
            "forced": list(res.forced),
            "graphEdges": [list(e) for e in res.graph.edges()],
            "graphVertices": list(res.graph.vertices),
        }
    )
    return EXIT_OK


def _cmd_kernelize(args) -> int:
    g = _read_graph(args.graph)
    config = KernelConfig(
        n_exact=args.n_exact,
        rule_order=tuple(args.rule_order.split(",")),
        arithmetic=args.arithmetic,
    )
    out, report = kernelize(Instance(g, args.k), config)
    payload = report.to_dict()
    payload["outputGraph"] = {
        "vertices": list(out.graph.vertices),
        "edges": [list(e) for e in out.graph.edges()],
        "k": out.k,
    }
    _emit(payload)
    return EXIT_NO if report.verdict == "no" else EXIT_OK


def _cmd_solve(args) -> int:
    g = _read_graph(args.graph)
    sol = solve_exact(Instance(g, args.k))
    if sol is None:
        _emit({"no": True, "k": args.k})
        return EXIT_NO
    _emit({"solution": list(sol), "size": len(sol), "k": args.k})
    return EXIT_OK


def _cmd_gen(args) -> int:
    seed = int(os.environ.get("DHK_SEED", args.seed))
    inst = generate_instance(seed, args.profile, n=args.n, k=args.k, p=args.p)
    sys.stdout.write(emit_graph(inst.graph))
    return EXIT_OK


def _cmd_verify(args) -> int:
    a = Instance(_read_graph(args.graph_a), args.k_a)
    b = Instance(_read_graph(args.graph_b), args.k_b)
    _emit({"equivalent": verify_equivalence(a, b)})
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="dhkernel")
    sub = top.add_subparsers(dest="command", required=True)

    def graph_arg(p):
        p.add_argument("graph", help="edge-list file, or - for stdin")

    def k_arg(p):
        p.add_argument("-k", type=int, required=True, help="deletion budget")

    def arith_arg(p):
        p.add_argument(
            "--arithmetic",
            choices=("auto", "exact", "float"),
            default="auto",
            help="LP arithmetic (auto: exact rationals up to 64 vertices)",
        )

    p = sub.add_parser("recognize", help="distance-hereditary test with certificate")
    graph_arg(p)
    p.set_defaults(fn=_cmd_recognize)

    p = sub.add_parser("decompose", help="canonical split decompositions per component")
    graph_arg(p)
    p.set_defaults(fn=_cmd_decompose)

    p = sub.add_parser("approx", help="approximate DH-modulator")
    graph_arg(p)
    k_arg(p)
    arith_arg(p)
    p.set_defaults(fn=_cmd_approx)

    p = sub.add_parser("good-mod", help="good DH-modulator with forced deletions")
    graph_arg(p)
    k_arg(p)
    arith_arg(p)
    p.set_defaults(fn=_cmd_good_mod)

    p = sub.add_parser("kernelize", help="full kernelization pipeline")
    graph_arg(p)
    k_arg(p)
    arith_arg(p)
    p.add_argument("--n-exact", type=int, default=18, help="small-instance exact guard")
    p.add_argument(
        "--rule-order",
        default=",".join(DEFAULT_RULE_ORDER),
        help="comma-separated rule order (default: components first, twin rule last)",
    )
    p.set_defaults(fn=_cmd_kernelize)

    p = sub.add_parser("solve", help="exact obstruction-branching solver")
    graph_arg(p)
    k_arg(p)
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("gen", help="generate a reproducible instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--profile", choices=("dh-pure", "dh-plus-planted", "dense-noise"), default="dh-pure"
    )
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--p", type=float, default=0.3)
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("verify", help="exact-equivalence check of two instances")
    p.add_argument("graph_a")
    p.add_argument("k_a", type=int)
    p.add_argument("graph_b")
    p.add_argument("k_b", type=int)
    p.set_defaults(fn=_cmd_verify)
    return top


def cli_main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceGuard as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
