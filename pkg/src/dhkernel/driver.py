"""End-to-end kernelization and the exact branching solver used as the
correctness oracle at desk scale."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .approx import approx_modulator
from .goodmod import good_modulator
from .graph import Graph, components, twin_classes
from .obstructions import find_any_obstruction, is_distance_hereditary
from .reductions import (
    DEFAULT_RULE_ORDER,
    check_component_bounds,
    run_reduction_loop,
)


class ResourceGuard(RuntimeError):
    pass


@dataclass(frozen=True)
class Instance:
    graph: Graph
    k: int


def trivial_yes() -> Instance:
    return Instance(Graph(), 0)


def trivial_no() -> Instance:
    # C5 with budget 0 is the canonical certified-NO sentinel
    return Instance(Graph(range(5), [(i, (i + 1) % 5) for i in range(5)]), 0)


@dataclass
class ExactLimits:
    max_n: int = 32
    max_k: int = 10
    max_nodes: int = 2_000_000


def solve_exact(inst: Instance, limits: Optional[ExactLimits] = None):
    """Minimum DH-modulator of size <= k, or None.

    Obstruction branching with iterative deepening: the first budget at
    which a solution appears certifies minimality.  DH checks and the
    branching obstruction are memoized per surviving vertex set.
    """
    limits = limits or ExactLimits()
    g, k = inst.graph, inst.k
    if g.n > limits.max_n or k > limits.max_k:
        raise ResourceGuard(f"exact solver limits exceeded (n={g.n}, k={k})")
    if k < 0:
        return None
    obs_cache: dict[frozenset[int], object] = {}
    nodes = 0

    def obstruction_of(h: Graph):
        key = frozenset(h.vertices)
        if key not in obs_cache:
            obs_cache[key] = find_any_obstruction(h)
        return obs_cache[key]

    def search(h: Graph, budget: int):
        nonlocal nodes
        nodes += 1
        if nodes > limits.max_nodes:
            raise ResourceGuard("exact solver node budget exhausted")
        obs = obstruction_of(h)
        if obs is None:
            return ()
        if budget == 0:
            return None
        for v in obs.vertices:
            hit = search(h.delete_vertex(v), budget - 1)
            if hit is not None:
                return (v,) + hit
        return None

    for budget in range(k + 1):
        hit = search(g, budget)
        if hit is not None:
            return tuple(sorted(hit))
    return None


def verify_equivalence(a: Instance, b: Instance, limits: Optional[ExactLimits] = None) -> bool:
    """True iff the exact verdicts of the two instances agree."""
    return (solve_exact(a, limits) is not None) == (solve_exact(b, limits) is not None)


@dataclass
class KernelConfig:
    n_exact: int = 18
    rule_order: tuple[str, ...] = DEFAULT_RULE_ORDER
    arithmetic: str = "auto"
    passes: int = 2
    exact_limits: ExactLimits = field(default_factory=ExactLimits)


@dataclass
class KernelReport:
    input_n: int
    input_m: int
    input_k: int
    config: dict
    verdict: Optional[str] = None  # "yes"/"no" when decided early
    passes: list[dict] = field(default_factory=list)
    output_n: int = 0
    output_m: int = 0
    output_k: int = 0

    def to_dict(self) -> dict:
        return {
            "schemaVersion": 1,
            "input": {"n": self.input_n, "m": self.input_m, "k": self.input_k},
            "output": {"n": self.output_n, "m": self.output_m, "k": self.output_k},
            "verdict": self.verdict,
            "passes": self.passes,
            "config": self.config,
        }


def _stage_sizes(g: Graph, s: set[int], k: int) -> dict:
    rest = [v for v in g.vertices if v not in s]
    gs = g.induced(rest)
    twins = [len(c) for c in twin_classes(gs)] or [0]
    comps = components(gs)
    return {
        "modulatorSize": len(s),
        "twinSetMax": max(twins),
        "nontrivialComponents": sum(1 for c in comps if len(c) >= 2),
        "components": len(comps),
    }


def kernelize(inst: Instance, config: Optional[KernelConfig] = None):
    """Small-n exact guard, approximate modulator, good modulator, rule
    loop to fixpoint; then the same once more on the reduced instance.
    The output instance is equivalent to the input, never larger."""
    config = config or KernelConfig()
    report = KernelReport(
        input_n=inst.graph.n,
        input_m=inst.graph.m,
        input_k=inst.k,
        config={
            "nExact": config.n_exact,
            "ruleOrder": list(config.rule_order),
            "arithmetic": config.arithmetic,
            "passes": config.passes,
        },
    )
    cur = inst

    def finish(out: Instance, verdict: Optional[str]) -> tuple[Instance, KernelReport]:
        report.verdict = verdict
        report.output_n = out.graph.n
        report.output_m = out.graph.m
        report.output_k = out.k
        return out, report

    for pass_no in range(1, config.passes + 1):
        stage: dict = {"pass": pass_no}
        g, k = cur.graph, cur.k
        if k < 0:
            return finish(trivial_no(), "no")
        # whole components that are already DH need no deletions and
        # would otherwise sit outside every coloring bound
        keep: list[int] = []
        dropped = 0
        for comp in components(g):
            if is_distance_hereditary(g.induced(comp)):
                dropped += len(comp)
            else:
                keep.extend(comp)
        if dropped:
            stage["dhComponentsDropped"] = dropped
            g = g.induced(keep)
            cur = Instance(g, k)
        if g.n == 0:
            report.passes.append(stage)
            return finish(trivial_yes(), "yes")
        if g.n <= config.n_exact:
            sol = solve_exact(cur, config.exact_limits)
            stage["exactGuard"] = {"n": g.n, "solved": True}
            report.passes.append(stage)
            return finish(trivial_yes() if sol is not None else trivial_no(),
                          "yes" if sol is not None else "no")
        approx_stats: dict = {}
        approx = approx_modulator(g, k, config.arithmetic, stats=approx_stats)
        if approx is None:
            stage["approx"] = None
            stage["approxStages"] = approx_stats
            report.passes.append(stage)
            return finish(trivial_no(), "no")
        stage["approx"] = {"size": len(approx), **approx_stats}
        gm = good_modulator(g, k, approx, config.arithmetic)
        if gm is None:
            stage["goodModulator"] = None
            report.passes.append(stage)
            return finish(trivial_no(), "no")
        stage["goodModulator"] = {
            "size": len(gm.modulator),
            "forced": len(gm.forced),
        }
        g2, k2, s2 = gm.graph, gm.budget, set(gm.modulator)
        g3, s3, rule_stats = run_reduction_loop(g2, k2, s2, config.rule_order)
        stage["rules"] = rule_stats
        stage["afterRules"] = _stage_sizes(g3, s3, k2)
        bounds = check_component_bounds(g3, s3, k2)
        stage["bounds"] = {
            "ok": bounds.ok,
            "diagnostics": bounds.diagnostics,
            "nontrivialComponents": list(bounds.nontrivial_components),
            "bagCounts": sorted((n for _, n, _ in bounds.component_bags), reverse=True),
            "chainLengths": sorted((n for n, _ in bounds.chain_lengths), reverse=True),
        }
        if not bounds.ok:
            raise AssertionError(
                "size bounds violated on an irreducible instance: "
                + "; ".join(bounds.diagnostics)
            )
        report.passes.append(stage)
        cur = Instance(g3, k2)
    return finish(cur, None)
