"""Min-cut oracle over information flow graphs.

Everything here works on graphs alone; no closed-form threshold is consulted.
``max_flow`` solves one :class:`~bcrepair.flowgraph.FlowGraph`.
``worst_case_mincut`` and ``oracle_alpha_star`` search every failure pattern
of bounded length and every collector placement.

Each (pattern, collector) graph is compiled once into integer arrays whose
edges are tagged with a capacity class (alpha, alpha1, alpha - alpha1, beta,
inf).  Solving at a new ``(alpha, beta)`` only rescales capacities.  The
minimum cut found at one point is a linear function of alpha that bounds the
worst-case capacity from above everywhere.  Its root is therefore a lower
bound on the threshold, which gives an exact cutting-plane iteration in place
of bisection.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterator

from .flowgraph import (
    SOURCE,
    Edge,
    FlowGraph,
    Kind,
    SystemParams,
    VertexId,
    Weight,
    apply_repair_round,
    attach_collector,
    build_initial,
    canonical_pattern,
)
from .maxflow import Network
from .xrational import INF, ExtendedRational, xr

_WEIGHTS = (Weight.ALPHA, Weight.ALPHA1, Weight.LOST, Weight.BETA, Weight.INF)
_W = {w: i for i, w in enumerate(_WEIGHTS)}
A, A1, LOST, B, WINF = range(5)

DEFAULT_BUDGET = 2_000_000


class BudgetExceeded(RuntimeError):
    """The pattern/collector enumeration would exceed the configured budget."""


@dataclass(frozen=True)
class CutReport:
    value: ExtendedRational
    cut_edges: tuple[Edge, ...]
    side_assignment: dict = field(repr=False, compare=False)

    def source_side(self) -> frozenset:
        return frozenset(v for v, s in self.side_assignment.items() if s == "U")

    def to_json(self) -> str:
        return json.dumps(
            {
                "value": str(self.value),
                "cut_edges": [
                    {"from": str(e.tail), "to": str(e.head), "cap": str(e.capacity)}
                    for e in self.cut_edges
                ],
            },
            indent=1,
            ensure_ascii=False,
        )


class _Compiled:
    """Integer-indexed network with one capacity class per edge."""

    __slots__ = ("net", "widx", "src", "snk")

    def __init__(self, nv, tails, heads, widx, src, snk):
        self.net = Network(nv, tails, heads)
        self.widx = list(widx)
        self.src = src
        self.snk = snk

    def _caps(self, unit_caps):
        caps = [unit_caps[w] for w in self.widx]
        sentinel = sum(c for c, w in zip(caps, self.widx) if w != WINF) + 1
        return [sentinel if w == WINF else c for c, w in zip(caps, self.widx)]

    def reaches(self, unit_caps, target: int) -> bool:
        """Whether the max-flow is at least ``target``; stops early once it is."""
        value, _ = self.net.max_flow(self._caps(unit_caps), self.src, self.snk, limit=target)
        return value >= target

    def solve(self, unit_caps):
        """``unit_caps``: integer capacity per class (the inf slot is filled here)."""
        value, reach = self.net.max_flow(self._caps(unit_caps), self.src, self.snk)
        counts = [0, 0, 0, 0, 0]
        for i, (u, v) in enumerate(zip(self.net.tails, self.net.heads)):
            if reach[u] and not reach[v]:
                counts[self.widx[i]] += 1
        return value, tuple(counts), reach


def _unit_caps(alpha: Fraction, rho: Fraction, beta: Fraction):
    vals = (alpha, rho * alpha, (1 - rho) * alpha, beta)
    scale = 1
    for v in vals:
        scale = math.lcm(scale, v.denominator)
    ints = [int(v * scale) for v in vals] + [0]
    return ints, scale


def _fraction(value, name) -> Fraction:
    value = xr(value)
    if value.is_infinite:
        raise ValueError(f"{name} must be finite")
    return value.as_fraction()


def compile_flowgraph(g: FlowGraph) -> tuple[_Compiled, list[VertexId]]:
    if g.collector is None:
        raise ValueError("attach a collector before computing a min-cut")
    index = {v: i for i, v in enumerate(g.vertices)}
    comp = _Compiled(
        len(g.vertices),
        [index[e.tail] for e in g.edges],
        [index[e.head] for e in g.edges],
        [_W[e.weight] for e in g.edges],
        index[SOURCE],
        index[g.collector],
    )
    return comp, list(g.vertices)


def max_flow(g: FlowGraph) -> CutReport:
    """Exact S-to-collector min-cut of ``g`` with a witness cut."""
    comp, verts = compile_flowgraph(g)
    caps = [e.capacity for e in g.edges if e.weight is not Weight.INF]
    scale = 1
    for c in caps:
        scale = math.lcm(scale, c.denominator)
    ints = [0 if e.weight is Weight.INF else int(e.capacity.as_fraction() * scale) for e in g.edges]
    sentinel = sum(ints) + 1
    ints = [sentinel if e.weight is Weight.INF else c for c, e in zip(ints, g.edges)]
    value, reach = comp.net.max_flow(ints, comp.src, comp.snk)
    side = {v: ("U" if reach[i] else "Ubar") for i, v in enumerate(verts)}
    cut = tuple(e for e in g.edges if side[e.tail] == "U" and side[e.head] == "Ubar")
    if value >= sentinel:
        raise AssertionError("min-cut crossed an infinite edge")
    return CutReport(xr(Fraction(value, scale)), cut, side)


def cut_capacity(g: FlowGraph, source_side) -> ExtendedRational:
    """Capacity of the cut whose source side is ``source_side``."""
    source_side = set(source_side)
    if SOURCE not in source_side:
        raise ValueError("source must lie on the source side")
    if g.collector is not None and g.collector in source_side:
        raise ValueError("collector must lie on the sink side")
    total = xr(0)
    for e in g.edges:
        if e.tail in source_side and e.head not in source_side:
            total = total + e.capacity
    return total


# --- enumeration -----------------------------------------------------------

def failure_patterns(n: int, r: int, max_rounds: int, symmetric: bool = True) -> Iterator[tuple]:
    """All failure patterns of length ``0..max_rounds``.

    With ``symmetric`` only one representative per node-relabelling orbit is
    produced: nodes are numbered in order of first failure.
    """
    everyone = range(1, n + 1)

    def rec(prefix, used):
        yield prefix
        if len(prefix) == max_rounds:
            return
        if not symmetric:
            for s in combinations(everyone, r):
                yield from rec(prefix + (frozenset(s),), used)
            return
        for a in range(max(0, r - (n - used)), min(r, used) + 1):
            fresh = frozenset(range(used + 1, used + r - a + 1))
            for old in combinations(range(1, used + 1), a):
                yield from rec(prefix + (frozenset(old) | fresh,), used + r - a)

    yield from rec((), 0)


def collector_choices(n: int, k: int, pattern: tuple, symmetric: bool = True) -> Iterator[tuple]:
    """Collector k-subsets worth solving for ``pattern``.

    A collector that avoids every node of the last round sees the same graph
    as on the shorter prefix, which is enumerated separately, so such
    collectors are skipped.  Under ``symmetric`` untouched nodes are
    interchangeable and only the lowest-numbered ones are used.
    """
    last = pattern[-1] if pattern else frozenset()
    if symmetric:
        touched = sorted(set().union(*pattern)) if pattern else []
        untouched = [j for j in range(1, n + 1) if j not in set(touched)]
        for a in range(max(0, k - len(untouched)), min(k, len(touched)) + 1):
            fill = tuple(untouched[: k - a])
            for part in combinations(touched, a):
                if pattern and not last.intersection(part):
                    continue
                yield tuple(sorted(part + fill))
    else:
        for dc in combinations(range(1, n + 1), k):
            if pattern and not last.intersection(dc):
                continue
            yield dc


def compact_network(n: int, r: int, pattern: tuple, dc_nodes) -> _Compiled:
    """Copy-contracted equivalent of the full flow graph for max-flow purposes.

    Complete nodes are not duplicated each round; a faulty node's mid vertex
    hangs off its current output, and its surviving output is merged with the
    newcomer's input (it has no other successor).  For ``r == 1`` helper
    vertices are contracted into direct beta edges.
    """
    tails, heads, widx = [], [], []

    def add(u, v, w):
        tails.append(u)
        heads.append(v)
        widx.append(w)

    src, snk = 0, 1
    nv = 2
    out = {}
    for j in range(1, n + 1):
        vin, vout = nv, nv + 1
        nv += 2
        add(src, vin, WINF)
        add(vin, vout, A)
        out[j] = vout
    for failed in pattern:
        helpers = [out[j] for j in range(1, n + 1) if j not in failed]
        joins = []
        for j in sorted(failed):
            mid, join, vout = nv, nv + 1, nv + 2
            nv += 3
            add(out[j], mid, A)
            add(mid, join, A1)
            add(join, vout, A)
            out[j] = vout
            joins.append(join)
        for hout in helpers:
            if len(joins) == 1:
                add(hout, joins[0], B)
            else:
                h = nv
                nv += 1
                add(hout, h, B)
                for join in joins:
                    add(h, join, WINF)
    for j in dc_nodes:
        add(out[j], snk, WINF)
    return _Compiled(nv, tails, heads, widx, src, snk)


def full_graph(params: SystemParams, alpha, beta, pattern, dc_nodes, with_failed=True) -> FlowGraph:
    alpha = xr(alpha)
    alpha1 = alpha * xr(params.rho)
    g = build_initial(params, alpha, with_failed=with_failed)
    for failed in pattern:
        g = apply_repair_round(g, failed, alpha, alpha1, beta)
    return attach_collector(g, dc_nodes)


def pattern_notes(params: SystemParams, pattern) -> tuple[str, ...]:
    notes = []
    for prev, cur in zip(pattern, pattern[1:]):
        if prev & cur:
            notes.append("immediate re-failure: node fails in the round right after its repair")
            break
    if params.r > params.n - params.k:
        notes.append("outside proof regime: r > n - k")
    return tuple(notes)


# --- worst case over patterns ----------------------------------------------

@dataclass
class WorstCaseReport:
    value: ExtendedRational
    cut: CutReport
    pattern: tuple
    collector_nodes: tuple
    canonical_value: ExtendedRational
    graphs_examined: int
    notes: tuple = ()


class PatternSearch:
    """All (pattern, collector) graphs of an ``(n, k, r)`` family, compiled once.

    The topology does not depend on rho, alpha or beta, so one instance serves
    a whole parameter sweep.  Cuts found along the way are pooled as edge
    counts per capacity class and reused to warm-start later threshold
    searches.
    """

    def __init__(self, n: int, k: int, r: int, max_rounds: int | None = None,
                 budget: int = DEFAULT_BUDGET, symmetric: bool = True):
        self.n, self.k, self.r = n, k, r
        self.max_rounds = -(-k // r) if max_rounds is None else max_rounds
        self.entries = []
        for pattern in failure_patterns(n, r, self.max_rounds, symmetric):
            for dc in collector_choices(n, k, pattern, symmetric):
                if len(self.entries) >= budget:
                    raise BudgetExceeded(
                        f"more than {budget} graphs for n={n}, k={k}, r={r}, rounds={self.max_rounds}")
                self.entries.append((pattern, dc, compact_network(n, r, pattern, dc)))
        self.cut_pool: set[tuple] = set()

    def __len__(self):
        return len(self.entries)

    def evaluate(self, alpha: Fraction, rho: Fraction, beta: Fraction):
        """Worst-case min-cut value and the entry attaining it."""
        ints, scale = _unit_caps(alpha, rho, beta)
        best = None
        for i, (_, _, comp) in enumerate(self.entries):
            value, counts, _ = comp.solve(ints)
            self.cut_pool.add(counts[:4])
            if best is None or value < best[0]:
                best = (value, i)
        return Fraction(best[0], scale), best[1]

    def alpha_star(self, rho: Fraction, M: Fraction, gamma: Fraction) -> ExtendedRational:
        """Smallest alpha whose worst-case min-cut reaches ``M`` at bandwidth ``gamma``."""
        beta = Fraction(gamma) / (self.n - self.r)
        rho, M = Fraction(rho), Fraction(M)
        alpha = M / self.k  # every collector reads k edges of capacity alpha

        def root(counts):
            slope = counts[A] + counts[A1] * rho + counts[LOST] * (1 - rho)
            offset = counts[B] * beta
            if slope == 0:
                return None
            return (M - offset) / slope

        def cut_value(counts, a):
            return (counts[A] + counts[A1] * rho + counts[LOST] * (1 - rho)) * a + counts[B] * beta

        # Warm start from cuts seen earlier: each is a valid upper envelope.
        moved = True
        while moved:
            moved = False
            for counts in self.cut_pool:
                if cut_value(counts, alpha) < M:
                    nxt = root(counts)
                    if nxt is None:
                        return INF
                    alpha, moved = nxt, True

        # Capacities only grow with alpha, so an entry verified once stays verified.
        for _, _, comp in self.entries:
            while True:
                ints, scale = _unit_caps(alpha, rho, beta)
                target = M * scale
                if target.denominator == 1 and comp.reaches(ints, target.numerator):
                    break
                value, counts, _ = comp.solve(ints)
                if Fraction(value, scale) >= M:
                    break
                self.cut_pool.add(counts[:4])
                nxt = root(counts)
                if nxt is None:
                    return INF
                if nxt <= alpha:
                    raise AssertionError("cutting-plane step did not advance")
                alpha = nxt
        return xr(alpha)


_SEARCH_CACHE: dict[tuple, PatternSearch] = {}


def pattern_search(params: SystemParams, max_rounds: int | None = None,
                   budget: int = DEFAULT_BUDGET) -> PatternSearch:
    key = (params.n, params.k, params.r, max_rounds or params.rounds, budget)
    if key not in _SEARCH_CACHE:
        _SEARCH_CACHE[key] = PatternSearch(params.n, params.k, params.r, max_rounds, budget)
    return _SEARCH_CACHE[key]


def worst_case_mincut(params: SystemParams, alpha, beta, max_rounds: int | None = None,
                      budget: int = DEFAULT_BUDGET) -> WorstCaseReport:
    """Minimum over failure patterns and collectors of the S-to-collector min-cut."""
    a, b = _fraction(alpha, "alpha"), _fraction(beta, "beta")
    search = pattern_search(params, max_rounds, budget)
    value, i = search.evaluate(a, params.rho, b)
    pattern, dc, _ = search.entries[i]
    g = full_graph(params, a, b, pattern, dc)
    cut = max_flow(g)
    if cut.value != xr(value):
        raise AssertionError("compact and full graphs disagree")
    canonical = canonical_value(params, a, b)
    return WorstCaseReport(
        value=xr(value),
        cut=cut,
        pattern=pattern,
        collector_nodes=dc,
        canonical_value=canonical,
        graphs_examined=len(search),
        notes=pattern_notes(params, pattern),
    )


def canonical_value(params: SystemParams, alpha, beta) -> ExtendedRational:
    """Min-cut of the canonical extremal graph (fresh nodes each round, collector on 1..k)."""
    pattern = canonical_pattern(params)
    comp = compact_network(params.n, params.r, pattern, range(1, params.k + 1))
    ints, scale = _unit_caps(_fraction(alpha, "alpha"), params.rho, _fraction(beta, "beta"))
    value, _, _ = comp.solve(ints)
    return xr(Fraction(value, scale))


def oracle_alpha_star(params: SystemParams, gamma, max_rounds: int | None = None,
                      budget: int = DEFAULT_BUDGET) -> ExtendedRational:
    """Minimal alpha whose worst-case min-cut is at least ``M``; ``inf`` if none is."""
    gamma = xr(gamma)
    if gamma.is_infinite or gamma < 0:
        raise ValueError("gamma must be a finite non-negative rational")
    search = pattern_search(params, max_rounds, budget)
    return search.alpha_star(params.rho, params.M, gamma.as_fraction())
