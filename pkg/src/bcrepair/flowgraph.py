"""Time-evolving information flow graph for partial-failure broadcast repair.

Vertex labels follow the round-by-round relabelling used in the min-cut
argument: before round ``s`` (1-based) node ``j`` carries label
``(s - 1) * n + j``; after the round it carries ``s * n + j``, whether it was
repaired (a newcomer) or merely copied forward as a complete node.

Graphs are immutable values.  ``apply_repair_round`` and ``attach_collector``
return new graphs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .xrational import INF, ExtendedRational, xr


class SystemParams(NamedTuple):
    """A cache system instance ``(n, k, r, rho, M)``.

    ``rho`` is the fraction of a faulty node's content that survives a
    failure, so ``alpha1 = rho * alpha``.
    """

    n: int
    k: int
    r: int
    rho: Fraction
    M: Fraction = Fraction(1)

    @classmethod
    def make(cls, n: int, k: int, r: int, rho=0, M=1) -> "SystemParams":
        p = cls(int(n), int(k), int(r), Fraction(rho), Fraction(M))
        p.validate()
        return p

    def validate(self) -> None:
        n, k, r, rho, M = self
        if not 1 <= k <= n:
            raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
        if not 1 <= r <= n - 1:
            raise ValueError(f"need 1 <= r <= n-1, got r={r}, n={n}")
        if not 0 <= rho <= 1:
            raise ValueError(f"rho must lie in [0, 1], got {rho}")
        if M <= 0:
            raise ValueError("file size M must be positive")

    @property
    def helpers(self) -> int:
        return self.n - self.r

    @property
    def rounds(self) -> int:
        """Repair rounds needed so every collector node has been repaired once."""
        return -(-self.k // self.r)

    @property
    def r_divides_k(self) -> bool:
        return self.k % self.r == 0

    def beta(self, gamma) -> ExtendedRational:
        return xr(gamma) / self.helpers

    def gamma(self, beta) -> ExtendedRational:
        return xr(beta) * self.helpers

    def key(self) -> str:
        return f"n={self.n},k={self.k},r={self.r},rho={self.rho},M={self.M}"


class Kind(enum.Enum):
    SOURCE = "S"
    IN = "in"
    MID = "mid"
    OUT = "out"
    FAILED = "f"
    HELPER = "h"
    COLLECTOR = "DC"


class VertexId(NamedTuple):
    kind: Kind
    label: int
    round: int

    def __str__(self):
        return f"{self.kind.value}:{self.label}:{self.round}"


class Weight(enum.Enum):
    """Symbolic capacity class of an edge."""

    ALPHA = "alpha"
    ALPHA1 = "alpha1"
    LOST = "alpha-alpha1"
    BETA = "beta"
    INF = "inf"


class Edge(NamedTuple):
    tail: VertexId
    head: VertexId
    capacity: ExtendedRational
    weight: Weight


SOURCE = VertexId(Kind.SOURCE, 0, 0)


@dataclass(frozen=True)
class FlowGraph:
    n: int
    alpha: ExtendedRational
    vertices: tuple[VertexId, ...]
    edges: tuple[Edge, ...]
    labels: tuple[int, ...]  # current label of node j at index j-1
    pattern: tuple[frozenset[int], ...] = ()
    collector: VertexId | None = None
    collector_nodes: tuple[int, ...] = ()
    with_failed: bool = True

    @property
    def source(self) -> VertexId:
        return SOURCE

    @property
    def rounds_done(self) -> int:
        return len(self.pattern)

    def out_vertex(self, node: int) -> VertexId:
        """Active output vertex of storage node ``node`` (1-based)."""
        label = self.labels[node - 1]
        return VertexId(Kind.OUT, label, (label - 1) // self.n)

    def capacity_of(self, weight: Weight) -> ExtendedRational:
        # Only valid for graphs built with a single (alpha, alpha1, beta).
        for e in self.edges:
            if e.weight is weight:
                return e.capacity
        raise KeyError(weight)

    def export_edges(self) -> str:
        """Plain-text edge list, one ``tail → head cap=<value>`` per line."""
        return "\n".join(f"{e.tail} → {e.head} cap={e.capacity}" for e in self.edges) + "\n"

    def topological_order(self) -> list[VertexId]:
        """Kahn's algorithm; raises ``ValueError`` on a cycle."""
        indeg = {v: 0 for v in self.vertices}
        succ: dict[VertexId, list[VertexId]] = {v: [] for v in self.vertices}
        for e in self.edges:
            indeg[e.head] += 1
            succ[e.tail].append(e.head)
        ready = [v for v in self.vertices if indeg[v] == 0]
        order = []
        while ready:
            v = ready.pop()
            order.append(v)
            for w in succ[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
        if len(order) != len(self.vertices):
            raise ValueError("flow graph has a cycle")
        return order


def _finite(value, name: str) -> ExtendedRational:
    value = xr(value)
    if value.is_infinite or value < 0:
        raise ValueError(f"{name} must be a finite non-negative rational")
    return value


def build_initial(params: SystemParams, alpha, with_failed: bool = True) -> FlowGraph:
    """Source feeding ``n`` fresh storage nodes, each ``in -> out`` of capacity alpha."""
    alpha = _finite(alpha, "alpha")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    n = params.n
    vertices = [SOURCE]
    edges = []
    for j in range(1, n + 1):
        vin, vout = VertexId(Kind.IN, j, 0), VertexId(Kind.OUT, j, 0)
        vertices += [vin, vout]
        edges.append(Edge(SOURCE, vin, INF, Weight.INF))
        edges.append(Edge(vin, vout, alpha, Weight.ALPHA))
    return FlowGraph(
        n=n,
        alpha=alpha,
        vertices=tuple(vertices),
        edges=tuple(edges),
        labels=tuple(range(1, n + 1)),
        with_failed=with_failed,
    )


def apply_repair_round(g: FlowGraph, failed: Iterable[int], alpha, alpha1, beta,
                       r: int | None = None) -> FlowGraph:
    """One atomic failure-and-repair round.

    Each node in ``failed`` has its ``in -> out`` edge split into
    ``in -> mid`` (alpha), ``mid -> out`` (alpha1) and ``mid -> failed``
    (alpha - alpha1).  Every complete node broadcasts ``beta`` through its
    helper vertex to all newcomers; each newcomer also inherits its own faulty
    predecessor's output.  Complete nodes are copied to their next-round
    labels.
    """
    if g.collector is not None:
        raise ValueError("cannot repair after a collector is attached")
    failed = frozenset(int(i) for i in failed)
    if r is not None and len(failed) != r:
        raise ValueError(f"expected {r} failed nodes, got {len(failed)}")
    if not failed or not failed <= set(range(1, g.n + 1)):
        raise ValueError(f"failed set {sorted(failed)} must be a non-empty subset of [1:{g.n}]")
    if len(failed) >= g.n:
        raise ValueError("at least one complete node must remain as a helper")
    alpha = _finite(alpha, "alpha")
    alpha1 = _finite(alpha1, "alpha1")
    beta = _finite(beta, "beta")
    if alpha != g.alpha:
        raise ValueError("alpha must stay fixed across rounds")
    if alpha1 > alpha:
        raise ValueError("alpha1 cannot exceed alpha")

    n = g.n
    s = g.rounds_done + 1
    vertices = list(g.vertices)
    edges = list(g.edges)
    new_labels = list(g.labels)

    faulty_out = {}
    for j in sorted(failed):
        label = g.labels[j - 1]
        rnd = (label - 1) // n
        vin, vout = VertexId(Kind.IN, label, rnd), VertexId(Kind.OUT, label, rnd)
        vmid, vf = VertexId(Kind.MID, label, rnd), VertexId(Kind.FAILED, label, rnd)
        idx = edges.index(Edge(vin, vout, alpha, Weight.ALPHA))
        split = [Edge(vin, vmid, alpha, Weight.ALPHA), Edge(vmid, vout, alpha1, Weight.ALPHA1)]
        vertices.append(vmid)
        if g.with_failed:
            vertices.append(vf)
            split.append(Edge(vmid, vf, alpha - alpha1, Weight.LOST))
        edges[idx:idx + 1] = split
        faulty_out[j] = vout

    newcomer_in = {}
    for j in range(1, n + 1):
        old_label = g.labels[j - 1]
        old_out = VertexId(Kind.OUT, old_label, (old_label - 1) // n)
        label = s * n + j
        vin, vout = VertexId(Kind.IN, label, s), VertexId(Kind.OUT, label, s)
        vertices += [vin, vout]
        edges.append(Edge(old_out, vin, INF, Weight.INF))
        edges.append(Edge(vin, vout, alpha, Weight.ALPHA))
        new_labels[j - 1] = label
        if j in failed:
            newcomer_in[j] = vin

    for j in range(1, n + 1):
        if j in failed:
            continue
        old_label = g.labels[j - 1]
        old_out = VertexId(Kind.OUT, old_label, (old_label - 1) // n)
        h = VertexId(Kind.HELPER, old_label, s)
        vertices.append(h)
        edges.append(Edge(old_out, h, beta, Weight.BETA))
        for i in sorted(newcomer_in):
            edges.append(Edge(h, newcomer_in[i], INF, Weight.INF))

    return FlowGraph(
        n=n,
        alpha=alpha,
        vertices=tuple(vertices),
        edges=tuple(edges),
        labels=tuple(new_labels),
        pattern=g.pattern + (failed,),
        with_failed=g.with_failed,
    )


def attach_collector(g: FlowGraph, nodes: Sequence[int]) -> FlowGraph:
    """Connect a data collector to the active output vertices of ``nodes``."""
    if g.collector is not None:
        raise ValueError("a collector is already attached")
    nodes = tuple(sorted(set(int(j) for j in nodes)))
    if len(nodes) != len(tuple(nodes)) or not nodes:
        raise ValueError("collector needs a non-empty set of distinct nodes")
    for j in nodes:
        if not 1 <= j <= g.n:
            raise ValueError(f"node {j} is not an active storage node")
    dc = VertexId(Kind.COLLECTOR, 0, g.rounds_done)
    edges = g.edges + tuple(Edge(g.out_vertex(j), dc, INF, Weight.INF) for j in nodes)
    return FlowGraph(
        n=g.n,
        alpha=g.alpha,
        vertices=g.vertices + (dc,),
        edges=edges,
        labels=g.labels,
        pattern=g.pattern,
        collector=dc,
        collector_nodes=nodes,
        with_failed=g.with_failed,
    )


def canonical_pattern(params: SystemParams) -> tuple[frozenset[int], ...]:
    """Round ``s`` repairs nodes ``(s-1)r+1 .. sr``; wraps onto the last ``r`` nodes if short."""
    n, k, r = params.n, params.k, params.r
    rounds = []
    for s in range(1, params.rounds + 1):
        hi = s * r
        if hi <= n:
            rounds.append(frozenset(range(hi - r + 1, hi + 1)))
        else:
            rounds.append(frozenset(range(n - r + 1, n + 1)))
    return tuple(rounds)


def canonical_worst_case(params: SystemParams, alpha, beta, with_failed: bool = True) -> FlowGraph:
    """The proof's extremal graph: fresh nodes per round, collector on nodes ``1..k``.

    Nodes ``1..k`` are exactly the newcomers of rounds ``1..ceil(k/r)`` when
    ``(ceil(k/r)) * r <= n``.
    """
    alpha = xr(alpha)
    alpha1 = alpha * xr(params.rho)
    g = build_initial(params, alpha, with_failed=with_failed)
    for failed in canonical_pattern(params):
        g = apply_repair_round(g, failed, alpha, alpha1, beta, r=params.r)
    return attach_collector(g, range(1, params.k + 1))


def count_vertices(n: int, r: int, rounds: int, collector: bool = True, with_failed: bool = True) -> int:
    per_round = 3 * n + (r if with_failed else 0)
    return 1 + 2 * n + rounds * per_round + (1 if collector else 0)


def count_edges(n: int, r: int, rounds: int, k: int = 0, with_failed: bool = True) -> int:
    per_round = 3 * n + (r if with_failed else 0) + r * (n - r)
    return 2 * n + rounds * per_round + k


def lcm_of_denominators(values: Iterable) -> int:
    out = 1
    for v in values:
        v = xr(v)
        if v.is_finite:
            out = math.lcm(out, v.denominator)
    return out
