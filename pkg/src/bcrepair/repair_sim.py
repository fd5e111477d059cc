"""Coded storage cluster with partial failures and broadcast repair.

Every stored packet carries its coefficient vector over the ``k_sym`` file
packets, so decodability questions reduce to ranks of stacked coefficient
vectors while payloads are carried along and checked for exact recovery.
"""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .flowgraph import SystemParams
from .galois import (
    FieldMatrix,
    FieldSpec,
    GF,
    SingularMatrixError,
    inverse,
    mat_mul,
    rank_of_rows,
    solve_linear,
)
from .mds import MdsCode, Placement, encode, make_mds
from .tradeoff import alpha_star
from .xrational import xr


@dataclass(frozen=True)
class StoredPacket:
    coeffs: tuple[int, ...]
    payload: tuple[int, ...] | None  # None once lost


@dataclass(frozen=True)
class SymbolUnits:
    """Integer packet counts for one (alpha, gamma) operating point."""

    k_sym: int
    per_node: int
    surviving: int
    beta: int

    @property
    def lost(self) -> int:
        return self.per_node - self.surviving


def symbol_units(params: SystemParams, alpha, gamma) -> SymbolUnits:
    """Smallest packet size ``M / k_sym`` that makes alpha, rho*alpha and beta whole packets."""
    M = Fraction(params.M)
    a = xr(alpha).as_fraction() / M
    a1 = a * params.rho
    b = params.beta(gamma).as_fraction() / M
    k_sym = 1
    for v in (a, a1, b):
        k_sym = math.lcm(k_sym, v.denominator)
    return SymbolUnits(k_sym, int(a * k_sym), int(a1 * k_sym), int(b * k_sym))


@dataclass
class CodedSystemState:
    params: SystemParams
    code: MdsCode
    placement: Placement
    node_store: dict[int, list[StoredPacket]]
    bandwidth_log: list[dict] = field(default_factory=list)

    @property
    def field(self) -> FieldSpec:
        return self.code.field

    @property
    def nodes(self) -> list[int]:
        return sorted(self.node_store)

    def loss_mask(self, node: int) -> list[bool]:
        return [p.payload is None for p in self.node_store[node]]

    def faulty_nodes(self) -> list[int]:
        return [j for j in self.nodes if any(self.loss_mask(j))]

    def copy(self) -> "CodedSystemState":
        return replace(self, node_store={j: list(v) for j, v in self.node_store.items()},
                       bandwidth_log=list(self.bandwidth_log))

    def packet_size(self) -> Fraction:
        """Size of one packet as a fraction of the file."""
        return Fraction(self.params.M) / self.code.k_sym


def init_system(params: SystemParams, file_packets: Sequence[Sequence[int]], packets_per_node: int,
                field: FieldSpec | None = None, code: MdsCode | None = None) -> CodedSystemState:
    """MDS-encode ``file_packets`` and place ``packets_per_node`` consecutive columns on each node."""
    field = field or (code.field if code else GF(257))
    k_sym = len(file_packets)
    n_sym = params.n * packets_per_node
    if code is None:
        code = make_mds(k_sym, n_sym, field)
    if (code.k_sym, code.n_sym) != (k_sym, n_sym):
        raise ValueError(f"code is ({code.n_sym},{code.k_sym}), need ({n_sym},{k_sym})")
    coded = encode(file_packets, code)
    placement = Placement(params.n, packets_per_node)
    store = {}
    for j in range(1, params.n + 1):
        store[j] = [StoredPacket(tuple(code.generator.col(c)), tuple(coded[c]))
                    for c in placement.columns(j)]
    return CodedSystemState(params, code, placement, store)


def inject_partial_failure(state: CodedSystemState, nodes, lost_per_node: int,
                           which: dict[int, Sequence[int]] | None = None) -> CodedSystemState:
    """Erase ``lost_per_node`` packets on each node in ``nodes`` (first slots unless ``which`` says)."""
    nodes = sorted(set(nodes))
    if len(nodes) != state.params.r:
        raise ValueError(f"expected r={state.params.r} failing nodes, got {len(nodes)}")
    t = state.placement.packets_per_node
    if not 0 <= lost_per_node <= t:
        raise ValueError("lost_per_node must lie in [0, packets_per_node]")
    expected = Fraction(t) * (1 - state.params.rho)
    if expected != lost_per_node:
        raise ValueError(f"rho={state.params.rho} with {t} packets per node loses {expected}, not {lost_per_node}")
    out = state.copy()
    for j in nodes:
        slots = list(which[j]) if which and j in which else list(range(lost_per_node))
        if len(set(slots)) != lost_per_node:
            raise ValueError(f"node {j}: {len(slots)} slots given for {lost_per_node} losses")
        store = out.node_store[j]
        for s in slots:
            store[s] = StoredPacket(store[s].coeffs, None)
    return out


def verify_any_k(state: CodedSystemState) -> tuple[bool, tuple[int, ...] | None]:
    """Whether every k nodes' unlost packets span the file; otherwise a failing k-subset."""
    k_sym = state.code.k_sym
    for subset in combinations(state.nodes, state.params.k):
        rows = [p.coeffs for j in subset for p in state.node_store[j] if p.payload is not None]
        if rank_of_rows(state.field, rows) < k_sym:
            return False, subset
    return True, None


def payloads_consistent(state: CodedSystemState, file_packets) -> bool:
    """Each unlost payload equals its coefficient vector applied to the file."""
    F = state.field
    W = FieldMatrix(F, [list(p) for p in file_packets])
    for store in state.node_store.values():
        for p in store:
            if p.payload is None:
                continue
            expect = mat_mul(FieldMatrix(F, [list(p.coeffs)]), W).row(0)
            if list(p.payload) != expect:
                return False
    return True


def _combine(F: FieldSpec, weights, packets: Sequence[StoredPacket]) -> StoredPacket:
    size_c = len(packets[0].coeffs)
    size_p = len(packets[0].payload)
    coeffs, payload = [0] * size_c, [0] * size_p
    for w, p in zip(weights, packets):
        if w:
            coeffs = [F.add(a, F.mul(w, b)) for a, b in zip(coeffs, p.coeffs)]
            payload = [F.add(a, F.mul(w, b)) for a, b in zip(payload, p.payload)]
    return StoredPacket(tuple(coeffs), tuple(payload))


# --- explicit single-failure plan for (n, k, r) = (4, 2, 1), four packets per node ---

@dataclass(frozen=True)
class RepairPlan:
    failed: int
    order: tuple[int, int, int, int]  # failed node, its partner, then the two other helpers
    y1: tuple[int, ...]
    y2: tuple[int, ...]
    y3: tuple[int, ...]
    gammas: tuple[int, int]
    transmitters: tuple[int, int, int]  # partner, third, fourth node

    def transmit_coeffs(self) -> dict[int, tuple[int, ...]]:
        """Weights each transmitter applies to its own four packets."""
        partner, third, fourth = self.transmitters
        return {partner: self.y3[4:], third: self.y2[:4], fourth: self.y2[4:]}

    @property
    def packets_sent(self) -> int:
        return 3


def _pair_matrix(state: CodedSystemState, a: int, b: int) -> FieldMatrix:
    cols = state.placement.columns(a) + state.placement.columns(b)
    return state.code.columns(cols)


def _minors_ok(F: FieldSpec, top: Sequence[int], bottom: Sequence[int]) -> bool:
    for i, j in combinations(range(len(top)), 2):
        if F.sub(F.mul(top[i], bottom[j]), F.mul(top[j], bottom[i])) == 0:
            return False
    return True


def build_example2_plan(state: CodedSystemState, failed: int = 1, rng: random.Random | None = None,
                        max_tries: int = 1000) -> RepairPlan:
    """Sample y1 and distinct (g3, g4) until every 2x2 minor of [y1; y3] on the failed node is nonzero."""
    p = state.params
    if (p.n, p.k, p.r, p.rho) != (4, 2, 1, Fraction(1, 2)) or state.placement.packets_per_node != 4:
        raise ValueError("the explicit plan covers (n, k, r, rho) = (4, 2, 1, 1/2) with four packets per node")
    if state.code.k_sym != 8:
        raise ValueError("the explicit plan needs an (16, 8) code")
    rng = rng or random.Random(0)
    F = state.field
    partner = {1: 2, 2: 1, 3: 4, 4: 3}[failed]
    third, fourth = [j for j in (1, 2, 3, 4) if j not in (failed, partner)]
    P1 = _pair_matrix(state, failed, partner)
    P2 = _pair_matrix(state, third, fourth)
    try:
        P1_inv, P2_inv = inverse(P1), inverse(P2)
    except SingularMatrixError as exc:  # impossible for an MDS code
        raise ValueError("code is not MDS on the node pairs") from exc
    q = F.order
    for _ in range(max_tries):
        y1 = [rng.randrange(q) for _ in range(4)] + [0] * 4
        g3, g4 = rng.randrange(q), rng.randrange(q)
        if g3 == g4:
            continue
        b1 = mat_mul(P1, FieldMatrix.column(F, y1))
        y2 = mat_mul(P2_inv, b1).col(0)
        x3 = mat_mul(P2.select_columns(range(4)), FieldMatrix.column(F, y2[:4]))
        x4 = mat_mul(P2.select_columns(range(4, 8)), FieldMatrix.column(F, y2[4:]))
        b2 = x3.scale(g3) + x4.scale(g4)
        y3 = mat_mul(P1_inv, b2).col(0)
        if _minors_ok(F, y1[:4], y3[:4]):
            return RepairPlan(failed, (failed, partner, third, fourth), tuple(y1), tuple(y2), tuple(y3),
                              (g3, g4), (partner, third, fourth))
    raise RuntimeError(f"no valid plan in {max_tries} samples over {F}")


def execute_broadcast_repair(state: CodedSystemState, plan: RepairPlan) -> CodedSystemState:
    """Transmit x2, x3, x4 and solve the 2-unknown system on the failed node."""
    F = state.field
    mask = state.loss_mask(plan.failed)
    lost = [i for i, m in enumerate(mask) if m]
    if not lost:
        return state.copy()
    if len(lost) != 2:
        raise ValueError("the explicit plan repairs exactly two lost packets")
    sent = {}
    for node, w in plan.transmit_coeffs().items():
        store = state.node_store[node]
        if any(p.payload is None for p in store):
            raise ValueError(f"transmitter {node} is not complete")
        sent[node] = _combine(F, w, store)
    partner, third, fourth = plan.transmitters
    g3, g4 = plan.gammas
    x2, x3, x4 = sent[partner], sent[third], sent[fourth]
    # eq1: y1 . own = x3 + x4;  eq2: y3 . own = g3 x3 + g4 x4 - x2
    rhs1 = _combine(F, [1, 1], [x3, x4])
    rhs2 = _combine(F, [g3, g4, F.neg(1)], [x3, x4, x2])
    store = state.node_store[plan.failed]
    c1, c2 = list(plan.y1[:4]), list(plan.y3[:4])
    for i in range(4):
        if i not in lost:
            rhs1 = _combine(F, [1, F.neg(c1[i])], [rhs1, store[i]])
            rhs2 = _combine(F, [1, F.neg(c2[i])], [rhs2, store[i]])
    a = FieldMatrix(F, [[c1[lost[0]], c1[lost[1]]], [c2[lost[0]], c2[lost[1]]]])
    try:
        sol = solve_linear(a, FieldMatrix(F, [list(rhs1.payload), list(rhs2.payload)]))
    except SingularMatrixError as exc:
        raise ArithmeticError("plan does not determine the lost pair") from exc
    out = state.copy()
    new_store = list(store)
    cols = state.placement.columns(plan.failed)
    for slot, payload in zip(lost, sol.to_lists()):
        new_store[slot] = StoredPacket(tuple(state.code.generator.col(cols[slot])), tuple(payload))
    out.node_store[plan.failed] = new_store
    out.bandwidth_log.append({"mode": "example2", "packets": plan.packets_sent,
                              "fraction_of_file": plan.packets_sent * state.packet_size()})
    return out


# --- randomized linear network coding -------------------------------------------

@dataclass
class RoundReport:
    seed: int
    helpers: tuple[int, ...]
    faulty: tuple[int, ...]
    beta_packets: int
    packets_sent: int
    fraction_of_file: Fraction
    any_k: bool
    witness: tuple[int, ...] | None
    below_curve: bool = False


def rlnc_repair_round(state: CodedSystemState, beta_symbols: int, seed: int
                      ) -> tuple[CodedSystemState, RoundReport]:
    """Complete nodes broadcast ``beta_symbols`` random combinations; faulty nodes refill lost slots."""
    rng = random.Random(seed)
    F = state.field
    q = F.order
    p = state.params
    faulty = tuple(state.faulty_nodes())
    helpers = tuple(j for j in state.nodes if j not in faulty)
    if faulty and len(faulty) != p.r:
        raise ValueError(f"{len(faulty)} faulty nodes, expected r={p.r}")
    below = _below_curve(state, beta_symbols)
    if below:
        warnings.warn("operating point lies below the storage/bandwidth threshold", stacklevel=2)
    out = state.copy()
    sent = 0
    if faulty:
        received = []
        for h in helpers:
            store = state.node_store[h]
            for _ in range(beta_symbols):
                received.append(_combine(F, [rng.randrange(q) for _ in store], store))
                sent += 1
        for j in faulty:
            store = list(state.node_store[j])
            pool = received + [s for s in store if s.payload is not None]
            for slot, s in enumerate(store):
                if s.payload is None:
                    store[slot] = _combine(F, [rng.randrange(q) for _ in pool], pool) if pool else \
                        StoredPacket(tuple([0] * state.code.k_sym), tuple([0] * _payload_len(state)))
            out.node_store[j] = store
        out.bandwidth_log.append({"mode": "rlnc", "packets": sent,
                                  "fraction_of_file": sent * state.packet_size()})
    ok, witness = verify_any_k(out)
    report = RoundReport(seed, helpers, faulty, beta_symbols, sent, sent * state.packet_size(),
                         ok, witness, below)
    return out, report


def _payload_len(state):
    for store in state.node_store.values():
        for p in store:
            if p.payload is not None:
                return len(p.payload)
    return 0


def _below_curve(state: CodedSystemState, beta_symbols: int) -> bool:
    p = state.params
    size = state.packet_size()
    alpha = state.placement.packets_per_node * size
    gamma = (p.n - p.r) * beta_symbols * size
    return alpha_star(p, xr(gamma)) > xr(alpha)


def exhaustive_repair_search(state: CodedSystemState, beta_symbols: int, budget: int = 2_000_000) -> int:
    """Number of repair coefficient assignments that keep any-k decodability.

    Every helper chooses ``beta_symbols`` combinations of its packets and every
    faulty node fills each lost slot with a combination of everything it
    received plus its surviving packets.  All choices are enumerated.
    """
    F = state.field
    q = F.order
    faulty = state.faulty_nodes()
    helpers = [j for j in state.nodes if j not in faulty]
    t = state.placement.packets_per_node
    n_helper = len(helpers) * beta_symbols * t
    pool_size = len(helpers) * beta_symbols + t - state.loss_mask(faulty[0]).count(True) if faulty else 0
    n_fill = sum(state.loss_mask(j).count(True) for j in faulty) * pool_size
    total = q ** (n_helper + n_fill)
    if total > budget:
        raise ValueError(f"{total} assignments exceed the budget of {budget}")
    k_sym = state.code.k_sym

    def lin(weights, vecs):
        acc = [0] * k_sym
        for w, v in zip(weights, vecs):
            if w:
                acc = [F.add(a, F.mul(w, b)) for a, b in zip(acc, v)]
        return tuple(acc)

    coeffs = {j: [p.coeffs for p in state.node_store[j]] for j in state.nodes}
    surviving = {j: [p.coeffs for p in state.node_store[j] if p.payload is not None] for j in faulty}
    lost_slots = {j: state.loss_mask(j).count(True) for j in faulty}
    subsets = list(combinations(state.nodes, state.params.k))
    good = 0
    for hw in product(range(q), repeat=n_helper):
        received, pos = [], 0
        for h in helpers:
            for _ in range(beta_symbols):
                received.append(lin(hw[pos:pos + t], coeffs[h]))
                pos += t
        for fw in product(range(q), repeat=n_fill):
            stored = dict(coeffs)
            pos = 0
            for j in faulty:
                pool = received + surviving[j]
                fills = []
                for _ in range(lost_slots[j]):
                    fills.append(lin(fw[pos:pos + len(pool)], pool))
                    pos += len(pool)
                stored[j] = surviving[j] + fills
            if all(rank_of_rows(F, [v for j in sub for v in stored[j]]) == k_sym for sub in subsets):
                good += 1
    return good


# --- structured text report ----------------------------------------------------------

def format_report(title: str, entries: dict) -> str:
    lines = [f"[{title}]"]
    for key, value in entries.items():
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def random_file(field: FieldSpec, k_sym: int, packet_len: int, rng: random.Random) -> list[list[int]]:
    return [[rng.randrange(field.order) for _ in range(packet_len)] for _ in range(k_sym)]
