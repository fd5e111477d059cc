"""Reed-Solomon style MDS codes: encode a file into packets, decode from any k_sym of them.

A packet is a list of field symbols; every symbol position is coded with the
same generator column.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .galois import FieldMatrix, FieldSpec, identity, inverse, mat_mul, mat_rank, solve_linear

Packet = list  # list[int] of canonical field symbols


@dataclass(frozen=True)
class MdsCode:
    k_sym: int
    n_sym: int
    generator: FieldMatrix
    evaluation_points: tuple[int, ...]

    @property
    def field(self) -> FieldSpec:
        return self.generator.field

    def columns(self, cols: Sequence[int]) -> FieldMatrix:
        return self.generator.select_columns(cols)


def make_mds(k_sym: int, n_sym: int, field: FieldSpec, systematic: bool = False) -> MdsCode:
    """Vandermonde generator ``G[i][j] = x_j ** i`` at the distinct points ``x_j = 1..n_sym``.

    Any ``k_sym`` columns form a Vandermonde matrix with distinct nodes and are
    therefore nonsingular.  With ``systematic`` the first ``k_sym`` columns are
    turned into the identity.
    """
    if not 1 <= k_sym <= n_sym:
        raise ValueError("need 1 <= k_sym <= n_sym")
    if n_sym > field.order - 1:
        raise ValueError(f"{field} has only {field.order - 1} nonzero evaluation points, need {n_sym}")
    points = tuple(range(1, n_sym + 1))
    G = FieldMatrix(field, [[field.power(x, i) for x in points] for i in range(k_sym)])
    if systematic:
        G = mat_mul(inverse(G.select_columns(range(k_sym))), G)
    return MdsCode(k_sym, n_sym, G, points)


@dataclass(frozen=True)
class Placement:
    """Node ``i`` (1-based) stores columns ``(i-1)*t .. i*t - 1`` (0-based)."""

    node_count: int
    packets_per_node: int

    def columns(self, node: int) -> list[int]:
        if not 1 <= node <= self.node_count:
            raise ValueError(f"node {node} out of range")
        t = self.packets_per_node
        return list(range((node - 1) * t, node * t))

    def node_of(self, column: int) -> int:
        return column // self.packets_per_node + 1

    @property
    def total(self) -> int:
        return self.node_count * self.packets_per_node


def split_file(symbols: Sequence[int], k_sym: int) -> tuple[list[Packet], int]:
    """Zero-pad to a multiple of ``k_sym`` and cut into ``k_sym`` equal packets."""
    length = len(symbols)
    size = max(1, -(-length // k_sym))
    padded = list(symbols) + [0] * (size * k_sym - length)
    return [padded[i * size:(i + 1) * size] for i in range(k_sym)], length


def join_file(packets: Sequence[Packet], length: int) -> list[int]:
    out = [s for p in packets for s in p]
    return out[:length]


def _as_matrix(field: FieldSpec, packets: Sequence[Packet]) -> FieldMatrix:
    return FieldMatrix(field, [list(p) for p in packets])


def encode(file_packets: Sequence[Packet], code: MdsCode) -> list[Packet]:
    """Coded packet ``j`` is ``sum_i G[i][j] * file_packets[i]``."""
    if len(file_packets) != code.k_sym:
        raise ValueError(f"expected {code.k_sym} file packets, got {len(file_packets)}")
    sizes = {len(p) for p in file_packets}
    if len(sizes) != 1:
        raise ValueError("file packets must have equal length")
    W = _as_matrix(code.field, file_packets)  # k_sym x L
    P = mat_mul(code.generator.transpose(), W)  # n_sym x L
    return P.to_lists()


def decode_any_k(columns: Sequence[int], packets: Sequence[Packet], code: MdsCode) -> list[Packet]:
    """Recover the ``k_sym`` file packets from coded packets at ``columns``."""
    if len(columns) != code.k_sym or len(set(columns)) != code.k_sym:
        raise ValueError(f"need {code.k_sym} distinct columns")
    if len(packets) != len(columns):
        raise ValueError("one packet per column required")
    sub = code.columns(columns).transpose()  # row c holds the coefficients of packet c
    return solve_linear(sub, _as_matrix(code.field, packets)).to_lists()


def is_mds_subset(code: MdsCode, columns: Sequence[int]) -> bool:
    return mat_rank(code.columns(columns)) == code.k_sym


def systematic_identity_check(code: MdsCode) -> bool:
    return code.columns(range(code.k_sym)) == identity(code.field, code.k_sym)
