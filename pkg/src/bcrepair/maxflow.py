"""Exact integer max-flow (Dinic) with a min-cut witness."""

from __future__ import annotations

from collections import deque


class Network:
    """Static topology; capacities are supplied per solve.

    Edge ``i`` is stored as arc ``2i`` (forward) and ``2i + 1`` (residual).
    """

    __slots__ = ("nv", "tails", "heads", "adj", "to")

    def __init__(self, nv: int, tails, heads):
        self.nv = nv
        self.tails = list(tails)
        self.heads = list(heads)
        self.to = []
        self.adj = [[] for _ in range(nv)]
        for i, (u, v) in enumerate(zip(self.tails, self.heads)):
            self.adj[u].append(2 * i)
            self.adj[v].append(2 * i + 1)
            self.to += [v, u]

    def max_flow(self, caps, s: int, t: int, limit: int | None = None):
        """Return ``(value, reachable)`` where ``reachable[v]`` marks the source side of a min cut.

        With ``limit`` the search stops once the flow reaches it; the value is
        then only a certified lower bound and ``reachable`` is ``None``.
        """
        if len(caps) != len(self.tails):
            raise ValueError("one capacity per edge required")
        res = [0] * (2 * len(caps))
        for i, c in enumerate(caps):
            if c < 0:
                raise ValueError("negative capacity")
            res[2 * i] = c
        to, adj, nv = self.to, self.adj, self.nv
        flow = 0
        while True:
            level = _bfs(adj, to, res, nv, s)
            if level[t] < 0:
                return flow, [lv >= 0 for lv in level]
            flow += _blocking_flow(adj, to, res, level, nv, s, t)
            if limit is not None and flow >= limit:
                return flow, None


def _bfs(adj, to, res, nv, s):
    level = [-1] * nv
    level[s] = 0
    q = deque([s])
    while q:
        u = q.popleft()
        lu = level[u] + 1
        for a in adj[u]:
            if res[a] > 0:
                v = to[a]
                if level[v] < 0:
                    level[v] = lu
                    q.append(v)
    return level


def _blocking_flow(adj, to, res, level, nv, s, t):
    # Iterative DFS along the level graph with current-arc pointers.
    it = [0] * nv
    deg = [len(a) for a in adj]
    total = 0
    path = []
    u = s
    while True:
        if u == t:
            push = min([res[a] for a in path])
            for a in path:
                res[a] -= push
                res[a ^ 1] += push
            total += push
            path.clear()
            u = s
            continue
        arcs = adj[u]
        i = it[u]
        n_arcs = deg[u]
        nxt = level[u] + 1
        while i < n_arcs:
            a = arcs[i]
            if res[a] > 0 and level[to[a]] == nxt:
                break
            i += 1
        it[u] = i
        if i < n_arcs:
            path.append(arcs[i])
            u = to[arcs[i]]
            continue
        # dead end: retreat
        level[u] = -2
        if not path:
            return total
        a = path.pop()
        u = to[a ^ 1]
        it[u] += 1
