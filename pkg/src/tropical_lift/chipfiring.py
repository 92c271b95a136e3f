"""Chip-firing on finite loopless multigraphs given as adjacency lists.

Vectors are lists of integers indexed by lattice vertex.  Firing scripts
follow the convention ``D' = D - L s`` with L the graph Laplacian.
"""
from __future__ import annotations

from collections import deque
from typing import Sequence


class BudgetExceeded(RuntimeError):
    """Raised when a search exceeds its configured work budget."""


Adjacency = Sequence[Sequence[tuple[int, int]]]


def bfs_levels(adj: Adjacency, q: int) -> list[int]:
    dist = [-1] * len(adj)
    dist[q] = 0
    todo = deque([q])
    while todo:
        v = todo.popleft()
        for w, _ in adj[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                todo.append(w)
    if min(dist) < 0:
        raise ValueError("graph is disconnected")
    return dist


def _fire(adj: Adjacency, D: list[int], script: list[int], S: set[int], times: int) -> None:
    for v in S:
        script[v] += times
        for w, m in adj[v]:
            if w not in S:
                D[v] -= times * m
                D[w] += times * m


def effective_away_from(adj: Adjacency, D: Sequence[int], q: int,
                        levels: list[int] | None = None) -> tuple[list[int], list[int]]:
    """Move all debt to q by borrowing along BFS level sets."""
    D = list(D)
    script = [0] * len(adj)
    dist = levels if levels is not None else bfs_levels(adj, q)
    top = max(dist)
    for k in range(top, 0, -1):
        layer = [v for v in range(len(adj)) if dist[v] == k]
        need = 0
        for v in layer:
            if D[v] < 0:
                down = sum(m for w, m in adj[v] if dist[w] == k - 1)
                need = max(need, -(D[v] // down))
        if need:
            S = {v for v in range(len(adj)) if dist[v] >= k}
            _fire(adj, D, script, S, -need)
    return D, script


def dhar_burn(adj: Adjacency, D: Sequence[int], q: int) -> set[int]:
    """Unburnt set of Dhar's algorithm started at q (D effective away from q)."""
    n = len(adj)
    burnt = [False] * n
    burnt[q] = True
    hits = [0] * n
    todo = [q]
    while todo:
        v = todo.pop()
        for w, m in adj[v]:
            if not burnt[w]:
                hits[w] += m
                if hits[w] > D[w]:
                    burnt[w] = True
                    todo.append(w)
    return {v for v in range(n) if not burnt[v]}


def reduce_vector(adj: Adjacency, D: Sequence[int], q: int,
                  levels: list[int] | None = None) -> tuple[list[int], list[int]]:
    """Return the q-reduced divisor equivalent to D and a firing script s with D' = D - L s."""
    D, script = effective_away_from(adj, D, q, levels)
    while True:
        S = dhar_burn(adj, D, q)
        if not S:
            return D, script
        times = None
        for v in S:
            out = sum(m for w, m in adj[v] if w not in S)
            if out:
                k = D[v] // out
                times = k if times is None else min(times, k)
        _fire(adj, D, script, S, times)


def is_reduced(adj: Adjacency, D: Sequence[int], q: int) -> bool:
    return all(c >= 0 for i, c in enumerate(D) if i != q) and not dhar_burn(adj, D, q)


class RankEngine:
    """Memoized rank recursion on one finite graph with a fixed base vertex.

    rank(D) = -1 if the reduced form is not effective, else
    1 + min over candidate vertices v of rank(D - v).
    """

    def __init__(self, adj: Adjacency, q: int, candidates: Sequence[int], budget: int | None = None):
        self.adj = adj
        self.q = q
        self.candidates = tuple(candidates)
        self.levels = bfs_levels(adj, q)
        self.memo: dict[tuple[int, ...], tuple[int, tuple[int, ...]]] = {}
        self.budget = budget
        self.work = 0

    def reduce(self, D: Sequence[int]) -> tuple[int, ...]:
        self.work += 1
        if self.budget is not None and self.work > self.budget:
            raise BudgetExceeded(f"rank search exceeded budget of {self.budget} reductions")
        return tuple(reduce_vector(self.adj, D, self.q, self.levels)[0])

    def rank(self, D: Sequence[int]) -> tuple[int, tuple[int, ...]]:
        """Rank and a failing effective divisor (as a tuple of vertices) of degree rank+1."""
        if sum(D) < 0:
            return -1, ()
        return self._rank(self.reduce(D))

    def _rank(self, red: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
        if red[self.q] < 0:
            return -1, ()
        hit = self.memo.get(red)
        if hit is not None:
            return hit
        best: tuple[int, tuple[int, ...]] | None = None
        for v in self.candidates:
            nxt = list(red)
            nxt[v] -= 1
            r, w = self._rank(tuple(nxt) if v == self.q else self.reduce(nxt))
            if best is None or r < best[0]:
                best = (r, (v,) + w)
                if r == -1:
                    break
        assert best is not None
        res = (best[0] + 1, best[1])
        self.memo[red] = res
        return res
