"""Exact search for Hamiltonian ell-cycles and ell-paths.

For loose cycles (``2ell < k``) a cycle on ``m`` edges is a cyclic block
sequence ``S_0 P_0 S_1 P_1 ... S_{m-1} P_{m-1}`` with ``|S_j| = ell`` and
``|P_j| = k - 2ell``; edge ``j`` is ``S_j ∪ P_j ∪ S_{j+1}``.  The order inside
a block never matters, so the search runs over sets held as bitmasks.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Iterator, Literal

import numpy as np

from .hgraph import Hypergraph, HypergraphError, InvalidQueryError, bits, mask_of
from .walks import EllWalk, validate_cycle, validate_path

DEFAULT_NODE_BUDGET = 200_000
ORACLE_CAP = 10


@dataclass
class SearchStats:
    nodes: int = 0
    max_depth: int = 0
    elapsed: float = 0.0
    outcome: Literal["found", "exhausted", "timeout"] = "exhausted"


class _Timeout(Exception):
    pass


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _splits(mask: int, size: int) -> Iterator[tuple[int, int]]:
    """All ways to cut ``mask`` into (part of ``size`` bits, rest)."""
    vs = bits(mask)
    for part in itertools.combinations(vs, size):
        pm = mask_of(part)
        yield pm, mask ^ pm


class BlockSearch:
    """Depth-first block search shared by cycle and fixed-ends path queries."""

    def __init__(self, H: Hypergraph, ell: int, node_budget: int | None = DEFAULT_NODE_BUDGET,
                 time_budget: float | None = None, prune: bool = True):
        if H.n > 64:
            raise HypergraphError("block search needs n <= 64")
        if not 1 <= ell or 2 * ell >= H.k:
            raise InvalidQueryError(f"block search needs 1 <= ell < k/2, got ell={ell}, k={H.k}")
        self.H = H.materialize()
        self.k, self.ell = H.k, ell
        self.inner = H.k - 2 * ell
        self.masks = self.H.edge_masks
        self.edge_set = {int(x) for x in self.masks}
        self.node_budget = node_budget
        self.time_budget = time_budget
        self.prune = prune
        self.stats = SearchStats()
        self._t0 = 0.0
        self._dead: set[tuple[int, int, int]] = set()

    # -- bookkeeping ---------------------------------------------------------------

    def _tick(self, depth: int) -> None:
        st = self.stats
        st.nodes += 1
        st.max_depth = max(st.max_depth, depth)
        if self.node_budget is not None and st.nodes > self.node_budget:
            raise _Timeout
        if self.time_budget is not None and st.nodes % 256 == 0:
            if time.perf_counter() - self._t0 > self.time_budget:
                raise _Timeout

    def _within(self, allowed: int) -> np.ndarray:
        return self.masks[(self.masks & np.uint64(~allowed & (2**64 - 1))) == 0]

    def _covered(self, pool: int, A: int, Z: int) -> bool:
        """Every pool vertex lies in some edge inside ``pool ∪ A ∪ Z``."""
        if not pool:
            return True
        inside = self._within(pool | A | Z)
        if not len(inside):
            return False
        return (int(np.bitwise_or.reduce(inside)) & pool) == pool

    # -- search --------------------------------------------------------------------

    def _extend(self, A: int, Z: int, pool: int, steps: int, depth: int) -> list[int] | None:
        """Blocks ``[P, S, P, S, ..., P]`` leading from end-set ``A`` to ``Z`` in ``steps`` edges
        using exactly the vertices of ``pool``."""
        self._tick(depth)
        if steps == 1:
            if _popcount(pool) == self.inner and (A | pool | Z) in self.edge_set:
                return [pool]
            return None
        key = (A, Z, pool)
        if key in self._dead:
            return None
        if self.prune and not self._covered(pool, A, Z):
            self._dead.add(key)
            return None
        cands = []
        for e in self._within(A | pool):
            e = int(e)
            if not (e & A) == A:
                continue
            for S, P in _splits(e ^ A, self.ell):
                cands.append((P, S))
        if not cands:
            self._dead.add(key)
            return None
        if len(cands) > 1 and self.prune:
            scored = []
            for P, S in cands:
                rest = pool & ~(P | S)
                onward = self._within(S | rest | (Z if steps == 2 else 0))
                cnt = int(np.count_nonzero((onward & np.uint64(S)) == np.uint64(S)))
                if cnt == 0:
                    continue
                scored.append((cnt, P, S))
            scored.sort()
            cands = [(P, S) for _, P, S in scored]
        for P, S in cands:
            sub = self._extend(S, Z, pool & ~(P | S), steps - 1, depth + 1)
            if sub is not None:
                return [P, S] + sub
        self._dead.add(key)
        return None

    def _run(self, fn):
        self.stats = SearchStats()
        self._t0 = time.perf_counter()
        try:
            result = fn()
            self.stats.outcome = "found" if result is not None else "exhausted"
        except _Timeout:
            result = None
            self.stats.outcome = "timeout"
        self.stats.elapsed = time.perf_counter() - self._t0
        return result

    def cycle(self, vertices: int | None = None) -> list[int] | None:
        """Blocks of a Hamiltonian ell-cycle on ``vertices`` (default all)."""
        full = (1 << self.H.n) - 1 if vertices is None else vertices
        n = _popcount(full)
        step = self.k - self.ell
        m = n // step
        if n % step or m < 2:
            return None
        low = full & -full

        def top():
            for e in self._within(full):
                e = int(e)
                if not e & low:
                    continue
                for S0, rest in _splits(e, self.ell):
                    for S1, P0 in _splits(rest, self.ell):
                        if S1 & low:
                            continue
                        # reflection S_1 P_0 S_0 ... gives the same cycle
                        if P0 & low and (S1 & -S1) < (S0 & -S0):
                            continue
                        self._tick(0)
                        sub = self._extend(S1, S0, full & ~e, m - 1, 1)
                        if sub is not None:
                            return [S0, P0, S1] + sub
            return None

        return self._run(top)

    def path(self, head: int, tail: int, pool: int) -> list[int] | None:
        """Blocks ``[head, P_0, S_1, ..., P_{m-1}, tail]`` of an ell-path using exactly
        ``head ∪ pool ∪ tail``."""
        step = self.k - self.ell
        total = _popcount(head | pool | tail)
        if (total - self.ell) % step or total < self.k:
            return None
        m = (total - self.ell) // step

        def go():
            sub = self._extend(head, tail, pool, m, 0)
            return None if sub is None else [head] + sub + [tail]

        return self._run(go)


def blocks_to_seq(blocks: list[int], drop_last: bool = False) -> tuple[int, ...]:
    seq: list[int] = []
    for b in blocks[:-1] if drop_last else blocks:
        seq.extend(bits(b))
    return tuple(seq)


def hamiltonian_cycle(H: Hypergraph, ell: int, node_budget: int | None = DEFAULT_NODE_BUDGET,
                      time_budget: float | None = None, prune: bool = True
                      ) -> tuple[EllWalk | None, SearchStats]:
    """Complete search for a Hamiltonian ell-cycle.

    ``stats.outcome`` is ``found``, ``exhausted`` (certified absent) or
    ``timeout`` when a budget ran out.
    """
    step = H.k - ell
    if not 1 <= ell < H.k:
        raise InvalidQueryError(f"ell={ell} outside [1, k-1]")
    if H.n % step:
        raise InvalidQueryError(f"k-ell={step} does not divide n={H.n}")
    if 2 * ell >= H.k:
        return _tight_cycle(H, ell, node_budget, time_budget)
    bs = BlockSearch(H, ell, node_budget, time_budget, prune)
    blocks = bs.cycle()
    if blocks is None:
        return None, bs.stats
    return validate_cycle(H, blocks_to_seq(blocks), ell), bs.stats


def hamiltonian_path(H: Hypergraph, ell: int, head, tail, vertices,
                     node_budget: int | None = DEFAULT_NODE_BUDGET,
                     time_budget: float | None = None) -> tuple[EllWalk | None, SearchStats]:
    """ell-path on exactly ``vertices`` whose end-sets are ``head`` and ``tail``."""
    hm, tm, vm = mask_of(head), mask_of(tail), mask_of(vertices)
    if hm & tm or (hm | tm) & ~vm:
        raise InvalidQueryError("ends must be disjoint subsets of the vertex set")
    if len(set(head)) != ell or len(set(tail)) != ell:
        raise InvalidQueryError(f"ends must have exactly ell={ell} vertices")
    bs = BlockSearch(H, ell, node_budget, time_budget)
    blocks = bs.path(hm, tm, vm & ~(hm | tm))
    if blocks is None:
        return None, bs.stats
    return validate_path(H, blocks_to_seq(blocks), ell), bs.stats


# -- positional search for ell >= k/2 ------------------------------------------------


def _tight_cycle(H: Hypergraph, ell: int, node_budget, time_budget):
    """Vertex-by-vertex search; consecutive windows may overlap beyond two edges."""
    n, k, step = H.n, H.k, H.k - ell
    stats = SearchStats()
    t0 = time.perf_counter()
    m = n // step
    if m < 2 or n < k:
        stats.elapsed = time.perf_counter() - t0
        return None, stats
    seq = [0]
    used = [False] * n
    used[0] = True

    def window_ok(end: int) -> bool:
        # a window ends at position ``end`` when end+1-k is a window start
        start = end + 1 - k
        return start < 0 or start % step or H.has_edge(seq[start:end + 1])

    def rec() -> bool:
        stats.nodes += 1
        stats.max_depth = max(stats.max_depth, len(seq))
        if node_budget is not None and stats.nodes > node_budget:
            raise _Timeout
        if time_budget is not None and time.perf_counter() - t0 > time_budget:
            raise _Timeout
        if len(seq) == n:
            if seq[1] > seq[-1]:
                return False
            return all(H.has_edge([seq[(j * step + i) % n] for i in range(k)])
                       for j in range(m) if j * step + k > n)
        for v in range(1, n):
            if not used[v]:
                used[v] = True
                seq.append(v)
                if window_ok(len(seq) - 1) and rec():
                    return True
                seq.pop()
                used[v] = False
        return False

    try:
        found = rec()
        stats.outcome = "found" if found else "exhausted"
    except _Timeout:
        found = False
        stats.outcome = "timeout"
    stats.elapsed = time.perf_counter() - t0
    if not found:
        return None, stats
    return validate_cycle(H, seq, ell), stats


# -- enumeration and the brute-force oracle ------------------------------------------


def enumerate_paths(H: Hypergraph, ell: int, m: int) -> Iterator[EllWalk]:
    """Every ordered vertex sequence realising an ell-path with ``m`` edges."""
    k = H.k
    if m < 1:
        raise InvalidQueryError("m must be at least 1")

    def grow(seq: tuple[int, ...], left: int) -> Iterator[tuple[int, ...]]:
        if left == 0:
            yield seq
            return
        last = seq[-ell:]
        used = set(seq)
        for T in H.neighborhood(last):
            if used.isdisjoint(T):
                for order in itertools.permutations(T):
                    yield from grow(seq + order, left - 1)

    for e in H:
        for first in itertools.permutations(e):
            for seq in grow(first, m - 1):
                yield EllWalk(seq, ell, "path", k)


def hamiltonian_cycle_oracle(H: Hypergraph, ell: int) -> bool:
    """Brute force over cyclic orders with vertex 0 first, one per reflection pair,
    trying every window offset."""
    n, k = H.n, H.k
    step = k - ell
    if n > ORACLE_CAP:
        raise InvalidQueryError(f"oracle refused for n={n} > {ORACLE_CAP}")
    if n % step:
        raise InvalidQueryError(f"k-ell={step} does not divide n={n}")
    m = n // step
    if m < 2 or n < k or not len(H):
        return False
    edges = {frozenset(e) for e in H.edges}
    for perm in itertools.permutations(range(1, n)):
        if perm[0] > perm[-1]:
            continue
        seq = (0,) + perm
        for r in range(step):
            if all(frozenset(seq[(r + j * step + i) % n] for i in range(k)) in edges
                   for j in range(m)):
                return True
    return False
