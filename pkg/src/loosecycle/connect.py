"""Connecting pairs of end-sets through a reservoir, and choosing the reservoir.

When ``k - 2 >= 2ell`` a pair ``(X, Y)`` is joined by one edge
``X ∪ Z' ∪ Y``.  When ``2ell = k - 1`` four edges are needed::

    X | v | L ∪ {x} | y | M' | x' | L' ∪ {y'} | v' | Y

where ``(x, L, y)`` and ``(x', L', y')`` are extendable triples and
``M' = M ∪ S`` closes the middle two edges.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from math import comb, floor
from typing import Iterable, Iterator, Literal

import numpy as np

from .hgraph import Hypergraph, InvalidQueryError, VertexSet, vertex_set
from .walks import EllWalk, validate_path

Stage = Literal["observation", "M-selection", "final-edge"]
STAGES: tuple[Stage, ...] = ("observation", "M-selection", "final-edge")
DEFAULT_NODE_BUDGET = 200_000
RETRY_CAP = 100


def reservoir_bound(k: int, m: int, eta: float) -> float:
    """Reservoir size needed by the connecting procedure: ``32 k m / eta^3``."""
    return 32 * k * m / eta ** 3


@dataclass(frozen=True)
class ConnectRequest:
    pairs: tuple[tuple[VertexSet, VertexSet], ...]
    R: VertexSet
    eta: float = 1.0

    def __post_init__(self):
        sets = [s for pr in self.pairs for s in pr]
        if sets:
            ell = len(sets[0])
            if any(len(s) != ell for s in sets):
                raise InvalidQueryError("all end-sets must have the same size ell")
        flat = [v for s in sets for v in s]
        if len(flat) != len(set(flat)):
            raise InvalidQueryError("end-sets must be mutually disjoint")
        if not 0 < self.eta <= 1:
            raise InvalidQueryError(f"eta={self.eta} must lie in (0, 1]")

    @classmethod
    def make(cls, pairs: Iterable, R: Iterable[int], eta: float = 1.0) -> "ConnectRequest":
        return cls(tuple((vertex_set(X), vertex_set(Y)) for X, Y in pairs),
                   vertex_set(R), eta)

    @property
    def ell(self) -> int:
        return len(self.pairs[0][0]) if self.pairs else 0

    @property
    def ends(self) -> frozenset[int]:
        return frozenset(v for pr in self.pairs for s in pr for v in s)


@dataclass(frozen=True)
class ExtendableTriple:
    x: int
    L: VertexSet
    y: int
    side_x: int   # |N_{R\F}(X ∪ L ∪ {x})|, truncated at the threshold when scanning lazily
    side_y: int


@dataclass(frozen=True)
class ConnectFailure:
    pair_index: int
    stage: Stage
    detail: str = ""


@dataclass
class ConnectOutcome:
    paths: list[EllWalk]
    failure: ConnectFailure | None = None
    nodes: int = 0

    @property
    def ok(self) -> bool:
        return self.failure is None


class _Budget(Exception):
    pass


class _Counter:
    def __init__(self, budget: int | None):
        self.budget = budget
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise _Budget


def _count_neighbors(H: Hypergraph, T: tuple[int, ...], pool: Iterable[int],
                     stop_at: float | None = None) -> int:
    """Vertices ``w`` of ``pool`` (outside ``T``) with ``T ∪ {w}`` an edge."""
    Ts = set(T)
    count = 0
    for w in pool:
        if w not in Ts and H.has_edge(T + (w,)):
            count += 1
            if stop_at is not None and count >= stop_at:
                break
    return count


def _triples(H: Hypergraph, X: VertexSet, Y: VertexSet, avail: list[int], r: int,
             eta: float, exclude: frozenset[int] = frozenset(), exact: bool = False,
             counter: _Counter | None = None) -> Iterator[ExtendableTriple]:
    ell = len(X)
    thr = eta * r / 4
    stop = None if exact else thr
    for L in itertools.combinations([v for v in avail if v not in exclude], ell - 1):
        Ls = set(L)
        pool = [v for v in avail if v not in Ls]
        memo_y: dict[int, int] = {}

        def side(Z: VertexSet, z: int) -> int:
            if counter is not None:
                counter.tick()
            return _count_neighbors(H, tuple(sorted(Z + L + (z,))), pool, stop)

        for x in pool:
            if x in exclude:
                continue
            cx = side(X, x)
            if cx < thr:
                continue
            for y in pool:
                if y == x or y in exclude:
                    continue
                if y not in memo_y:
                    memo_y[y] = side(Y, y)
                if memo_y[y] >= thr:
                    yield ExtendableTriple(x, L, y, cx, memo_y[y])


def find_extendable_triples(H: Hypergraph, X, Y, R, F=(), eta: float = 1.0
                            ) -> Iterator[ExtendableTriple]:
    """Every extendable triple ``(x, L, y)`` in ``R \\ F`` with exact side counts.

    A triple qualifies when both ``X ∪ L ∪ {x}`` and ``Y ∪ L ∪ {y}`` have at
    least ``eta |R| / 4`` completions inside ``R \\ F``.
    """
    X, Y = vertex_set(X, H.n), vertex_set(Y, H.n)
    if 2 * len(X) != H.k - 1:
        raise InvalidQueryError("extendable triples need 2 ell = k - 1")
    Fs = set(F) | set(X) | set(Y)
    R = vertex_set(R, H.n)
    avail = [v for v in R if v not in Fs]
    return _triples(H, X, Y, avail, len(R), eta, exact=True)


@dataclass(frozen=True)
class TripleBoundReport:
    hypothesis: bool        # link condition held for every X ∪ L and Y ∪ L
    bound: float            # (eta r / 8)^2
    min_count: int          # fewest triples over all L
    per_L: dict

    @property
    def ok(self) -> bool:
        return not self.hypothesis or self.min_count >= self.bound


def link_pairs_in(H: Hypergraph, K: tuple[int, ...], R: Iterable[int],
                  stop_at: float | None = None) -> int:
    """|N(K) ∩ C(R, 2)|, optionally stopping once ``stop_at`` is reached."""
    Ks = set(K)
    pool = [v for v in R if v not in Ks]
    count = 0
    for a, b in itertools.combinations(pool, 2):
        if H.has_edge(K + (a, b)):
            count += 1
            if stop_at is not None and count >= stop_at:
                break
    return count


def triple_bound_report(H: Hypergraph, X, Y, R, F=(), eta: float = 1.0) -> TripleBoundReport:
    """Per-L triple counts versus ``(eta r / 8)^2``; the bound is claimed only
    when ``|N(K) ∩ C(R,2)| >= eta C(r,2)`` for ``K = X ∪ L`` and ``K = Y ∪ L``."""
    X, Y, R = vertex_set(X, H.n), vertex_set(Y, H.n), vertex_set(R, H.n)
    r = len(R)
    need = eta * comb(r, 2)
    per_L: dict[VertexSet, int] = {}
    hyp = True
    Fs = set(F) | set(X) | set(Y)
    avail = [v for v in R if v not in Fs]
    for L in itertools.combinations(avail, len(X) - 1):
        per_L[L] = 0
        for K in (X + L, Y + L):
            if link_pairs_in(H, tuple(sorted(K)), R, need) < need:
                hyp = False
    for t in find_extendable_triples(H, X, Y, R, F, eta):
        per_L[t.L] += 1
    return TripleBoundReport(hyp, (eta * r / 8) ** 2, min(per_L.values(), default=0), per_L)


# -- connecting ------------------------------------------------------------------


def _single_edge(H, X, Y, avail, counter) -> EllWalk | None:
    k, ell = H.k, len(X)
    z = k - 2 - 2 * ell
    for Z in itertools.combinations(avail, z):
        counter.tick()
        rest = [v for v in avail if v not in Z]
        for a, b in itertools.combinations(rest, 2):
            counter.tick()
            if H.has_edge(X + Y + Z + (a, b)):
                return validate_path(H, X + tuple(sorted(Z + (a, b))) + Y, ell)
    return None


def _gadget(H, X, Y, avail, r, eta, counter, stage: list[int]) -> EllWalk | None:
    ell = len(X)
    for t1 in _triples(H, X, Y, avail, r, eta, counter=counter):
        stage[0] = max(stage[0], 1)
        used1 = set(t1.L) | {t1.x, t1.y}
        core1 = t1.L + (t1.x, t1.y)
        free1 = [v for v in avail if v not in used1]
        for S in itertools.combinations(free1, ell - 2):
            free_s = [v for v in free1 if v not in S]
            for M in itertools.combinations(free_s, 2):
                counter.tick()
                Mp = tuple(sorted(S + M))
                if not H.has_edge(Mp + core1):
                    continue
                for t2 in _triples(H, X, Y, avail, r, eta, exclude=frozenset(used1 | set(Mp)),
                                   counter=counter):
                    counter.tick()
                    core2 = t2.L + (t2.x, t2.y)
                    if not H.has_edge(Mp + core2):
                        continue
                    stage[0] = max(stage[0], 2)
                    used2 = used1 | set(Mp) | set(core2)
                    free2 = [v for v in avail if v not in used2]
                    for v in free2:
                        counter.tick()
                        if not H.has_edge(X + t1.L + (v, t1.x)):
                            continue
                        for v2 in free2:
                            if v2 != v and H.has_edge(Y + t2.L + (t2.y, v2)):
                                seq = (X + (v,) + tuple(sorted(t1.L + (t1.x,))) + (t1.y,) + Mp
                                       + (t2.x,) + tuple(sorted(t2.L + (t2.y,))) + (v2,) + Y)
                                return validate_path(H, seq, ell)
    return None


def connect_all(H: Hypergraph, req: ConnectRequest,
                node_budget: int | None = DEFAULT_NODE_BUDGET) -> ConnectOutcome:
    """Vertex-disjoint ell-paths of size at most four joining each ``(X_i, Y_i)``,
    interiors drawn from the reservoir minus everything already used."""
    k = H.k
    ell = req.ell
    if not req.pairs:
        return ConnectOutcome([])
    if not (1 <= ell and 2 * ell < k):
        raise InvalidQueryError(f"need 1 <= ell < k/2, got ell={ell}, k={k}")
    r = len(req.R)
    forbidden = set(req.ends)
    counter = _Counter(node_budget)
    paths: list[EllWalk] = []
    for i, (X, Y) in enumerate(req.pairs):
        avail = [v for v in req.R if v not in forbidden]
        stage = [0]
        try:
            if k - 2 >= 2 * ell:
                T = _single_edge(H, X, Y, avail, counter)
                stage[0] = 2
            else:
                T = _gadget(H, X, Y, avail, r, req.eta, counter, stage)
        except _Budget:
            return ConnectOutcome(paths, ConnectFailure(i, STAGES[stage[0]], "node budget"),
                                  counter.nodes)
        if T is None:
            return ConnectOutcome(paths, ConnectFailure(i, STAGES[stage[0]], "search exhausted"),
                                  counter.nodes)
        paths.append(T)
        forbidden |= T.vertices
    return ConnectOutcome(paths, None, counter.nodes)


# -- reservoir -------------------------------------------------------------------


class ReservoirError(RuntimeError):
    pass


@dataclass(frozen=True)
class Reservoir:
    R: VertexSet
    attempts: int
    required: float          # (eta/2) C(|R|, 2)
    min_link: int            # smallest |N(K) ∩ C(R,2)| over the checked K
    size_bound: float        # 32 k m / eta^3
    notes: dict = field(default_factory=dict)

    @property
    def size_bound_met(self) -> bool:
        return len(self.R) >= self.size_bound


def min_link_into(H: Hypergraph, R: Iterable[int], stop_below: float | None = None) -> int:
    """min over all (k-2)-sets K of |N(K) ∩ C(R, 2)|."""
    R = sorted(set(R))
    k, n = H.k, H.n
    if H.explicit:
        if not len(H):
            return 0
        E = np.array(H.sorted_edges, dtype=np.int64)
        inR = np.zeros(n, dtype=bool)
        inR[R] = True
        weights = n ** np.arange(k - 3, -1, -1, dtype=np.int64)
        keys = []
        for a, b in itertools.combinations(range(k), 2):
            rows = E[inR[E[:, a]] & inR[E[:, b]]]
            rest = [c for c in range(k) if c not in (a, b)]
            keys.append(rows[:, rest] @ weights)
        keys = np.concatenate(keys) if keys else np.zeros(0, dtype=np.int64)
        _, counts = np.unique(keys, return_counts=True)
        if len(counts) < comb(n, k - 2):
            return 0
        return int(counts.min())
    best = None
    for K in itertools.combinations(range(n), k - 2):
        c = link_pairs_in(H, K, R)
        best = c if best is None else min(best, c)
        if stop_below is not None and best < stop_below:
            break
    return best or 0


def reservoir_select(H: Hypergraph, epsilon: float, eta: float, m: int, seed: int = 0,
                     retries: int = RETRY_CAP, enforce_size: bool = False,
                     pool: Iterable[int] | None = None) -> Reservoir:
    """Uniform random ``floor(epsilon n)``-set whose pair links stay dense.

    A sample is accepted when every (k-2)-set ``K`` has at least
    ``(eta/2) C(|R|, 2)`` link pairs inside ``R``.  The connecting size bound
    ``32 k m / eta^3`` is reported, and only enforced when asked.  ``pool``
    restricts where the sample is drawn from (the size stays ``floor(epsilon n)``,
    capped by the pool).
    """
    n, k = H.n, H.k
    pool = sorted(set(range(n) if pool is None else pool))
    size = min(floor(epsilon * n), len(pool))
    bound = reservoir_bound(k, m, eta)
    if enforce_size and size < bound:
        raise ReservoirError(f"|R|={size} is below the connecting bound {bound:.1f}")
    if size < 2:
        raise ReservoirError(f"reservoir of size {size} is too small")
    required = eta / 2 * comb(size, 2)
    rng = random.Random(seed)
    best = -1
    for attempt in range(1, retries + 1):
        R = tuple(sorted(rng.sample(pool, size)))
        low = min_link_into(H, R, stop_below=required)
        best = max(best, low)
        if low >= required:
            return Reservoir(R, attempt, required, low, bound)
    raise ReservoirError(f"no reservoir after {retries} samples "
                         f"(best min link {best} < {required:.1f})")
