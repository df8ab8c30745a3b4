"""Named hypergraphs, seeded random instances and the extremality test."""
from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb, floor
from typing import Literal

import numpy as np

from .hgraph import Hypergraph, ImplicitHypergraph, InvalidQueryError, VertexSet

EXHAUSTIVE_CAP = 14


def _check_loose(k: int, ell: int) -> None:
    if not (1 <= ell and 2 * ell < k):
        raise InvalidQueryError(f"need 1 <= ell < k/2, got k={k}, ell={ell}")


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float literal."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(str(x))


def extremal_size(n: int, k: int, ell: int) -> int:
    """|A| = ceil(n / (2(k-ell))) - 1 for the space-barrier construction."""
    return -(-n // (2 * (k - ell))) - 1


def extremal_example(n: int, k: int, ell: int, implicit: bool | None = None) -> Hypergraph:
    """All k-sets meeting ``A = {0, ..., a-1}``, ``a = ceil(n/(2(k-ell))) - 1``.

    No Hamiltonian ell-cycle exists: it would need ``n/(k-ell)`` edges, each
    meeting ``A``, while every vertex lies in at most two cycle edges.
    """
    _check_loose(k, ell)
    if n < k:
        raise InvalidQueryError(f"need n >= k, got n={n}, k={k}")
    a = extremal_size(n, k, ell)
    if implicit is None:
        implicit = comb(n, k) > 200_000
    if implicit:
        def degree(S: VertexSet) -> int:
            s = len(S)
            total = comb(n - s, k - s)
            return total if any(v < a for v in S) else total - comb(n - a - s, k - s)
        return ImplicitHypergraph(n, k, lambda e: e[0] < a, degree_fn=degree,
                                  name=f"extremal(a={a})")
    return Hypergraph(n, k, (e for e in itertools.combinations(range(n), k) if e[0] < a))


def cherry(k: int, ell: int) -> Hypergraph:
    """Two k-edges sharing exactly 2*ell vertices, on ``2k - 2ell`` vertices."""
    _check_loose(k, ell)
    n = 2 * k - 2 * ell
    return Hypergraph(n, k, [tuple(range(k)), tuple(range(k - 2 * ell, n))])


@dataclass(frozen=True)
class RandomInstance:
    H: Hypergraph
    target: int          # required (k-2)-degree after saturation
    achieved: int        # delta_{k-2} of the output
    requested: Fraction  # delta_fraction as passed in
    p: float
    seed: int


def random_mindeg(n: int, k: int, ell: int, delta_fraction, seed: int = 0,
                  p: float = 0.05) -> RandomInstance:
    """Seeded p-random hypergraph, topped up until every (k-2)-set has degree
    at least ``delta_fraction * C(n, 2)``.

    A (k-2)-set has only ``C(n-k+2, 2)`` possible link pairs, so the target
    is capped there; ``delta_fraction = 1`` therefore yields the complete
    hypergraph.  Fractions outside ``[0, 1]`` are unreachable.
    """
    delta = as_fraction(delta_fraction)
    if not 0 <= delta <= 1:
        raise InvalidQueryError(f"delta_fraction={delta} is unreachable (must lie in [0, 1])")
    if k < 2 or n < k:
        raise InvalidQueryError(f"need 2 <= k <= n, got n={n}, k={k}")
    rng = random.Random(seed)
    edges = {e for e in itertools.combinations(range(n), k) if rng.random() < p}
    target = min(ceil(delta * comb(n, 2)), comb(n - k + 2, 2))
    if target > 0:
        deg: dict[tuple[int, ...], int] = {}
        for e in edges:
            for K in itertools.combinations(e, k - 2):
                deg[K] = deg.get(K, 0) + 1
        order = list(itertools.combinations(range(n), k - 2))
        rng.shuffle(order)
        for K in order:
            need = target - deg.get(K, 0)
            if need <= 0:
                continue
            rest = [v for v in range(n) if v not in K]
            missing = [pr for pr in itertools.combinations(rest, 2)
                       if tuple(sorted(K + pr)) not in edges]
            for pr in rng.sample(missing, need):
                e = tuple(sorted(K + pr))
                edges.add(e)
                for K2 in itertools.combinations(e, k - 2):
                    deg[K2] = deg.get(K2, 0) + 1
    H = Hypergraph(n, k, edges)
    achieved = H.min_degree(k - 2)
    return RandomInstance(H, target, achieved, delta, p, seed)


# -- extremality -------------------------------------------------------------------


@dataclass(frozen=True)
class ExtremalityVerdict:
    extremal: Literal["yes", "no", "inconclusive"]
    witness: VertexSet | None
    density: float | None        # e(B) / C(n, k) of the best B seen
    mode: Literal["exhaustive", "local-search"]
    size: int                    # prescribed |B|
    edges_inside: int | None
    ties: int | None = None      # number of minimisers (exhaustive mode only)
    notes: dict = field(default_factory=dict)

    def record(self) -> dict:
        return {"extremal": self.extremal, "mode": self.mode, "size": self.size,
                "witness": list(self.witness) if self.witness is not None else None,
                "edges_inside": self.edges_inside, "density": self.density,
                "ties": self.ties}


def extremal_set_size(n: int, k: int, ell: int) -> int:
    return floor(Fraction(2 * (k - ell) - 1, 2 * (k - ell)) * n)


def _edge_array(H: Hypergraph) -> np.ndarray:
    return np.array(H.materialize().sorted_edges, dtype=np.int64).reshape(-1, H.k)


def extremality_check(H: Hypergraph, ell: int, xi, mode: str = "exhaustive",
                      cap: int = EXHAUSTIVE_CAP, restarts: int = 50,
                      seed: int = 0) -> ExtremalityVerdict:
    """Look for ``B`` of size ``floor((2(k-ell)-1)/(2(k-ell)) n)`` with ``e(B) <= xi C(n,k)``.

    Exhaustive mode scans every ``B`` (refused above ``cap`` vertices) and
    reports the lexicographically least minimiser with the number of ties.
    Local-search mode never answers "no".
    """
    xi = as_fraction(xi)
    if not 0 < xi <= 1:
        raise InvalidQueryError(f"xi={xi} must lie in (0, 1]")
    n, k = H.n, H.k
    b = extremal_set_size(n, k, ell)
    bound = xi * comb(n, k)
    if mode == "exhaustive":
        if n > cap:
            raise InvalidQueryError(f"exhaustive extremality refused for n={n} > cap {cap}")
        E = _edge_array(H)
        best, best_B, ties = None, None, 0
        for B in itertools.combinations(range(n), b):
            inB = np.zeros(n, dtype=bool)
            inB[list(B)] = True
            count = int(inB[E].all(axis=1).sum()) if len(E) else 0
            if best is None or count < best:
                best, best_B, ties = count, B, 1
            elif count == best:
                ties += 1
        verdict = "yes" if best <= bound else "no"
        return ExtremalityVerdict(verdict, best_B, best / comb(n, k), "exhaustive", b,
                                  best, ties)
    if mode != "local-search":
        raise InvalidQueryError(f"unknown extremality mode {mode!r}")
    best, best_B = _local_search(H, b, restarts, seed)
    verdict = "yes" if best <= bound else "inconclusive"
    return ExtremalityVerdict(verdict, best_B, best / comb(n, k), "local-search", b, best)


def _local_search(H: Hypergraph, b: int, restarts: int, seed: int) -> tuple[int, VertexSet]:
    """Single-swap descent on e(B) from ``restarts`` random starts."""
    n = H.n
    E = _edge_array(H)
    rng = random.Random(seed)

    def inside(mask: np.ndarray) -> int:
        return int(mask[E].all(axis=1).sum()) if len(E) else 0

    best, best_B = None, None
    for _ in range(restarts):
        inB = np.zeros(n, dtype=bool)
        inB[rng.sample(range(n), b)] = True
        cur = inside(inB)
        improved = True
        while improved:
            improved = False
            for u in np.flatnonzero(inB):
                for v in np.flatnonzero(~inB):
                    inB[u], inB[v] = False, True
                    val = inside(inB)
                    if val < cur:
                        cur, improved = val, True
                        break
                    inB[u], inB[v] = True, False
                if improved:
                    break
        B = tuple(int(v) for v in np.flatnonzero(inB))
        if best is None or (cur, B) < (best, best_B):
            best, best_B = cur, B
    return best, best_B


def random_implicit(n: int, k: int, p: float, seed: int = 0) -> ImplicitHypergraph:
    """Binomial random k-graph decided edge by edge from a keyed hash.

    Membership of a k-set is a fixed function of ``(seed, edge)``, so huge
    instances never need their edge set enumerated.
    """
    if not 0 <= p <= 1:
        raise InvalidQueryError(f"p={p} outside [0, 1]")
    key = seed.to_bytes(8, "little", signed=True)
    cut = int(p * 2**64)

    def pred(e: tuple[int, ...]) -> bool:
        digest = hashlib.blake2b(np.asarray(e, dtype=np.int32).tobytes(), digest_size=8,
                                 key=key).digest()
        return int.from_bytes(digest, "little") < cut

    return ImplicitHypergraph(n, k, pred, name=f"random(p={p}, seed={seed})")
