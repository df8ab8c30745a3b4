"""Three-edge absorbers: an ell-path ``P = (e1, e2, e3)`` together with a
four-edge path ``P' = (e1, f1, f2, e3)`` on ``V(P) ∪ S`` with the same ends.

Assembly order for a target ``S`` split into overlapping ``S1, S2``::

    f1 = X ∪ S1,          X = L1 ∪ F ∪ F1
    f2 = S2 ∪ F ∪ Y,      Y = L2 ∪ F2
    e2 = {x1, x2} ∪ L1' ∪ L2' ∪ F ∪ F1 ∪ F2
    e1 ⊇ {x1} ∪ L1,       e3 ⊇ {x2} ∪ L2
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial
from typing import Iterator

import numpy as np

from .hgraph import Hypergraph, InvalidQueryError, VertexSet, bits, mask_of, vertex_set
from .solver import BlockSearch, _splits, hamiltonian_path
from .walks import EllWalk, ends, validate_path

ABSORB_CAP = 16
COUNT_CAP = 13
DEFAULT_NODE_BUDGET = 100_000


@dataclass(frozen=True)
class Split:
    S1: VertexSet
    S2: VertexSet
    s1: int
    s2: int
    s3: int


def split_sizes(k: int, ell: int) -> list[tuple[int, int, int]]:
    """Every ``(s1, s2, s3)`` with ``s1 + s2 - s3 = k - ell``, ``s1 >= s2 >= s1 - 1``
    and ``max(0, 3ell - k) <= s3 < ell``, ordered by ``s3``."""
    out = []
    for s3 in range(max(0, 3 * ell - k), ell):
        total = k - ell + s3
        s1, s2 = -(-total // 2), total // 2
        if s2 >= s3:
            out.append((s1, s2, s3))
    return out


def split_target(S, k: int, ell: int, s3: int | None = None) -> Split:
    """Deterministic overlapping split of the (k-ell)-set ``S``.

    The smallest admissible overlap is used unless ``s3`` is given; ``S1``
    takes the lowest ``s1`` vertices and ``S2`` the highest ``s2``.
    """
    S = vertex_set(S)
    if len(S) != k - ell:
        raise InvalidQueryError(f"|S|={len(S)} must equal k-ell={k - ell}")
    options = split_sizes(k, ell)
    if s3 is not None:
        options = [o for o in options if o[2] == s3]
    # cannot happen for 1 <= ell < k/2
    assert options, f"no admissible split for k={k}, ell={ell}, s3={s3}"
    s1, s2, s3 = options[0]
    return Split(S[:s1], S[len(S) - s2:], s1, s2, s3)


@dataclass(frozen=True)
class Absorber:
    k: int
    ell: int
    S: VertexSet
    S1: VertexSet
    S2: VertexSet
    s1: int
    s2: int
    s3: int
    X: VertexSet
    Y: VertexSet
    L1: VertexSet
    L2: VertexSet
    L1p: VertexSet
    L2p: VertexSet
    F: VertexSet
    F1: VertexSet
    F2: VertexSet
    x1: int
    x2: int
    e1: VertexSet
    e2: VertexSet
    e3: VertexSet
    f1: VertexSet
    f2: VertexSet
    P: EllWalk
    Pprime: EllWalk

    @property
    def q(self) -> int:
        return 3 * self.k - 2 * self.ell

    def check_invariants(self, H: Hypergraph | None = None) -> dict[str, bool]:
        """The ten structural facts every absorber must satisfy, by name."""
        k, ell = self.k, self.ell
        st = set
        S1, S2 = st(self.S1), st(self.S2)
        e1, e2, e3, f1, f2 = map(st, (self.e1, self.e2, self.e3, self.f1, self.f2))
        parts_X = [self.L1, self.F, self.F1]
        parts_Y = [self.L2, self.F2]
        walks_ok = True
        if H is not None:
            try:
                validate_path(H, self.P.seq, ell)
                validate_path(H, self.Pprime.seq, ell)
            except ValueError:
                walks_ok = False
        return {
            "split_shape": (len(S1) >= len(S2) >= len(S1) - 1
                            and max(0, 3 * ell - k) <= len(S1 & S2) < ell
                            and S1 | S2 == st(self.S)),
            "split_identity": self.s1 + self.s2 - self.s3 == k - ell
                              and (self.s1, self.s2, self.s3) == (len(S1), len(S2), len(S1 & S2)),
            "part_sizes": (len(self.L1) == len(self.L2) == ell
                           and len(self.F) == ell - self.s3 > 0
                           and len(self.F1) == self.s2 - ell
                           and len(self.F2) == self.s1 - ell
                           and sorted(itertools.chain(*parts_X)) == sorted(self.X)
                           and sorted(itertools.chain(*parts_Y)) == sorted(self.Y)),
            "e1_e2_overlap": e1 & e2 == {self.x1} | st(self.L1p) and len(self.L1p) == ell - 1,
            "e2_e3_overlap": e2 & e3 == {self.x2} | st(self.L2p) and len(self.L2p) == ell - 1,
            "e1_f1_overlap": e1 & f1 == st(self.L1),
            "f1_f2_overlap": len(f1 & f2) == ell,
            "f2_e3_overlap": f2 & e3 == st(self.L2),
            "vertex_sets": (self.Pprime.vertices == self.P.vertices | st(self.S)
                            and len(self.P.seq) == self.q
                            and not self.P.vertices & st(self.S)),
            "shared_ends": walks_ok and ends(self.P) == ends(self.Pprime),
        }


def _avoid(H: Hypergraph, S: VertexSet, pool: set[int]) -> list[VertexSet]:
    return H.neighborhood(S, within=pool)


def _subsets(xs: VertexSet, r: int) -> Iterator[tuple[VertexSet, VertexSet]]:
    for part in itertools.combinations(xs, r):
        yield part, tuple(v for v in xs if v not in part)


class _Budget(Exception):
    pass


def find_absorber(H: Hypergraph, S, forbidden=(), ell: int = 1, s3: int | None = None,
                  node_budget: int | None = DEFAULT_NODE_BUDGET) -> Absorber | None:
    """Backtracking search for an absorber of ``S``; candidates are tried in
    lexicographic order, so the witness is deterministic.  ``None`` when the
    search space (or the node budget) is exhausted."""
    k = H.k
    S = vertex_set(S, H.n)
    forbidden = set(forbidden)
    if forbidden & set(S):
        raise InvalidQueryError("target meets the forbidden set")
    sp = split_target(S, k, ell, s3)
    s3 = sp.s3
    free0 = set(range(H.n)) - set(S) - forbidden
    counter = [0]

    def tick():
        counter[0] += 1
        if node_budget is not None and counter[0] > node_budget:
            raise _Budget

    def search():
        for X in _avoid(H, sp.S1, free0):
            tick()
            free1 = free0 - set(X)
            for L1, rest in _subsets(X, ell):
                for F, F1 in _subsets(rest, ell - s3):
                    for Y in _avoid(H, tuple(sorted(sp.S2 + F)), free1):
                        tick()
                        free2 = free1 - set(Y)
                        for L2, F2 in _subsets(Y, ell):
                            for L1p, _ in _subsets(L1, ell - 1):
                                for L2p, _ in _subsets(L2, ell - 1):
                                    core = tuple(sorted(L1p + L2p + F + F1 + F2))
                                    for pair in _avoid(H, core, free2):
                                        for x1, x2 in (pair, pair[::-1]):
                                            tick()
                                            got = _close(x1, x2, L1, L2, free2 - set(pair))
                                            if got is not None:
                                                e1, e3 = got
                                                return _assemble(H, k, ell, S, sp, X, Y, L1, L2,
                                                                 L1p, L2p, F, F1, F2, x1, x2,
                                                                 e1, core + pair, e3)
        return None

    def _close(x1, x2, L1, L2, free):
        for D1 in _avoid(H, tuple(sorted((x1,) + L1)), free):
            tick()
            for D3 in _avoid(H, tuple(sorted((x2,) + L2)), free - set(D1)):
                return D1, D3
        return None

    try:
        return search()
    except _Budget:
        return None


def _assemble(H, k, ell, S, sp: Split, X, Y, L1, L2, L1p, L2p, F, F1, F2, x1, x2,
              D1, core, D3) -> Absorber:
    l1 = tuple(v for v in L1 if v not in L1p)
    l2 = tuple(v for v in L2 if v not in L2p)
    D1, D3 = tuple(sorted(D1)), tuple(sorted(D3))
    head, tail = D1[:ell], D3[len(D3) - ell:]
    d1 = tuple(v for v in D1 if v not in head)
    d3 = tuple(v for v in D3 if v not in tail)
    mid = tuple(sorted(F + F1 + F2))
    seq_P = head + d1 + l1 + (x1,) + L1p + mid + (x2,) + L2p + l2 + d3 + tail
    only1 = tuple(v for v in sp.S1 if v not in sp.S2)
    only2 = tuple(v for v in sp.S2 if v not in sp.S1)
    both = tuple(v for v in sp.S1 if v in sp.S2)
    seq_Pp = (head + d1 + (x1,) + L1 + tuple(sorted(F1 + only1)) + tuple(sorted(both + F))
              + tuple(sorted(F2 + only2)) + L2 + (x2,) + d3 + tail)
    P = validate_path(H, seq_P, ell)
    Pp = validate_path(H, seq_Pp, ell)
    e1 = tuple(sorted((x1,) + L1 + D1))
    e3 = tuple(sorted((x2,) + L2 + D3))
    return Absorber(k=k, ell=ell, S=S, S1=sp.S1, S2=sp.S2, s1=sp.s1, s2=sp.s2, s3=sp.s3,
                    X=tuple(sorted(X)), Y=tuple(sorted(Y)), L1=L1, L2=L2, L1p=L1p, L2p=L2p,
                    F=F, F1=F1, F2=F2, x1=x1, x2=x2, e1=e1, e2=tuple(sorted(core)), e3=e3,
                    f1=tuple(sorted(X + sp.S1)), f2=tuple(sorted(sp.S2 + F + Y)),
                    P=P, Pprime=Pp)


def absorbs_check(H: Hypergraph, P: EllWalk, U, cap: int = ABSORB_CAP,
                  node_budget: int | None = None) -> EllWalk | None:
    """An ell-path on exactly ``V(P) ∪ U`` with the same end-sets as ``P``, or None."""
    U = vertex_set(U, H.n)
    if set(U) & P.vertices:
        raise InvalidQueryError("U must be disjoint from V(P)")
    step = H.k - P.ell
    if len(U) % step:
        raise InvalidQueryError(f"|U|={len(U)} is not a multiple of k-ell={step}")
    if not U:
        return P
    if len(P.seq) + len(U) > cap:
        raise InvalidQueryError(f"|V(P) ∪ U|={len(P.seq) + len(U)} exceeds cap {cap}")
    pe = ends(P)
    Q, _ = hamiltonian_path(H, P.ell, pe.head, pe.tail, P.vertices | set(U),
                            node_budget=node_budget)
    return Q


def count_absorbers(H: Hypergraph, S, ell: int = 1, cap: int = COUNT_CAP) -> int:
    """Ordered q-tuples avoiding ``S`` that form 3-edge ell-paths absorbing ``S``.

    Paths are enumerated as block sequences ``(A0, B0, A1, B1, A2, B2, A3)``;
    each stands for ``(ell!)^4 ((k-2ell)!)^3`` ordered tuples.
    """
    if H.n > cap:
        raise InvalidQueryError(f"count_absorbers refused for n={H.n} > cap {cap}")
    k = H.k
    S = vertex_set(S, H.n)
    if len(S) != k - ell:
        raise InvalidQueryError(f"|S| must be k-ell={k - ell}")
    Smask = mask_of(S)
    free = ((1 << H.n) - 1) & ~Smask
    bs = BlockSearch(H, ell, node_budget=None)
    masks = [int(x) for x in bs._within(free)]
    by_end: dict[int, list[int]] = {}
    for e in masks:
        for A in itertools.combinations(bits(e), ell):
            by_end.setdefault(mask_of(A), []).append(e)
    arrays = {A: np.array(es, dtype=np.uint64) for A, es in by_end.items()}
    empty = np.zeros(0, dtype=np.uint64)
    cache: dict[tuple[int, int, int], bool] = {}

    def absorbs(A0: int, A3: int, V: int) -> bool:
        key = (A0, A3, V)
        if key not in cache:
            cache[key] = bs.path(A0, A3, (V | Smask) & ~(A0 | A3)) is not None
        return cache[key]

    def onward(A: int, used: int) -> list[int]:
        arr = arrays.get(A, empty)
        return [int(e) for e in arr[(arr & np.uint64(used & ~A)) == 0]]

    total = 0
    for e1 in masks:
        for A0, rest in _splits(e1, ell):
            for A1, _B0 in _splits(rest, ell):
                for e2 in onward(A1, e1):
                    for A2, _B1 in _splits(e2 ^ A1, ell):
                        used = e1 | e2
                        for e3 in onward(A2, used):
                            for A3, _B2 in _splits(e3 ^ A2, ell):
                                if absorbs(A0, A3, used | e3):
                                    total += 1
    return total * factorial(ell) ** 4 * factorial(k - 2 * ell) ** 3
