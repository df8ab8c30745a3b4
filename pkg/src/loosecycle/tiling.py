"""Weighted homomorphic cherry tilings.

A cherry on ``2k - 2ell`` positions has edges at positions ``[0, k)`` and
``[k - 2ell, 2k - 2ell)``; positions ``[k - 2ell, k)`` are shared.  A
tiling assigns each homomorphism a positive multiple of ``beta``; the load of
a vertex is the total weight of the positions mapped onto it and must not
exceed 1.  All weights are exact fractions.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, lcm
from typing import Iterable, Literal, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csc_matrix

from .hgraph import Hypergraph, InvalidQueryError
from .gen import as_fraction

LP_CAP = 16
BINARY_CAP = 14

Phi = tuple[int, ...]


def cherry_edges(phi: Sequence[int], k: int, ell: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return tuple(phi[:k]), tuple(phi[k - 2 * ell:])


@dataclass(frozen=True)
class HomTiling:
    k: int
    ell: int
    beta: Fraction
    entries: tuple[tuple[Phi, Fraction], ...]

    @staticmethod
    def build(k: int, ell: int, beta, entries: Iterable[tuple[Sequence[int], object]]) -> "HomTiling":
        """Merge repeated homomorphisms and sort, giving a canonical value."""
        acc: dict[Phi, Fraction] = {}
        for phi, w in entries:
            phi = tuple(int(v) for v in phi)
            acc[phi] = acc.get(phi, Fraction(0)) + as_fraction(w)
        items = tuple(sorted((p, w) for p, w in acc.items() if w != 0))
        return HomTiling(k, ell, as_fraction(beta), items)

    @property
    def size(self) -> int:
        return 2 * self.k - 2 * self.ell

    def loads(self, t: int) -> list[Fraction]:
        out = [Fraction(0)] * t
        for phi, w in self.entries:
            for v in phi:
                out[v] += w
        return out

    @property
    def weight(self) -> Fraction:
        return sum((w for _, w in self.entries), Fraction(0)) * self.size

    def with_beta(self, beta) -> "HomTiling":
        return HomTiling(self.k, self.ell, as_fraction(beta), self.entries)

    def __add__(self, other: "HomTiling") -> "HomTiling":
        beta = _common_beta(self.beta, other.beta)
        return HomTiling.build(self.k, self.ell, beta, list(self.entries) + list(other.entries))

    def to_text(self, t: int) -> str:
        lines = [f"{self.beta} {self.k} {self.ell} {t}"]
        lines.extend(f"{w}: " + " ".join(map(str, phi)) for phi, w in self.entries)
        return "\n".join(lines) + "\n"


def _common_beta(a: Fraction, b: Fraction) -> Fraction:
    """Largest fraction dividing both."""
    return Fraction(np.gcd(a.numerator * b.denominator, b.numerator * a.denominator),
                    a.denominator * b.denominator)


def parse_tiling(text: str) -> tuple[HomTiling, int]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise InvalidQueryError("empty tiling file")
    head = lines[0].split()
    if len(head) != 4:
        raise InvalidQueryError("tiling header must be 'beta k ell t'")
    beta, k, ell, t = Fraction(head[0]), int(head[1]), int(head[2]), int(head[3])
    entries = []
    for lineno, ln in enumerate(lines[1:], start=2):
        w, _, rest = ln.partition(":")
        try:
            phi = tuple(int(x) for x in rest.split())
            entries.append((phi, Fraction(w.strip())))
        except ValueError:
            raise InvalidQueryError(f"line {lineno}: cannot parse {ln!r}") from None
    return HomTiling(k, ell, beta, tuple(entries)), t


# -- validation ----------------------------------------------------------------


@dataclass(frozen=True)
class TilingReport:
    ok: bool
    weight: Fraction
    violation: str | None = None
    vertex: int | None = None
    hom: Phi | None = None


def is_constant(phi: Phi) -> bool:
    return len(set(phi)) == 1


def tiling_validate(R: Hypergraph, h: HomTiling, allow_constant: bool = False) -> TilingReport:
    """Check shapes, homomorphism property, beta-granularity and loads <= 1."""
    k, ell, t = h.k, h.ell, R.n
    if k != R.k:
        return TilingReport(False, Fraction(0), f"tiling is {k}-uniform, R is {R.k}-uniform")
    for phi, w in h.entries:
        if len(phi) != h.size or any(not 0 <= v < t for v in phi):
            return TilingReport(False, Fraction(0), "malformed homomorphism", hom=phi)
        if w <= 0 or (w / h.beta).denominator != 1:
            return TilingReport(False, Fraction(0), f"weight {w} is not a positive multiple "
                                f"of beta={h.beta}", hom=phi)
        if allow_constant and is_constant(phi):
            continue
        for img in cherry_edges(phi, k, ell):
            if len(set(img)) != k or not R.has_edge(img):
                return TilingReport(False, Fraction(0), f"image {img} is not an edge", hom=phi)
    loads = h.loads(t)
    for v, load in enumerate(loads):
        if load > 1:
            return TilingReport(False, h.weight, f"vertex {v} has weight {load} > 1", vertex=v)
    total = sum(loads, Fraction(0))
    assert total == h.weight
    return TilingReport(True, total)


# -- building blocks -----------------------------------------------------------


def _hom_on_edge(e: Sequence[int], shared: set[int]) -> Phi:
    rest = tuple(sorted(v for v in e if v not in shared))
    return rest + tuple(sorted(shared)) + rest


def building_block(e: Sequence[int], ell: int, q, variant: Literal["skewed", "even"] = "skewed",
                   R: Hypergraph | None = None) -> HomTiling:
    """Tiling supported on one edge ``e = (v_1, ..., v_k)`` (order matters for ``skewed``).

    skewed: ``v_1..v_{k-2}`` get ``q`` and ``v_{k-1}, v_k`` get
    ``q (k-2) / (2(k-ell-1))``, granularity ``q / (2(k-ell-1))``.
    even: every vertex gets ``q``, granularity ``q / (2(k-ell))``.
    """
    e = tuple(int(v) for v in e)
    k = len(e)
    q = as_fraction(q)
    if len(set(e)) != k or not (1 <= ell and 2 * ell < k):
        raise InvalidQueryError(f"bad edge {e} or ell={ell}")
    if not 0 < q <= 1:
        raise InvalidQueryError(f"block weight q={q} must lie in (0, 1]")
    if R is not None and not R.has_edge(e):
        raise InvalidQueryError(f"{e} is not an edge of R")
    entries = []
    if variant == "skewed":
        beta = q / (2 * (k - ell - 1))
        body, tail = e[:k - 2], e[k - 2:]
        for s in range(k - 2):
            shifted = {body[(s + j) % (k - 2)] for j in range(2 * ell - 2)}
            entries.append((_hom_on_edge(e, shifted | set(tail)), beta))
    elif variant == "even":
        beta = q / (2 * (k - ell))
        for s in range(k):
            entries.append((_hom_on_edge(e, {e[(s + j) % k] for j in range(2 * ell)}), beta))
    else:
        raise InvalidQueryError(f"unknown variant {variant!r}")
    return HomTiling.build(k, ell, beta, entries)


# -- LP maximisation -----------------------------------------------------------


def load_classes(R: Hypergraph, ell: int, include_constant: bool = False
                 ) -> list[tuple[Phi, tuple[int, ...]]]:
    """One canonical homomorphism per distinct load pattern.

    A homomorphism's load depends only on its two edge images ``e, e'`` and
    the shared image ``I`` (``|I| = 2ell``, ``I ⊆ e ∩ e'``); swapping the
    edges gives the same pattern, so unordered pairs suffice.
    """
    k = R.k
    edges = list(R.materialize().sorted_edges)
    out = []
    for i, e in enumerate(edges):
        es = set(e)
        for e2 in edges[i:]:
            common = sorted(es.intersection(e2))
            if len(common) < 2 * ell:
                continue
            for I in itertools.combinations(common, 2 * ell):
                Is = set(I)
                a = tuple(v for v in e if v not in Is)
                b = tuple(v for v in e2 if v not in Is)
                phi = a + I + b
                out.append((phi, phi))
    if include_constant:
        out.extend(((v,) * (2 * k - 2 * ell), (v,)) for v in range(R.n))
    return out


@dataclass(frozen=True)
class LPResult:
    tiling: HomTiling
    fractional: float          # LP optimum of the total weight
    rounded: Fraction          # weight of the beta-granular tiling
    columns: int
    status: str

    @property
    def rounding_loss(self) -> float:
        return self.fractional - float(self.rounded)


def max_tiling_lp(R: Hypergraph, ell: int, beta, cap: int = LP_CAP,
                  include_constant: bool = False) -> LPResult:
    """Maximise ``sum x_phi (2k - 2ell)`` subject to vertex loads ``<= 1``, then
    round each ``x_phi`` down to a multiple of ``beta`` and refill greedily."""
    t, k = R.n, R.k
    if t > cap:
        raise InvalidQueryError(f"LP tiling refused for t={t} > cap {cap}")
    beta = as_fraction(beta)
    size = 2 * k - 2 * ell
    cols = load_classes(R, ell, include_constant)
    if not cols:
        return LPResult(HomTiling(k, ell, beta, ()), 0.0, Fraction(0), 0, "empty")
    rows, cidx = [], []
    for j, (phi, _) in enumerate(cols):
        for v in phi:
            rows.append(v)
            cidx.append(j)
    A = csc_matrix((np.ones(len(rows)), (rows, cidx)), shape=(t, len(cols)))
    A.sum_duplicates()
    res = linprog(-size * np.ones(len(cols)), A_ub=A, b_ub=np.ones(t), bounds=(0, None),
                  method="highs-ds")
    if res.status != 0:
        raise RuntimeError(f"LP failed: {res.message}")
    x = res.x
    fractional = float(-res.fun)
    # floor to beta multiples, exactly
    units = [int(np.floor(xv / float(beta) + 1e-9)) for xv in x]
    load = [Fraction(0)] * t
    entries: dict[int, int] = {}
    order = sorted(range(len(cols)), key=lambda j: (-x[j], cols[j][0]))
    for j in order:
        u = units[j]
        while u > 0:
            w = beta * u
            if all(load[v] + w * c <= 1 for v, c in _counts(cols[j][0]).items()):
                for v, c in _counts(cols[j][0]).items():
                    load[v] += w * c
                entries[j] = entries.get(j, 0) + u
                break
            u -= 1
    # greedy fill with single beta units
    changed = True
    while changed:
        changed = False
        for j in order:
            cnt = _counts(cols[j][0])
            if all(load[v] + beta * c <= 1 for v, c in cnt.items()):
                for v, c in cnt.items():
                    load[v] += beta * c
                entries[j] = entries.get(j, 0) + 1
                changed = True
    h = HomTiling.build(k, ell, beta, [(cols[j][0], beta * u) for j, u in entries.items()])
    return LPResult(h, fractional, h.weight, len(cols), res.message)


def _counts(phi: Phi) -> dict[int, int]:
    out: dict[int, int] = {}
    for v in phi:
        out[v] = out.get(v, 0) + 1
    return out


# -- local improvement moves ----------------------------------------------------


@dataclass(frozen=True)
class MoveResult:
    kind: Literal["three-matching", "four-neighbours", "weight-shift"]
    tiling: HomTiling
    gain: Fraction
    K: tuple[int, ...]
    cherries: tuple[Phi, Phi]
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class _Cherry:
    phi: Phi
    in_tiling: bool      # False for constant padding maps on unsaturated vertices


def _next_beta(unit: Fraction, k: int, weights: Iterable[Fraction]) -> Fraction:
    """``unit / D`` with ``16 k!`` dividing ``D`` and every weight a multiple."""
    D = 16 * factorial(k)
    for w in weights:
        D = lcm(D, (w / unit).denominator)
    return unit / D


def _link_matrix(R: Hypergraph, K: tuple[int, ...], C: Phi, C2: Phi) -> np.ndarray:
    Ks = set(K)
    A = np.zeros((len(C), len(C2)), dtype=bool)
    cache: dict[tuple[int, int], bool] = {}
    for i, a in enumerate(C):
        if a in Ks:
            continue
        for j, b in enumerate(C2):
            if b in Ks or a == b:
                continue
            key = (min(a, b), max(a, b))
            if key not in cache:
                cache[key] = R.has_edge(K + key)
            A[i, j] = cache[key]
    return A


def _three_matching(A: np.ndarray) -> list[tuple[int, int]] | None:
    rows, cols = A.shape
    for r3 in itertools.combinations(range(rows), 3):
        for c3 in itertools.permutations(range(cols), 3):
            if all(A[r, c] for r, c in zip(r3, c3)):
                return list(zip(r3, c3))
    return None


def _two_by_two(A: np.ndarray) -> list[tuple[int, int]] | None:
    """Rows i1 != i2 with two neighbours each, all four columns distinct."""
    rows = A.shape[0]
    for i1, i2 in itertools.combinations(range(rows), 2):
        n1, n2 = np.flatnonzero(A[i1]), np.flatnonzero(A[i2])
        for a, b in itertools.combinations(n1, 2):
            rest = [c for c in n2 if c not in (a, b)]
            if len(rest) >= 2:
                return [(i1, int(a)), (i1, int(b)), (i2, int(rest[0])), (i2, int(rest[1]))]
    return None


def _extremal_pair(A: np.ndarray) -> tuple[int, int] | None:
    """Special positions ``(i, j)`` when ``A`` is exactly the edges at row i or column j."""
    rows, cols = A.shape
    if A.sum() != rows + cols - 1:
        return None
    for i in range(rows):
        if not A[i].all():
            continue
        for j in range(cols):
            if not A[:, j].all():
                continue
            star = np.zeros_like(A)
            star[i, :] = True
            star[:, j] = True
            if (A == star).all():
                return i, j
    return None


def _apply(h: HomTiling, unit: Fraction, reductions: list[tuple[_Cherry, Fraction]],
           blocks: list[HomTiling]) -> HomTiling:
    entries = dict(h.entries)
    for ch, frac in reductions:
        if ch.in_tiling:
            entries[ch.phi] = entries[ch.phi] - frac * unit
    new = [(p, w) for p, w in entries.items() if w > 0]
    for b in blocks:
        new.extend(b.entries)
    weights = [w for _, w in new]
    k, ell = h.k, h.ell
    return HomTiling.build(k, ell, _next_beta(unit, k, weights), new)


def improvement_moves(R: Hypergraph, h: HomTiling, moves: Sequence[str] = ("a", "b", "c"),
                      use_padding: bool = True) -> MoveResult | None:
    """First strictly improving local move, or ``None``.

    ``a``: a 3-matching in the bipartite link of some (k-2)-set ``K`` between
    two cherries; ``b``: two cherry positions with two private neighbours
    each; ``c``: a weight shift through an extremal pair, followed by an even
    block on an edge whose vertices gained room.  Padding cherries are
    constant maps on vertices with at least ``beta`` spare capacity (moves a
    and b only).  Every returned tiling passes :func:`tiling_validate`.
    """
    k, ell, t = h.k, h.ell, R.n
    unit = h.beta
    base = tiling_validate(R, h)
    if not base.ok:
        raise InvalidQueryError(f"input tiling invalid: {base.violation}")
    loads = h.loads(t)
    size = h.size
    tiled = [_Cherry(phi, True) for phi, w in h.entries if w >= unit]
    pads = [_Cherry((v,) * size, False) for v in range(t) if loads[v] <= 1 - unit] \
        if use_padding else []
    f = Fraction(k - 2, k - ell - 1)
    Ks = [K for K in itertools.combinations(range(t), k - 2) if all(loads[v] <= 1 - unit for v in K)]

    def pairs(allow_pad: bool):
        pool = tiled + (pads if allow_pad else [])
        for C in pool:
            for C2 in pool:
                if C is C2 and (not C.in_tiling or dict(h.entries)[C.phi] < 2 * unit):
                    continue
                yield C, C2

    def finish(kind, K, C, C2, reductions, blocks, detail):
        h2 = _apply(h, unit, reductions, blocks)
        rep = tiling_validate(R, h2)
        if not rep.ok or rep.weight <= h.weight:
            return None
        return MoveResult(kind, h2, rep.weight - h.weight, K, (C.phi, C2.phi), detail)

    for kind in moves:
        for K in Ks:
            for C, C2 in pairs(kind in ("a", "b")):
                A = _link_matrix(R, K, C.phi, C2.phi)
                if kind == "a":
                    M = _three_matching(A)
                    if M is None:
                        continue
                    blocks = [building_block(K + (C.phi[i], C2.phi[j]), ell, unit / 3)
                              for i, j in M]
                    out = finish("three-matching", K, C, C2,
                                 [(C, f / 6), (C2, f / 6)], blocks, {"matching": M})
                elif kind == "b":
                    M = _two_by_two(A)
                    if M is None:
                        continue
                    blocks = [building_block(K + (C.phi[i], C2.phi[j]), ell, unit / 4)
                              for i, j in M]
                    out = finish("four-neighbours", K, C, C2,
                                 [(C, f / 4), (C2, f / 8)], blocks, {"edges": M})
                elif kind == "c":
                    if not (C.in_tiling and C2.in_tiling) or C is C2:
                        continue
                    sp = _extremal_pair(A)
                    if sp is None:
                        continue
                    out = _weight_shift(R, h, unit, K, C, C2, sp, A, loads)
                else:
                    raise InvalidQueryError(f"unknown move {kind!r}")
                if out is not None:
                    return out
    return None


def _weight_shift(R, h, unit, K, C, C2, sp, A, loads) -> MoveResult | None:
    k, ell, t = h.k, h.ell, R.n
    i0, j0 = sp
    nedges = 4 * (k - ell) - 2
    q = unit / nedges
    blocks = []
    for i, j in zip(*np.nonzero(A)):
        if (i == i0) == (j == j0):      # skip the edge joining the two special vertices
            continue
        blocks.append(building_block(K + (C.phi[int(i)], C2.phi[int(j)]), ell, q))
    f = Fraction(k - 2, 4 * (k - ell - 1))
    shifted = _apply(h, unit, [(C, f), (C2, f)], blocks)
    new_loads = shifted.loads(t)
    before = sorted(R.materialize().sorted_edges)
    best = None
    for e in before:
        room = min(1 - new_loads[v] for v in e)
        if room <= 0 or room <= min(1 - loads[v] for v in e):
            continue
        if best is None or room > best[0]:
            best = (room, e)
    if best is None:
        return None
    room, e = best
    fill = building_block(e, ell, room, "even")
    entries = list(shifted.entries) + list(fill.entries)
    h2 = HomTiling.build(k, ell, _next_beta(unit, k, [w for _, w in entries]), entries)
    rep = tiling_validate(R, h2)
    if not rep.ok or rep.weight <= h.weight:
        return None
    rho = Fraction(k - 2, 4 * (k - ell) - 2) * unit
    return MoveResult("weight-shift", h2, rep.weight - h.weight, K, (C.phi, C2.phi),
                      {"special": (int(i0), int(j0)), "shift": rho, "edge": e, "fill": room,
                       "shifted": shifted})


# -- fractional extremality -----------------------------------------------------


@dataclass(frozen=True)
class FracExtremalWitness:
    b: tuple[Fraction | float, ...]
    mass: float
    edge_mass: float
    mode: str


def _mass_target(k: int, ell: int, t: int) -> Fraction:
    return Fraction(2 * (k - ell) - 1, 2 * (k - ell)) * t


def edge_mass(R: Hypergraph, b: Sequence[float]) -> float:
    E = np.array(R.materialize().sorted_edges, dtype=np.int64).reshape(-1, R.k)
    if not len(E):
        return 0.0
    return float(np.prod(np.asarray(b, dtype=float)[E], axis=1).sum())


def fractional_extremality(R: Hypergraph, ell: int, beta, xi, mode: str = "binary",
                           cap: int = BINARY_CAP, restarts: int = 50, seed: int = 0,
                           iterations: int = 200) -> FracExtremalWitness | None:
    """Search ``b: V -> {0} ∪ [beta, 1]`` with large mass and small edge mass.

    ``binary`` enumerates 0/1 functions of the smallest admissible support
    and keeps the lexicographically least minimiser (refused above ``cap``
    vertices).  ``continuous`` runs projected descent from seeded starts;
    ``None`` then only means nothing was found.
    """
    t, k = R.n, R.k
    beta, xi = as_fraction(beta), as_fraction(xi)
    target = _mass_target(k, ell, t)
    bound = xi * comb(t, k)
    E = np.array(R.materialize().sorted_edges, dtype=np.int64).reshape(-1, k)
    if mode == "binary":
        if t > cap:
            raise InvalidQueryError(f"binary fractional extremality refused for t={t} > {cap}")
        size = -(-target.numerator // target.denominator)
        best = None
        for B in itertools.combinations(range(t), size):
            inB = np.zeros(t, dtype=bool)
            inB[list(B)] = True
            inside = int(inB[E].all(axis=1).sum()) if len(E) else 0
            if best is None or inside < best[0]:
                best = (inside, inB)
        if best is None or best[0] > bound:
            return None
        b = tuple(Fraction(int(x)) for x in best[1])
        return FracExtremalWitness(b, float(size), float(best[0]), "binary")
    if mode != "continuous":
        raise InvalidQueryError(f"unknown mode {mode!r}")
    return _continuous(E, t, k, float(beta), float(target), float(bound), restarts, seed,
                       iterations)


def _grad(E: np.ndarray, b: np.ndarray) -> np.ndarray:
    g = np.zeros_like(b)
    if not len(E):
        return g
    bE = b[E]
    for j in range(E.shape[1]):
        others = np.prod(np.delete(bE, j, axis=1), axis=1)
        np.add.at(g, E[:, j], others)
    return g


def _project(b: np.ndarray, g: np.ndarray, beta: float, target: float) -> np.ndarray:
    b = np.clip(b, 0.0, 1.0)
    low = (b > 0) & (b < beta)
    b[low] = np.where(b[low] >= beta / 2, beta, 0.0)
    order = np.argsort(g, kind="stable")
    for v in order:
        deficit = target - b.sum()
        if deficit <= 1e-12:
            break
        b[v] = min(1.0, max(beta, b[v] + deficit))
    return b


def _continuous(E, t, k, beta, target, bound, restarts, seed, iterations):
    rng = random.Random(seed)
    best = None
    for _ in range(restarts):
        b = np.array([rng.uniform(beta, 1.0) for _ in range(t)])
        b = _project(b, _grad(E, b), beta, target)
        for it in range(iterations):
            step = 0.1 * (0.01 ** (it / max(1, iterations - 1)))
            g = _grad(E, b)
            b = _project(b - step * (g - g.mean()), g, beta, target)
        mass = float(b.sum())
        val = float(np.prod(b[E], axis=1).sum()) if len(E) else 0.0
        if mass >= target - 1e-9 and (best is None or val < best[0]):
            best = (val, b.copy(), mass)
    if best is None or best[0] > bound:
        return None
    val, b, mass = best
    return FracExtremalWitness(tuple(float(x) for x in b), mass, val, "continuous")
