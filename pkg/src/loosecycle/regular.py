"""Tuple densities, (eps, d)-regularity, reduced hypergraphs and path covers."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb, sqrt
from typing import Literal, Sequence

import numpy as np

from .gen import as_fraction
from .hgraph import Hypergraph, InvalidQueryError, ParseError
from .walks import EllWalk, validate_path

REGULARITY_BUDGET = 2 ** 24


# -- partitions --------------------------------------------------------------------


@dataclass(frozen=True)
class RegPartition:
    """``V_1, ..., V_t`` of equal size; ``V_0`` is everything unlisted."""
    n: int
    classes: tuple[tuple[int, ...], ...]
    annotations: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        seen: set[int] = set()
        sizes = {len(c) for c in self.classes}
        if len(sizes) > 1:
            raise InvalidQueryError(f"classes must have equal size, got sizes {sorted(sizes)}")
        for c in self.classes:
            for v in c:
                if not 0 <= v < self.n or v in seen:
                    raise InvalidQueryError(f"vertex {v} repeated or out of range")
                seen.add(v)

    @property
    def t(self) -> int:
        return len(self.classes)

    @property
    def m(self) -> int:
        return len(self.classes[0]) if self.classes else 0

    @property
    def exceptional(self) -> tuple[int, ...]:
        used = {v for c in self.classes for v in c}
        return tuple(v for v in range(self.n) if v not in used)

    def to_text(self) -> str:
        lines = [f"{self.t} {self.m}"]
        lines.extend(" ".join(map(str, c)) for c in self.classes)
        return "\n".join(lines) + "\n"


def parse_partition(text: str, n: int) -> RegPartition:
    lines = [(i, ln.split()) for i, ln in enumerate(text.splitlines(), start=1)
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ParseError("empty partition file", 1)
    lineno, head = lines[0]
    if len(head) != 2:
        raise ParseError("header must be 't m'", lineno)
    t, m = int(head[0]), int(head[1])
    if len(lines) - 1 != t:
        raise ParseError(f"expected {t} class lines, found {len(lines) - 1}", lineno)
    classes = []
    for lineno, toks in lines[1:]:
        try:
            cls = tuple(int(x) for x in toks)
        except ValueError:
            raise ParseError(f"non-integer vertex in {' '.join(toks)!r}", lineno) from None
        if len(cls) != m:
            raise ParseError(f"class has {len(cls)} vertices, expected {m}", lineno)
        classes.append(cls)
    try:
        return RegPartition(n, tuple(classes))
    except InvalidQueryError as exc:
        raise ParseError(str(exc), lines[0][0]) from None


def equitable_partition(n: int, t: int) -> RegPartition:
    """Consecutive blocks of ``n // t`` vertices; the remainder forms ``V_0``."""
    if not 1 <= t <= n:
        raise InvalidQueryError(f"need 1 <= t <= n, got t={t}, n={n}")
    m = n // t
    return RegPartition(n, tuple(tuple(range(i * m, (i + 1) * m)) for i in range(t)))


# -- densities and regularity ------------------------------------------------------------


def _check_classes(H: Hypergraph, classes: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    cls = [tuple(sorted(int(v) for v in c)) for c in classes]
    if len(cls) != H.k:
        raise InvalidQueryError(f"need {H.k} classes, got {len(cls)}")
    seen: set[int] = set()
    for c in cls:
        if not c:
            raise InvalidQueryError("classes must be nonempty")
        if seen.intersection(c):
            raise InvalidQueryError("classes overlap")
        seen.update(c)
    return cls


def crossing_tensor(H: Hypergraph, classes: Sequence[Sequence[int]]) -> np.ndarray:
    """0/1 array indexed by one position per class, 1 where the k vertices form an edge."""
    cls = _check_classes(H, classes)
    shape = tuple(len(c) for c in cls)
    T = np.zeros(shape, dtype=np.int64)
    if H.explicit and len(H) < np.prod(shape):
        pos = {}
        for i, c in enumerate(cls):
            for j, v in enumerate(c):
                pos[v] = (i, j)
        for e in H.edges:
            idx = [None] * H.k
            for v in e:
                p = pos.get(v)
                if p is None or idx[p[0]] is not None:
                    break
                idx[p[0]] = p[1]
            else:
                T[tuple(idx)] = 1
    else:
        for idx in itertools.product(*(range(s) for s in shape)):
            if H.has_edge([cls[i][j] for i, j in enumerate(idx)]):
                T[idx] = 1
    return T


def tuple_density(H: Hypergraph, classes: Sequence[Sequence[int]]) -> Fraction:
    T = crossing_tensor(H, classes)
    return Fraction(int(T.sum()), int(np.prod(T.shape)))


@dataclass(frozen=True)
class RegularityVerdict:
    status: Literal["regular", "irregular", "probably-regular"]
    density: Fraction                          # full-tuple density
    epsilon: Fraction
    low: Fraction                              # least sub-tuple density seen
    high: Fraction                             # largest sub-tuple density seen
    witness: tuple[tuple[int, ...], ...] | None = None
    witness_density: Fraction | None = None
    checked: int = 0

    @property
    def eps_regular(self) -> bool:
        """Some ``d' > 0`` keeps every seen sub-density within eps of it."""
        return self.high - self.low <= 2 * self.epsilon and self.low + self.epsilon > 0

    def admits(self, d) -> bool:
        """Reduced-edge rule: full density at least ``d`` and eps-regular."""
        return self.density >= as_fraction(d) and self.eps_regular


def _admissible(size: int, eps: Fraction) -> list[int]:
    lo = max(1, ceil(eps * size))
    return [mask for mask in range(1, 1 << size) if bin(mask).count("1") >= lo]


def regularity_check(H: Hypergraph, classes: Sequence[Sequence[int]], epsilon,
                     mode: Literal["exhaustive", "sampled"] = "exhaustive",
                     seed: int = 0, trials: int = 1000,
                     budget: int = REGULARITY_BUDGET) -> RegularityVerdict:
    """Test ``|d(A_1..A_k) - d| <= eps`` for sub-tuples with ``|A_i| >= eps |V_i|``, where
    ``d`` is the full-tuple density.

    Exhaustive mode scans every admissible sub-tuple and, on failure, returns
    the one deviating most.  Sampled mode can only refute regularity.
    """
    eps = as_fraction(epsilon)
    cls = _check_classes(H, classes)
    T = crossing_tensor(H, cls)
    total = int(np.prod(T.shape))
    d = Fraction(int(T.sum()), total)
    k = H.k
    if mode == "exhaustive":
        if 2 ** sum(T.shape) > budget:
            raise InvalidQueryError(f"exhaustive regularity needs 2^{sum(T.shape)} > budget {budget}")
        masks = [_admissible(s, eps) for s in T.shape]
        Ms = [np.array([[(mk >> j) & 1 for j in range(s)] for mk in ms], dtype=np.int64)
              for ms, s in zip(masks, T.shape)]
        counts = [M.sum(axis=1) for M in Ms]
        # contract all axes but the first once, then sweep the first axis
        rest = T
        for M in Ms[1:]:
            rest = np.tensordot(rest, M, axes=([1], [1]))      # moves contracted axis last
        sizes_rest = counts[1]
        for c in counts[2:]:
            sizes_rest = np.multiply.outer(sizes_rest, c)
        best = (Fraction(-1), None)
        lo, hi = Fraction(d), Fraction(d)
        checked = 0
        for a, mk in enumerate(masks[0]):
            e = np.tensordot(Ms[0][a], rest, axes=([0], [0]))
            size = counts[0][a] * sizes_rest
            dens = e / size
            checked += dens.size
            imin, imax = np.unravel_index(dens.argmin(), dens.shape), \
                np.unravel_index(dens.argmax(), dens.shape)
            lo = min(lo, Fraction(int(e[imin]), int(size[imin])))
            hi = max(hi, Fraction(int(e[imax]), int(size[imax])))
            for idx in (imin, imax):
                val = Fraction(int(e[idx]), int(size[idx]))
                dev = abs(val - d)
                if dev > eps and dev > best[0]:
                    best = (dev, (a,) + tuple(int(i) for i in idx), val)
        if best[1] is None:
            return RegularityVerdict("regular", d, eps, lo, hi, checked=checked)
        pick = best[1]
        witness = tuple(tuple(cls[i][j] for j in range(len(cls[i])) if (masks[i][pick[i]] >> j) & 1)
                        for i in range(k))
        return RegularityVerdict("irregular", d, eps, lo, hi, witness, best[2], checked)
    if mode != "sampled":
        raise InvalidQueryError(f"unknown regularity mode {mode!r}")
    rng = random.Random(seed)
    lo, hi = d, d
    for trial in range(trials):
        A = []
        for c in cls:
            size = rng.randint(max(1, ceil(eps * len(c))), len(c))
            A.append(sorted(rng.sample(range(len(c)), size)))
        sub = T[np.ix_(*A)]
        val = Fraction(int(sub.sum()), int(sub.size))
        lo, hi = min(lo, val), max(hi, val)
        if abs(val - d) > eps:
            witness = tuple(tuple(cls[i][j] for j in A[i]) for i in range(k))
            return RegularityVerdict("irregular", d, eps, lo, hi, witness, val, trial + 1)
    return RegularityVerdict("probably-regular", d, eps, lo, hi, checked=trials)


# -- reduced hypergraph ------------------------------------------------------------------


@dataclass(frozen=True)
class ReducedHypergraph:
    R: Hypergraph
    epsilon: Fraction
    d: Fraction
    mode: str
    annotations: dict      # class-index tuple -> RegularityVerdict


def reduced(H: Hypergraph, P: RegPartition, epsilon, d, mode: str = "exhaustive",
            seed: int = 0, trials: int = 200) -> ReducedHypergraph:
    """``{i_1..i_k}`` is an edge iff the class tuple has density at least ``d``
    and is eps-regular (for some positive density).

    Tuples are checked in increasing class-index order.  In sampled mode a
    tuple counts as eps-regular when no pair of sampled sub-tuples refutes it.
    """
    eps, d = as_fraction(epsilon), as_fraction(d)
    notes = {}
    edges = []
    for idx in itertools.combinations(range(P.t), H.k):
        v = regularity_check(H, [P.classes[i] for i in idx], eps, mode, seed, trials)
        notes[idx] = v
        if v.admits(d):
            edges.append(idx)
    return ReducedHypergraph(Hypergraph(P.t, H.k, edges), eps, d, mode, notes)


@dataclass(frozen=True)
class InheritanceReport:
    violators: int
    allowed: float                 # sqrt(eps) * C(t, k-2)
    threshold: float               # (c - 2d - sqrt(eps)) * C(t, 2)
    passed: bool
    size_condition: bool           # t >= 2k/d, needed by the inheritance argument


def inheritance_report(R: ReducedHypergraph | Hypergraph, c, d, epsilon) -> InheritanceReport:
    """Count (k-2)-sets of clusters whose degree drops below ``(c - 2d - sqrt(eps)) C(t, 2)``."""
    G = R.R if isinstance(R, ReducedHypergraph) else R
    t, k = G.n, G.k
    c, d, eps = float(as_fraction(c)), float(as_fraction(d)), float(as_fraction(epsilon))
    threshold = (c - 2 * d - sqrt(eps)) * comb(t, 2)
    violators = sum(1 for K in itertools.combinations(range(t), k - 2) if G.degree(K) < threshold)
    allowed = sqrt(eps) * comb(t, k - 2)
    return InheritanceReport(violators, allowed, threshold, violators <= allowed,
                             d > 0 and t >= 2 * k / d)


# -- path cover of a regular tuple --------------------------------------------------------------


@dataclass(frozen=True)
class CoverResult:
    paths: tuple[EllWalk, ...]
    uncovered: tuple[int, ...]
    hypothesis: bool | None        # regularity verified (None when too large to check)
    path_bound: float
    uncovered_bound: float

    @property
    def bounds_hold(self) -> bool | None:
        if not self.hypothesis:
            return None
        return len(self.paths) <= self.path_bound and len(self.uncovered) <= self.uncovered_bound


def _first_edge(H: Hypergraph, pools: list[list[int]], fixed: dict[int, tuple[int, ...]]):
    """Lexicographically least crossing edge using ``fixed`` for some class slots."""
    choices = [[(v,) for v in pool] if i not in fixed else [fixed[i]] for i, pool in enumerate(pools)]
    for pick in itertools.product(*choices):
        verts = [v for part in pick for v in part]
        if H.has_edge(verts):
            return pick
    return None


def cover_regular_tuple(H: Hypergraph, classes: Sequence[Sequence[int]], ell: int, epsilon, d,
                        check_regularity: bool = True) -> CoverResult:
    """Greedy vertex-disjoint ell-paths inside a tuple with ``2ell`` classes of size m
    followed by ``k - 2ell`` classes of size 2m.

    Each edge takes one vertex per class; the ell-sets shared by consecutive
    edges alternate between the first ``ell`` and the next ``ell`` small
    classes, so small classes feed the overlaps and large ones the interiors.
    """
    k = H.k
    cls = _check_classes(H, classes)
    if not (1 <= ell and 2 * ell < k):
        raise InvalidQueryError(f"need 1 <= ell < k/2, got ell={ell}")
    m = len(cls[0])
    if any(len(c) != m for c in cls[:2 * ell]) or any(len(c) != 2 * m for c in cls[2 * ell:]):
        raise InvalidQueryError("class sizes must be m (first 2ell) and 2m (the rest)")
    eps, dd = as_fraction(epsilon), as_fraction(d)
    hyp = None
    if check_regularity and 2 ** sum(len(c) for c in cls) <= REGULARITY_BUDGET:
        v = regularity_check(H, cls, eps)
        hyp = v.status == "regular" and v.density >= dd
    free = [list(c) for c in cls]
    groups = (list(range(ell)), list(range(ell, 2 * ell)))
    large = list(range(2 * ell, k))
    paths = []
    while True:
        pick = _first_edge(H, free, {})
        if pick is None:
            break
        blocks = [tuple(pick[i][0] for i in groups[0]), tuple(pick[i][0] for i in large),
                  tuple(pick[i][0] for i in groups[1])]
        for i, part in enumerate(pick):
            free[i].remove(part[0])
        side = 1
        while True:
            last = blocks[-1]
            nxt = groups[1 - side]
            fixed = {i: (last[j],) for j, i in enumerate(groups[side])}
            pools = [free[i] if i not in fixed else [] for i in range(k)]
            pick = _first_edge(H, pools, fixed)
            if pick is None:
                break
            blocks.append(tuple(pick[i][0] for i in large))
            blocks.append(tuple(pick[i][0] for i in nxt))
            for i in large + nxt:
                free[i].remove(pick[i][0])
            side = 1 - side
        seq = [v for b in blocks for v in sorted(b)]
        paths.append(validate_path(H, seq, ell))
    uncovered = tuple(sorted(v for pool in free for v in pool))
    if dd > eps:
        path_bound = 2 * k / float((dd - eps) * eps)
    else:
        path_bound = float("inf")
    return CoverResult(tuple(paths), uncovered, hyp, path_bound, float(2 * k * eps * m))
