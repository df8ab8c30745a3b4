"""k-uniform hypergraphs on the vertex set ``0..n-1``.

Edges are stored as sorted tuples.  Two flavours share one interface:
:class:`Hypergraph` holds an explicit edge set, :class:`ImplicitHypergraph`
answers membership through a predicate and is used for instances far too
large to enumerate (complete hypergraphs on hundreds of vertices).
"""
from __future__ import annotations

import itertools
import json
from collections import Counter
from functools import cached_property
from math import comb
from pathlib import Path
from typing import Callable, Iterable, Iterator

import numpy as np

Edge = tuple[int, ...]
VertexSet = tuple[int, ...]

# enumerate implicit hypergraphs only below this many candidate k-sets
MATERIALIZE_LIMIT = 3_000_000


class HypergraphError(ValueError):
    pass


class InvalidQueryError(HypergraphError):
    pass


class ParseError(HypergraphError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


def vertex_set(members: Iterable[int], n: int | None = None) -> VertexSet:
    """Sorted, duplicate-free tuple; raises on repeats or ids outside ``[0, n)``."""
    out = tuple(sorted(int(v) for v in members))
    for a, b in zip(out, out[1:]):
        if a == b:
            raise InvalidQueryError(f"vertex {a} repeated in {out}")
    if out and (out[0] < 0 or (n is not None and out[-1] >= n)):
        raise InvalidQueryError(f"vertex set {out} not inside [0, {n})")
    return out


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class Hypergraph:
    """A k-uniform hypergraph with an explicit, canonical edge set.

    Values are immutable after construction; the lazily built indices are
    pure caches.
    """

    explicit = True

    def __init__(self, n: int, k: int, edges: Iterable[Iterable[int]] = ()):
        if k < 2:
            raise HypergraphError(f"uniformity k={k} must be at least 2")
        if n < 0:
            raise HypergraphError(f"vertex count n={n} is negative")
        self.n = int(n)
        self.k = int(k)
        canon = set()
        for e in edges:
            t = tuple(sorted(e))
            if len(t) != k or len(set(t)) != k:
                raise HypergraphError(f"edge {t} does not have {k} distinct vertices")
            if t[0] < 0 or t[-1] >= n:
                raise HypergraphError(f"edge {t} has a vertex outside [0, {n})")
            canon.add(t)
        self._edges = frozenset(canon)

    # -- basic container protocol -------------------------------------------------

    @property
    def edges(self) -> frozenset[Edge]:
        return self._edges

    @cached_property
    def sorted_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.sorted_edges)

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def num_edges(self) -> int:
        return len(self)

    def has_edge(self, e: Iterable[int]) -> bool:
        return tuple(sorted(e)) in self._edges

    def __contains__(self, e) -> bool:
        return self.has_edge(e)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.n, self.k) == (other.n, other.k) and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.k, self.edges))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, k={self.k}, edges={len(self)})"

    @property
    def vertices(self) -> range:
        return range(self.n)

    def materialize(self) -> "Hypergraph":
        return self

    # -- indices -------------------------------------------------------------------

    @cached_property
    def _incident(self) -> list[list[Edge]]:
        inc: list[list[Edge]] = [[] for _ in range(self.n)]
        for e in self.sorted_edges:
            for v in e:
                inc[v].append(e)
        return inc

    def incident(self, v: int) -> list[Edge]:
        """Edges containing ``v``, in lexicographic order."""
        return self._incident[v]

    @cached_property
    def _link_index(self) -> dict[tuple[int, ...], frozenset[tuple[int, int]]]:
        idx: dict[tuple[int, ...], set] = {}
        for e in self.edges:
            for pair in itertools.combinations(e, 2):
                rest = tuple(v for v in e if v not in pair)
                idx.setdefault(rest, set()).add(pair)
        return {K: frozenset(p) for K, p in idx.items()}

    def link(self, K: Iterable[int]) -> frozenset[tuple[int, int]]:
        """Pairs completing the (k-2)-set ``K`` to an edge."""
        K = vertex_set(K, self.n)
        if len(K) != self.k - 2:
            raise InvalidQueryError(f"link needs a {self.k - 2}-set, got {K}")
        return self._link_index.get(K, frozenset())

    @cached_property
    def edge_masks(self) -> np.ndarray:
        """Edges as uint64 bitmasks (lexicographic order); needs ``n <= 64``."""
        if self.n > 64:
            raise HypergraphError("bitmask view needs n <= 64")
        return np.array([mask_of(e) for e in self.sorted_edges], dtype=np.uint64)

    @cached_property
    def incidence_masks(self) -> list[np.ndarray]:
        if self.n > 64:
            raise HypergraphError("bitmask view needs n <= 64")
        return [np.array([mask_of(e) for e in self.incident(v)], dtype=np.uint64)
                for v in range(self.n)]

    # -- queries -------------------------------------------------------------------

    def _check_query(self, S: Iterable[int]) -> VertexSet:
        S = vertex_set(S, self.n)
        if len(S) > self.k:
            raise InvalidQueryError(f"|S|={len(S)} exceeds k={self.k}")
        return S

    def _edges_containing(self, S: VertexSet) -> Iterable[Edge]:
        if not S:
            return self.sorted_edges
        pivot = min(S, key=lambda v: len(self._incident[v]))
        Sset = set(S)
        return (e for e in self._incident[pivot] if Sset.issubset(e))

    def degree(self, S: Iterable[int]) -> int:
        """Number of edges containing ``S`` (0/1 membership when ``|S| = k``)."""
        S = self._check_query(S)
        if len(S) == self.k:
            return int(self.has_edge(S))
        return sum(1 for _ in self._edges_containing(S))

    def neighborhood(self, S: Iterable[int], within: Iterable[int] | None = None) -> list[VertexSet]:
        """The (k-|S|)-sets ``T`` with ``S ∪ T`` an edge, optionally ``T ⊆ within``."""
        S = self._check_query(S)
        Sset = set(S)
        pool = None if within is None else set(within) - Sset
        out = []
        for e in self._edges_containing(S):
            T = tuple(v for v in e if v not in Sset)
            if pool is None or pool.issuperset(T):
                out.append(T)
        return out

    def min_degree(self, s: int) -> int:
        """Minimum s-degree; ``s = 0`` gives the edge count."""
        if s < 0 or s > self.k or s > self.n:
            raise InvalidQueryError(f"s={s} outside [0, min(k, n)]")
        if s == 0:
            return len(self)
        counts: Counter = Counter()
        for e in self.edges:
            counts.update(itertools.combinations(e, s))
        if len(counts) < comb(self.n, s):
            return 0
        return min(counts.values())

    def induced(self, B: Iterable[int]) -> "Hypergraph":
        """Sub-hypergraph on ``B``, relabelled ``0..|B|-1`` in increasing order."""
        B = vertex_set(B, self.n)
        relabel = {v: i for i, v in enumerate(B)}
        return Hypergraph(len(B), self.k,
                          (tuple(relabel[v] for v in e) for e in self.edges
                           if all(v in relabel for v in e)))

    def count_inside(self, B: Iterable[int]) -> int:
        """e(B): edges with all vertices in ``B``."""
        Bset = set(B)
        return sum(1 for e in self.edges if Bset.issuperset(e))


class ImplicitHypergraph(Hypergraph):
    """Hypergraph given by a membership predicate on sorted k-tuples.

    Queries restricted to a vertex pool cost ``C(|pool|, k-|S|)`` predicate
    calls; the full edge set is only enumerated on demand and refused above
    :data:`MATERIALIZE_LIMIT` candidate sets.
    """

    explicit = False

    def __init__(self, n: int, k: int, predicate: Callable[[Edge], bool],
                 degree_fn: Callable[[VertexSet], int] | None = None,
                 name: str = "implicit"):
        if k < 2:
            raise HypergraphError(f"uniformity k={k} must be at least 2")
        self.n = int(n)
        self.k = int(k)
        self._predicate = predicate
        self._degree_fn = degree_fn
        self.name = name

    def __repr__(self) -> str:
        return f"ImplicitHypergraph({self.name}, n={self.n}, k={self.k})"

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return id(self)

    @cached_property
    def _edges(self) -> frozenset[Edge]:
        if comb(self.n, self.k) > MATERIALIZE_LIMIT:
            raise HypergraphError(f"refusing to enumerate C({self.n},{self.k}) candidate edges")
        return frozenset(e for e in itertools.combinations(range(self.n), self.k)
                         if self._predicate(e))

    def materialize(self) -> Hypergraph:
        return Hypergraph(self.n, self.k, self.edges)

    def has_edge(self, e: Iterable[int]) -> bool:
        t = tuple(sorted(e))
        if len(t) != self.k or len(set(t)) != self.k or t[0] < 0 or t[-1] >= self.n:
            return False
        return bool(self._predicate(t))

    def degree(self, S: Iterable[int]) -> int:
        S = self._check_query(S)
        if len(S) == self.k:
            return int(self.has_edge(S))
        if self._degree_fn is not None:
            return self._degree_fn(S)
        return len(self.neighborhood(S))

    def neighborhood(self, S: Iterable[int], within: Iterable[int] | None = None) -> list[VertexSet]:
        S = self._check_query(S)
        Sset = set(S)
        pool = sorted((set(range(self.n)) if within is None else set(within)) - Sset)
        out = []
        for T in itertools.combinations(pool, self.k - len(S)):
            if self._predicate(tuple(sorted(S + T))):
                out.append(T)
        return out

    def min_degree(self, s: int) -> int:
        if s < 0 or s > self.k or s > self.n:
            raise InvalidQueryError(f"s={s} outside [0, min(k, n)]")
        if self._degree_fn is not None:
            return min((self._degree_fn(S) for S in itertools.combinations(range(self.n), s)),
                       default=0)
        return super().min_degree(s)

    def link(self, K: Iterable[int]) -> frozenset[tuple[int, int]]:
        K = vertex_set(K, self.n)
        if len(K) != self.k - 2:
            raise InvalidQueryError(f"link needs a {self.k - 2}-set, got {K}")
        return frozenset(self.neighborhood(K))

    def induced(self, B: Iterable[int]) -> "ImplicitHypergraph":
        B = vertex_set(B, self.n)
        pred = self._predicate
        return ImplicitHypergraph(len(B), self.k, lambda e: pred(tuple(B[i] for i in e)),
                                  name=f"{self.name}[induced]")

    def count_inside(self, B: Iterable[int]) -> int:
        return sum(1 for e in itertools.combinations(sorted(B), self.k) if self._predicate(e))


def complete(n: int, k: int, implicit: bool | None = None) -> Hypergraph:
    """The complete k-uniform hypergraph on ``n`` vertices."""
    if implicit is None:
        implicit = comb(n, k) > 200_000
    if implicit:
        return ImplicitHypergraph(n, k, lambda e: True,
                                  degree_fn=lambda S: comb(n - len(S), k - len(S)),
                                  name="complete")
    return Hypergraph(n, k, itertools.combinations(range(n), k))


def empty(n: int, k: int) -> Hypergraph:
    return Hypergraph(n, k, ())


# -- .khg text format ------------------------------------------------------------


def parse_khg(text: str) -> Hypergraph:
    """Parse the ``.khg`` format: header ``k n``, ``#`` comments, one edge per line."""
    header = None
    edges: list[Edge] = []
    seen: dict[Edge, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            nums = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"non-integer token in {line!r}", lineno) from None
        if header is None:
            if len(nums) != 2:
                raise ParseError("header must be 'k n'", lineno)
            k, n = nums
            if k < 2 or n < 0:
                raise ParseError(f"bad header k={k} n={n}", lineno)
            header = (k, n)
            continue
        k, n = header
        if len(nums) != k:
            raise ParseError(f"edge has {len(nums)} vertices, expected {k}", lineno)
        for a, b in zip(nums, nums[1:]):
            if a == b:
                raise ParseError(f"duplicate vertex {a} in edge", lineno)
            if a > b:
                raise ParseError("edge vertices must be strictly increasing", lineno)
        if nums[0] < 0 or nums[-1] >= n:
            raise ParseError(f"vertex id outside [0, {n})", lineno)
        e = tuple(nums)
        if e in seen:
            raise ParseError(f"duplicate edge {e} (first on line {seen[e]})", lineno)
        seen[e] = lineno
        edges.append(e)
    if header is None:
        raise ParseError("missing 'k n' header")
    return Hypergraph(header[1], header[0], edges)


def format_khg(H: Hypergraph, comment: str | None = None) -> str:
    lines = [f"{H.k} {H.n}"]
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.extend(" ".join(map(str, e)) for e in H)
    return "\n".join(lines) + "\n"


def read_khg(path: str | Path) -> Hypergraph:
    return parse_khg(Path(path).read_text())


def write_khg(H: Hypergraph, path: str | Path, comment: str | None = None) -> None:
    Path(path).write_text(format_khg(H, comment))


def to_json(H: Hypergraph) -> str:
    return json.dumps({"n": H.n, "k": H.k, "edges": [list(e) for e in H]})


def from_json(text: str) -> Hypergraph:
    data = json.loads(text)
    return Hypergraph(data["n"], data["k"], data["edges"])


def khg_or_json(text: str) -> Hypergraph:
    return from_json(text) if text.lstrip().startswith("{") else parse_khg(text)

