"""ℓ-paths and ℓ-cycles as ordered vertex sequences.

An ℓ-path with ``m`` edges on ``k + (m-1)(k-ℓ)`` vertices has its edges at
the windows starting at ``0, k-ℓ, 2(k-ℓ), ...``; an ℓ-cycle uses the same
windows read cyclically on ``m(k-ℓ)`` vertices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

from .hgraph import Hypergraph, VertexSet


class WalkError(ValueError):
    pass


class ArityError(WalkError):
    pass


class MissingEdgeError(WalkError):
    def __init__(self, window: int, edge: tuple[int, ...]):
        self.window = window
        self.edge = edge
        super().__init__(f"window {window} {edge} is not an edge")


@dataclass(frozen=True)
class WalkEnds:
    head: VertexSet
    tail: VertexSet


@dataclass(frozen=True)
class EllWalk:
    seq: tuple[int, ...]
    ell: int
    kind: Literal["path", "cycle"]
    k: int

    @property
    def size(self) -> int:
        """Number of edges."""
        step = self.k - self.ell
        if self.kind == "cycle":
            return len(self.seq) // step
        return (len(self.seq) - self.k) // step + 1

    @property
    def edges(self) -> list[tuple[int, ...]]:
        return [tuple(sorted(w)) for w in windows(self.seq, self.k, self.ell, self.kind)]

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.seq)

    def reversed(self) -> "EllWalk":
        if self.kind == "path":
            return EllWalk(self.seq[::-1], self.ell, "path", self.k)
        # keep window alignment: the reversed cycle must start at a window boundary
        rev = self.seq[::-1]
        shift = (len(rev) - self.k) % len(rev)
        return EllWalk(rev[shift:] + rev[:shift], self.ell, "cycle", self.k)

    def rotated(self, steps: int = 1) -> "EllWalk":
        if self.kind != "cycle":
            raise WalkError("only cycles rotate")
        s = (steps * (self.k - self.ell)) % len(self.seq)
        return EllWalk(self.seq[s:] + self.seq[:s], self.ell, "cycle", self.k)

    def to_line(self) -> str:
        return " ".join([self.kind, str(self.ell), *map(str, self.seq)])


def windows(seq: Sequence[int], k: int, ell: int, kind: str) -> list[tuple[int, ...]]:
    step = k - ell
    n = len(seq)
    if kind == "cycle":
        return [tuple(seq[(j * step + i) % n] for i in range(k)) for j in range(n // step)]
    return [tuple(seq[j * step: j * step + k]) for j in range((n - k) // step + 1)]


def _check_common(H: Hypergraph, seq: Sequence[int], ell: int) -> tuple[int, ...]:
    seq = tuple(int(v) for v in seq)
    if not 1 <= ell < H.k:
        raise WalkError(f"ell={ell} outside [1, k-1] for k={H.k}")
    if len(set(seq)) != len(seq):
        raise WalkError("vertex sequence repeats a vertex")
    if any(v < 0 or v >= H.n for v in seq):
        raise WalkError(f"vertex outside [0, {H.n})")
    return seq


def validate_path(H: Hypergraph, seq: Sequence[int], ell: int) -> EllWalk:
    """Return the ℓ-path realised by ``seq``; raise on arity or a missing window edge."""
    seq = _check_common(H, seq, ell)
    k, step = H.k, H.k - ell
    if len(seq) < k or (len(seq) - k) % step:
        raise ArityError(f"|seq|={len(seq)} is not k+(m-1)(k-ell) for k={k}, ell={ell}")
    for j, w in enumerate(windows(seq, k, ell, "path")):
        if not H.has_edge(w):
            raise MissingEdgeError(j, tuple(sorted(w)))
    return EllWalk(seq, ell, "path", k)


def validate_cycle(H: Hypergraph, seq: Sequence[int], ell: int) -> EllWalk:
    """Return the ℓ-cycle realised by ``seq`` read cyclically."""
    seq = _check_common(H, seq, ell)
    k, step = H.k, H.k - ell
    if len(seq) % step:
        raise ArityError(f"k-ell={step} does not divide |seq|={len(seq)}")
    if len(seq) // step < 2 or len(seq) < k:
        raise ArityError(f"a cycle needs at least two edges and k={k} vertices")
    for j, w in enumerate(windows(seq, k, ell, "cycle")):
        if not H.has_edge(w):
            raise MissingEdgeError(j, tuple(sorted(w)))
    return EllWalk(seq, ell, "cycle", k)


def validate(H: Hypergraph, kind: str, seq: Sequence[int], ell: int) -> EllWalk:
    if kind == "path":
        return validate_path(H, seq, ell)
    if kind == "cycle":
        return validate_cycle(H, seq, ell)
    raise WalkError(f"unknown walk kind {kind!r}")


def ends(w: EllWalk) -> WalkEnds:
    if w.kind != "path":
        raise WalkError("ends are defined for paths only")
    return WalkEnds(tuple(sorted(w.seq[:w.ell])), tuple(sorted(w.seq[-w.ell:])))


def parse_walk_line(line: str) -> tuple[str, int, tuple[int, ...]]:
    toks = line.split()
    if len(toks) < 3 or toks[0] not in ("path", "cycle"):
        raise WalkError(f"walk line must be 'path|cycle ell v0 v1 ...', got {line!r}")
    try:
        return toks[0], int(toks[1]), tuple(int(t) for t in toks[2:])
    except ValueError:
        raise WalkError(f"non-integer token in {line!r}") from None


def format_walks(walks: Iterable[EllWalk]) -> str:
    return "".join(w.to_line() + "\n" for w in walks)
