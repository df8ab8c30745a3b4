"""End-to-end search for a Hamiltonian ell-cycle by absorbing, reserving,
path-tiling and connecting, with an exact-search fallback and an
extremality check when everything fails."""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Literal

from .absorb import absorbs_check, find_absorber
from .connect import ConnectRequest, ReservoirError, connect_all, reservoir_select
from .gen import EXHAUSTIVE_CAP, ExtremalityVerdict, extremality_check
from .hgraph import Hypergraph, InvalidQueryError
from .solver import DEFAULT_NODE_BUDGET, hamiltonian_cycle
from .walks import EllWalk, WalkError, ends, validate_cycle, validate_path

EXIT_CODES = {"cycle": 0, "timeout": 2, "extremal": 3, "failure": 4}
TARGET_TRIES = 4
STAGE_SHARES = {"absorbing": 0.2, "tiling": 0.5, "connecting": 0.1, "absorption": 0.2}


@dataclass
class PipelineParams:
    budget_nodes: int = DEFAULT_NODE_BUDGET
    budget_secs: float | None = None
    absorbers: int = 1
    reservoir_epsilon: float = 0.3
    eta: float = 0.5
    xi: float = 0.1
    absorb_cap: int = 20
    seed: int = 0
    fallback: bool = True
    extremality_mode: Literal["auto", "exhaustive", "local-search"] = "auto"


@dataclass
class StageRecord:
    stage: str
    status: Literal["ok", "failed", "skipped"]
    seconds: float
    detail: dict = field(default_factory=dict)

    def record(self) -> dict:
        return {"stage": self.stage, "status": self.status,
                "seconds": round(self.seconds, 4), **self.detail}


@dataclass
class PipelineResult:
    status: Literal["cycle", "extremal", "failure", "timeout"]
    cycle: EllWalk | None
    witness: ExtremalityVerdict | None
    trace: list[StageRecord]
    via: str | None = None         # "stages" or "solver" when a cycle was found

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def record(self) -> dict:
        return {"status": self.status, "exit_code": self.exit_code, "via": self.via,
                "cycle": list(self.cycle.seq) if self.cycle else None,
                "witness": self.witness.record() if self.witness else None,
                "trace": [s.record() for s in self.trace]}


class _StageFailed(Exception):
    def __init__(self, stage: str, reason: str, **detail):
        super().__init__(f"{stage}: {reason}")
        self.stage, self.reason, self.detail = stage, reason, detail


def _greedy_paths(H: Hypergraph, ell: int, pool: set[int], budget: int
                  ) -> tuple[list[EllWalk], set[int], int]:
    """Repeatedly start at the lexicographically least edge inside ``pool`` and
    extend the path for as long as some edge continues it."""
    k = H.k
    nodes = 0
    paths = []
    pool = set(pool)
    while True:
        start = None
        for e in itertools.combinations(sorted(pool), k):
            nodes += 1
            if nodes > budget:
                return paths, pool, nodes
            if H.has_edge(e):
                start = e
                break
        if start is None:
            return paths, pool, nodes
        seq = list(start)
        pool -= set(start)
        while True:
            last = tuple(seq[-ell:])
            options = H.neighborhood(last, within=pool)
            nodes += 1
            nxt = min(options) if options else None
            if nxt is None or nodes > budget:
                break
            seq.extend(sorted(nxt))
            pool -= set(nxt)
        paths.append(validate_path(H, seq, ell))


def _absorbing_path(H: Hypergraph, ell: int, p: PipelineParams, budget: int) -> tuple[EllWalk, dict]:
    k, n = H.k, H.n
    if n < 3 * k - 2 * ell + (k - ell):
        raise _StageFailed("absorbing", "too few vertices for an absorber and its target")
    used: set[int] = set()
    pieces: list[EllWalk] = []
    targets = []
    per = max(1, budget // max(1, p.absorbers))
    for _ in range(p.absorbers):
        free = [v for v in range(n) if v not in used]
        found = None
        for S in itertools.islice(itertools.combinations(free, k - ell), TARGET_TRIES):
            A = find_absorber(H, S, forbidden=used, ell=ell, node_budget=per // TARGET_TRIES)
            if A is not None:
                found = A
                break
        if found is None:
            break
        pieces.append(found.P)
        targets.append(list(found.S))
        used |= found.P.vertices
    if not pieces:
        raise _StageFailed("absorbing", "no absorber found")
    if len(pieces) == 1:
        return pieces[0], {"absorbers": 1, "targets": targets}
    pairs = [(ends(a).tail, ends(b).head) for a, b in zip(pieces, pieces[1:])]
    R = [v for v in range(n) if v not in used]
    out = connect_all(H, ConnectRequest.make(pairs, R, p.eta), node_budget=budget)
    if not out.ok:
        raise _StageFailed("absorbing", "could not chain absorbers",
                           failure=out.failure.stage)
    seq = list(pieces[0].seq)
    for T, nxt in zip(out.paths, pieces[1:]):
        seq += list(T.seq[ell:]) + list(nxt.seq[ell:])
    return validate_path(H, seq, ell), {"absorbers": len(pieces), "targets": targets}


def _close_cycle(H: Hypergraph, ell: int, walks: list[EllWalk], links: list[EllWalk]) -> list[int]:
    seq: list[int] = []
    for w, T in zip(walks, links):
        seq += list(w.seq[:-ell]) + list(T.seq[:-ell])
    return seq


def pipeline(H: Hypergraph, ell: int, params: PipelineParams | None = None) -> PipelineResult:
    """Try the staged construction; on any stage failure fall back to exact
    search, then to the extremality test."""
    p = params or PipelineParams()
    n, k = H.n, H.k
    if not (1 <= ell and 2 * ell < k):
        raise InvalidQueryError(f"need 1 <= ell < k/2, got k={k}, ell={ell}")
    if n % (k - ell):
        raise InvalidQueryError(f"k-ell={k - ell} does not divide n={n}")
    t_start = time.perf_counter()
    trace: list[StageRecord] = []
    share = {s: max(1, int(p.budget_nodes * f)) for s, f in STAGE_SHARES.items()}

    def out_of_time() -> bool:
        return p.budget_secs is not None and time.perf_counter() - t_start > p.budget_secs

    def run(stage: str, fn):
        t0 = time.perf_counter()
        if out_of_time():
            raise _StageFailed(stage, "time budget spent")
        try:
            value, detail = fn()
        except _StageFailed as exc:
            trace.append(StageRecord(stage, "failed", time.perf_counter() - t0,
                                     {"reason": exc.reason, **exc.detail}))
            raise
        trace.append(StageRecord(stage, "ok", time.perf_counter() - t0, detail))
        return value

    try:
        A = run("absorbing", lambda: _absorbing_path(H, ell, p, share["absorbing"]))

        def reserve():
            rest = [v for v in range(n) if v not in A.vertices]
            try:
                res = reservoir_select(H, p.reservoir_epsilon, p.eta, 1, seed=p.seed, pool=rest)
                return set(res.R), {"size": len(res.R), "attempts": res.attempts, "fallback": False}
            except ReservoirError as exc:
                return set(rest), {"size": len(rest), "fallback": True, "reason": str(exc)}
        R = run("reservoir", reserve)

        def tile():
            pool = set(range(n)) - A.vertices - R
            paths, left, nodes = _greedy_paths(H, ell, pool, share["tiling"])
            return (paths, left), {"paths": len(paths), "left": len(left), "nodes": nodes}
        paths, left = run("tiling", tile)

        def connect():
            walks = [A] + paths
            pairs = [(ends(a).tail, ends(b).head) for a, b in zip(walks, walks[1:] + walks[:1])]
            out = connect_all(H, ConnectRequest.make(pairs, sorted(R), p.eta),
                              node_budget=share["connecting"])
            if not out.ok:
                raise _StageFailed("connecting", "no connection", pair=out.failure.pair_index,
                                   failed_stage=out.failure.stage, detail=out.failure.detail)
            return out.paths, {"connections": len(out.paths), "nodes": out.nodes}
        links = run("connecting", connect)

        def absorb():
            covered = set().union(*(w.vertices for w in [A] + paths + links))
            U = sorted(set(range(n)) - covered)
            if len(A.seq) + len(U) > p.absorb_cap:
                raise _StageFailed("absorption", "leftover too large", leftover=len(U))
            A2 = absorbs_check(H, A, U, cap=p.absorb_cap, node_budget=share["absorption"])
            if A2 is None:
                raise _StageFailed("absorption", "absorbing path cannot take the leftover",
                                   leftover=len(U))
            seq = _close_cycle(H, ell, [A2] + paths, links)
            return validate_cycle(H, seq, ell), {"leftover": len(U)}
        C = run("absorption", absorb)
        if len(C.vertices) != n:
            raise _StageFailed("absorption", "cycle does not span")
        return PipelineResult("cycle", C, None, trace, via="stages")
    except (_StageFailed, WalkError) as exc:
        if isinstance(exc, WalkError):
            trace.append(StageRecord("assembly", "failed", 0.0, {"reason": str(exc)}))
    return _fallback(H, ell, p, trace, t_start)


def _fallback(H, ell, p: PipelineParams, trace, t_start) -> PipelineResult:
    outcome = "skipped"
    if p.fallback:
        t0 = time.perf_counter()
        left = None if p.budget_secs is None else max(0.0, p.budget_secs - (t0 - t_start))
        C, stats = hamiltonian_cycle(H, ell, node_budget=p.budget_nodes, time_budget=left)
        outcome = stats.outcome
        trace.append(StageRecord("solver", "ok" if C else "failed", time.perf_counter() - t0,
                                 {"outcome": stats.outcome, "nodes": stats.nodes}))
        if C is not None:
            return PipelineResult("cycle", C, None, trace, via="solver")
    t0 = time.perf_counter()
    mode = p.extremality_mode
    if mode == "auto":
        mode = "exhaustive" if H.n <= EXHAUSTIVE_CAP else "local-search"
    verdict = extremality_check(H, ell, p.xi, mode=mode, seed=p.seed)
    trace.append(StageRecord("extremality", "ok" if verdict.extremal == "yes" else "failed",
                             time.perf_counter() - t0, {"verdict": verdict.extremal,
                                                        "mode": verdict.mode}))
    if verdict.extremal == "yes":
        return PipelineResult("extremal", None, verdict, trace)
    return PipelineResult("timeout" if outcome == "timeout" else "failure", None, verdict, trace)
