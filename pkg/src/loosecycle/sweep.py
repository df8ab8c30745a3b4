"""Threshold sweeps: seeded random instances at prescribed (k-2)-degree, solved exactly."""
from __future__ import annotations

import csv
import io
import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .gen import as_fraction, extremal_example, random_mindeg
from .hgraph import complete
from .solver import DEFAULT_NODE_BUDGET, hamiltonian_cycle

CSV_HEADER = ["n", "k", "ell", "delta_fraction", "seed", "hamiltonian", "nodes", "millis"]
SWEEP_CAP = 40
CONTROLS = ("control:complete", "control:extremal")


def threshold(k: int, ell: int) -> Fraction:
    """Degree constant ``(4(k-ell) - 1) / (4(k-ell)^2)`` against which sweeps are read."""
    return Fraction(4 * (k - ell) - 1, 4 * (k - ell) ** 2)


@dataclass(frozen=True)
class SweepRow:
    n: int
    k: int
    ell: int
    delta_fraction: str
    seed: int
    hamiltonian: str        # "true", "false", or "unknown" when the budget ran out
    nodes: int
    millis: str             # blank unless timing was requested

    def as_list(self) -> list:
        return [self.n, self.k, self.ell, self.delta_fraction, self.seed, self.hamiltonian,
                self.nodes, self.millis]


@dataclass(frozen=True)
class Skipped:
    n: int
    k: int
    ell: int
    reason: str


@dataclass(frozen=True)
class _Job:
    n: int
    k: int
    ell: int
    delta: str
    seed: int
    p: float
    budget: int
    timing: bool


def _run(job: _Job) -> SweepRow:
    t0 = time.perf_counter()
    if job.delta == "control:complete":
        H = complete(job.n, job.k)
    elif job.delta == "control:extremal":
        H = extremal_example(job.n, job.k, job.ell)
    else:
        H = random_mindeg(job.n, job.k, job.ell, job.delta, seed=job.seed, p=job.p).H
    C, stats = hamiltonian_cycle(H, job.ell, node_budget=job.budget)
    ham = {"found": "true", "exhausted": "false"}.get(stats.outcome, "unknown")
    millis = f"{(time.perf_counter() - t0) * 1000:.1f}" if job.timing else ""
    return SweepRow(job.n, job.k, job.ell, job.delta, job.seed, ham, stats.nodes, millis)


def _cell_problem(n: int, k: int, ell: int, cap: int) -> str | None:
    if not (1 <= ell and 2 * ell < k):
        return "not-loose"
    if n % (k - ell):
        return "indivisible"
    if n < 2 * (k - ell):
        return "too-small"
    if n > cap:
        return "over-cap"
    return None


def plan(ns: Iterable[int], ks: Iterable[int], ells: Iterable[int], deltas: Sequence,
         seeds: Sequence[int], p: float = 0.05, budget: int = DEFAULT_NODE_BUDGET,
         controls: bool = True, timing: bool = False, cap: int = SWEEP_CAP
         ) -> tuple[list[_Job], list[Skipped]]:
    jobs, skipped = [], []
    deltas = [str(as_fraction(d)) for d in deltas]
    for n, k, ell in itertools.product(ns, ks, ells):
        why = _cell_problem(n, k, ell, cap)
        if why:
            skipped.append(Skipped(n, k, ell, why))
            continue
        cells = deltas + (list(CONTROLS) if controls else [])
        for d, s in itertools.product(cells, seeds):
            jobs.append(_Job(n, k, ell, d, s, p, budget, timing))
    return jobs, skipped


def sweep(ns, ks, ells, deltas, seeds, p: float = 0.05, budget: int = DEFAULT_NODE_BUDGET,
          workers: int = 1, controls: bool = True, timing: bool = False,
          cap: int = SWEEP_CAP) -> tuple[list[SweepRow], list[Skipped]]:
    """Rows come back in plan order whatever the worker count."""
    jobs, skipped = plan(ns, ks, ells, deltas, seeds, p, budget, controls, timing, cap)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_run, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_run(j) for j in jobs]
    return rows, skipped


def to_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.as_list())
    return buf.getvalue()


def summary(rows: Iterable[SweepRow]) -> list[dict]:
    """Exact Hamiltonian fraction per (n, k, ell, delta), over decided instances."""
    groups: dict[tuple, list[SweepRow]] = {}
    for r in rows:
        groups.setdefault((r.n, r.k, r.ell, r.delta_fraction), []).append(r)
    out = []
    for (n, k, ell, d), rs in groups.items():
        yes = sum(r.hamiltonian == "true" for r in rs)
        no = sum(r.hamiltonian == "false" for r in rs)
        decided = yes + no
        out.append({"n": n, "k": k, "ell": ell, "delta_fraction": d, "instances": len(rs),
                    "hamiltonian": yes, "unknown": len(rs) - decided,
                    "fraction": Fraction(yes, decided) if decided else None,
                    "threshold": threshold(k, ell)})
    return out


def summary_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "k", "ell", "delta_fraction", "instances", "hamiltonian", "unknown",
                "fraction", "threshold"])
    for s in summary(rows):
        frac = "" if s["fraction"] is None else f"{float(s['fraction']):.4f}"
        w.writerow([s["n"], s["k"], s["ell"], s["delta_fraction"], s["instances"],
                    s["hamiltonian"], s["unknown"], frac,
                    f"{s['threshold']} ({float(s['threshold']):.4f})"])
    return buf.getvalue()
