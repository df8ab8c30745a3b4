"""Command-line entry point: ``loosecycle <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import absorb, connect, gen, regular, solver, sweep as sweep_mod, tiling
from .hgraph import (Hypergraph, HypergraphError, ParseError, complete, format_khg, khg_or_json,
                     to_json)
from .pipeline import PipelineParams, pipeline
from .walks import WalkError, format_walks, parse_walk_line, validate


def _vertex_list(text: str) -> list[int]:
    return [int(t) for t in text.replace(",", " ").split()]


def _parse_range(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if "-" in part.strip()[1:]:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        elif part.strip():
            out.append(int(part))
    return out


def _read_hypergraph(path: str) -> Hypergraph:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return khg_or_json(text)


def _emit_hypergraph(H: Hypergraph, fmt: str, out: str | None, comment: str | None = None):
    text = to_json(H) + "\n" if fmt == "json" else format_khg(H, comment)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _budget(args) -> int | None:
    return None if args.budget_nodes is not None and args.budget_nodes <= 0 else args.budget_nodes


# -- subcommands ---------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.kind == "complete":
        H = complete(args.n, args.k, implicit=False)
    elif args.kind == "extremal":
        H = gen.extremal_example(args.n, args.k, args.ell, implicit=False)
    elif args.kind == "cherry":
        H = gen.cherry(args.k, args.ell)
    else:
        inst = gen.random_mindeg(args.n, args.k, args.ell, args.delta, seed=args.seed, p=args.p)
        H = inst.H
        print(f"# target {inst.target} achieved {inst.achieved}", file=sys.stderr)
    _emit_hypergraph(H, args.format, args.out, f"{args.kind} n={H.n} k={H.k}")
    return 0


def cmd_degree(args) -> int:
    H = _read_hypergraph(args.input)
    if args.set:
        print(H.degree(_vertex_list(args.set)))
    else:
        print(H.min_degree(args.s))
    return 0


def cmd_solve(args) -> int:
    H = _read_hypergraph(args.input)
    C, st = solver.hamiltonian_cycle(H, args.ell, node_budget=_budget(args),
                                     time_budget=args.budget_secs)
    print(C.to_line() if C else "NONE")
    print(f"# outcome={st.outcome} nodes={st.nodes} seconds={st.elapsed:.3f}", file=sys.stderr)
    return {"found": 0, "exhausted": 1, "timeout": 2}[st.outcome]


def absorber_record(A: absorb.Absorber) -> dict:
    rec = {}
    for name in absorb.Absorber.__dataclass_fields__:
        val = getattr(A, name)
        rec[name] = list(val.seq) if hasattr(val, "seq") else (list(val) if isinstance(val, tuple) else val)
    return rec


def cmd_absorb(args) -> int:
    H = _read_hypergraph(args.input)
    A = absorb.find_absorber(H, _vertex_list(args.target), ell=args.ell,
                             node_budget=_budget(args))
    if A is None:
        print("NONE")
        return 1
    print(json.dumps(absorber_record(A)))
    return 0


def cmd_connect(args) -> int:
    H = _read_hypergraph(args.input)
    pairs = []
    for lineno, line in enumerate(Path(args.pairs).read_text().splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if ";" not in line:
            raise ParseError("pair line must be 'X;Y'", lineno)
        X, Y = line.split(";", 1)
        pairs.append((_vertex_list(X), _vertex_list(Y)))
    R = _vertex_list(Path(args.reservoir).read_text())
    out = connect.connect_all(H, connect.ConnectRequest.make(pairs, R, args.eta),
                              node_budget=_budget(args))
    sys.stdout.write(format_walks(out.paths))
    if not out.ok:
        f = out.failure
        print(f"FAILED pair={f.pair_index} stage={f.stage} {f.detail}")
        return 1
    return 0


def cmd_tile(args) -> int:
    R = _read_hypergraph(args.input)
    beta = Fraction(args.beta)
    if args.extremality is not None:
        w = tiling.fractional_extremality(R, args.ell, beta, args.extremality, mode=args.mode,
                                          seed=args.seed)
        if w is None:
            print("NONE" if args.mode == "binary" else "INCONCLUSIVE")
            return 1
        print(json.dumps({"b": [str(x) for x in w.b], "mass": w.mass,
                          "edge_mass": w.edge_mass, "mode": w.mode}))
        return 0
    res = tiling.max_tiling_lp(R, args.ell, beta, include_constant=args.include_constant)
    h = res.tiling
    moves = 0
    while args.improve and moves < args.improve:
        mv = tiling.improvement_moves(R, h)
        if mv is None:
            break
        h, moves = mv.tiling, moves + 1
    print(f"# fractional={res.fractional:.6f} rounded={res.rounded} "
          f"final={h.weight} moves={moves} columns={res.columns}", file=sys.stderr)
    text = h.to_text(R.n)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_regular(args) -> int:
    H = _read_hypergraph(args.input)
    P = regular.parse_partition(Path(args.partition).read_text(), H.n)
    Rh = regular.reduced(H, P, args.epsilon, args.d, mode=args.mode, seed=args.seed)
    for idx, v in Rh.annotations.items():
        print(f"# {' '.join(map(str, idx))} density={v.density} {v.status}", file=sys.stderr)
    _emit_hypergraph(Rh.R, args.format, args.out, f"reduced eps={args.epsilon} d={args.d}")
    if args.inherit is not None:
        rep = regular.inheritance_report(Rh, args.inherit, args.d, args.epsilon)
        print(f"# inheritance violators={rep.violators} allowed={rep.allowed:.3f} "
              f"pass={rep.passed}", file=sys.stderr)
        return 0 if rep.passed else 1
    return 0


def cmd_pipeline(args) -> int:
    H = _read_hypergraph(args.input)
    p = PipelineParams(budget_nodes=_budget(args) or solver.DEFAULT_NODE_BUDGET,
                       budget_secs=args.budget_secs, absorbers=args.absorbers,
                       reservoir_epsilon=args.reservoir_epsilon, eta=args.eta, xi=args.xi,
                       seed=args.seed)
    res = pipeline(H, args.ell, p)
    if args.format == "json":
        print(json.dumps(res.record()))
    else:
        if res.cycle is not None:
            print(res.cycle.to_line())
        elif res.witness is not None and res.status == "extremal":
            print("EXTREMAL " + " ".join(map(str, res.witness.witness)))
        else:
            print(res.status.upper())
        for s in res.trace:
            print("# " + json.dumps(s.record()), file=sys.stderr)
    return res.exit_code


def cmd_sweep(args) -> int:
    rows, skipped = sweep_mod.sweep(_parse_range(args.n), _parse_range(args.k),
                                    _parse_range(args.ell), args.delta.split(","),
                                    _parse_range(args.seeds), p=args.p,
                                    budget=_budget(args) or solver.DEFAULT_NODE_BUDGET,
                                    workers=args.workers, controls=not args.no_controls,
                                    timing=args.timing)
    text = sweep_mod.to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    summ = sweep_mod.summary_csv(rows)
    if args.summary:
        Path(args.summary).write_text(summ)
    else:
        sys.stderr.write(summ)
    for s in skipped:
        print(f"# skipped n={s.n} k={s.k} ell={s.ell}: {s.reason}", file=sys.stderr)
    return 0


def _validate_one(path: str, H: Hypergraph | None) -> str | None:
    """Error message for one file, or None when it passes."""
    p = Path(path)
    text = p.read_text()
    suffix = p.suffix
    try:
        if suffix in (".khg", ".json"):
            khg_or_json(text)
        elif suffix == ".walk":
            if H is None:
                return "walk files need --input"
            for lineno, line in enumerate(text.splitlines(), start=1):
                if not line.strip() or line.startswith("#"):
                    continue
                kind, ell, seq = parse_walk_line(line)
                try:
                    validate(H, kind, seq, ell)
                except WalkError as exc:
                    return f"line {lineno}: {exc}"
        elif suffix == ".tiling":
            if H is None:
                return "tiling files need --input"
            h, t = tiling.parse_tiling(text)
            if t != H.n:
                return f"tiling is on {t} vertices, hypergraph has {H.n}"
            rep = tiling.tiling_validate(H, h)
            if not rep.ok:
                return rep.violation
        elif suffix == ".part":
            if H is None:
                return "partition files need --input"
            regular.parse_partition(text, H.n)
        else:
            return f"unknown file type {suffix!r}"
    except ParseError as exc:
        return str(exc)
    except (HypergraphError, WalkError) as exc:
        return str(exc)
    return None


def cmd_validate(args) -> int:
    H = _read_hypergraph(args.input) if args.input else None
    bad = 0
    for f in args.files:
        err = _validate_one(f, H)
        print(f"{f}: {'ok' if err is None else 'FAIL ' + err}")
        bad += err is not None
    return 1 if bad else 0


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--budget-nodes", type=int, default=solver.DEFAULT_NODE_BUDGET,
                        help="search node budget (0 for unlimited)")
    common.add_argument("--budget-secs", type=float, default=None)
    common.add_argument("--format", choices=["khg", "json"], default="khg")

    ap = argparse.ArgumentParser(prog="loosecycle",
                                 description="Loose Hamiltonian cycles in uniform hypergraphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("gen", cmd_gen, "generate an instance")
    p.add_argument("--kind", choices=["complete", "extremal", "cherry", "random"], required=True)
    p.add_argument("--n", type=int, default=12)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--delta", default="0.5", help="(k-2)-degree fraction for --kind random")
    p.add_argument("--p", type=float, default=0.05)
    p.add_argument("--out")

    p = add("degree", cmd_degree, "minimum s-degree or degree of a set")
    p.add_argument("--input", required=True)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--set", help="comma-separated vertices")

    p = add("solve", cmd_solve, "exact Hamiltonian ell-cycle search")
    p.add_argument("--input", required=True)
    p.add_argument("--ell", type=int, required=True)

    p = add("absorb", cmd_absorb, "find an absorber for a target set")
    p.add_argument("--input", required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--target", required=True)

    p = add("connect", cmd_connect, "connect end-set pairs through a reservoir")
    p.add_argument("--input", required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--pairs", required=True, help="file with one 'X;Y' per line")
    p.add_argument("--reservoir", required=True, help="file listing reservoir vertices")
    p.add_argument("--eta", type=float, default=1.0)

    p = add("tile", cmd_tile, "maximum cherry tiling or fractional extremality")
    p.add_argument("--input", required=True, help="reduced hypergraph")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--beta", default="1/16")
    p.add_argument("--improve", type=int, default=0, help="apply up to this many local moves")
    p.add_argument("--include-constant", action="store_true")
    p.add_argument("--extremality", type=Fraction, default=None, metavar="XI")
    p.add_argument("--mode", choices=["binary", "continuous"], default="binary")
    p.add_argument("--out")

    p = add("regular", cmd_regular, "reduced hypergraph of a partition")
    p.add_argument("--input", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--epsilon", type=Fraction, default=Fraction(1, 10))
    p.add_argument("--d", type=Fraction, default=Fraction(1, 2))
    p.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    p.add_argument("--inherit", type=Fraction, default=None, metavar="C")
    p.add_argument("--out")

    p = add("pipeline", cmd_pipeline, "staged cycle construction with fallbacks")
    p.add_argument("--input", required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--xi", type=Fraction, default=Fraction(1, 10))
    p.add_argument("--eta", type=float, default=0.5)
    p.add_argument("--absorbers", type=int, default=1)
    p.add_argument("--reservoir-epsilon", type=float, default=0.3)

    p = add("sweep", cmd_sweep, "threshold sweep over random instances")
    p.add_argument("--n", required=True, help="e.g. 9,12 or 9-15")
    p.add_argument("--k", default="4")
    p.add_argument("--ell", default="1")
    p.add_argument("--delta", default="0,0.25,0.5,0.75,1")
    p.add_argument("--seeds", default="0-9")
    p.add_argument("--p", type=float, default=0.05)
    p.add_argument("--timing", action="store_true", help="fill the millis column")
    p.add_argument("--no-controls", action="store_true")
    p.add_argument("--out")
    p.add_argument("--summary")

    p = add("validate", cmd_validate, "check .khg/.json/.walk/.tiling/.part files")
    p.add_argument("files", nargs="+")
    p.add_argument("--input", help="hypergraph that walks, tilings and partitions refer to")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (HypergraphError, WalkError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
