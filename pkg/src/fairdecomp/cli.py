"""Command-line front end.

    fairdecomp gen --kind grid --w 30 --h 30 --out g.json
    fairdecomp estimate --graph g.json --algo randwts --R 5 --pairs edges --trials 3000 --seed 7 --out stats.csv
    fairdecomp oracle --n 2 --R 2 --phases 3
    fairdecomp repro gaussian --graph g.json --out fig2.json

Exit status is 0 on success, 2 on usage errors and 1 on runtime errors. All
inputs are loaded and checked before any output file is opened.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Optional

from .counterexamples import attach_stars, counterexample
from .decompositions import ALGORITHMS, LddConfig, RootPolicy, decompose, diameter_bound
from .embedding import euclidean_embed, l1_embed_from_ldd, measure_distortion
from .graph import Graph, GraphFormatError, gen_graph, load_graph, save_graph
from .stats import (
    estimate_separation,
    estimates_to_csv,
    exact_kpr_path_oracle,
    fairness_report,
    histogram,
    summarize_runs,
)

SEED_ENV = "FAIRDECOMP_SEED"
FIGURES = ("gaussian", "numclusters", "maxdiam")


class UsageError(Exception):
    pass


class RuntimeFailure(Exception):
    pass


# -- parser -------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=None, help=f"master seed (fallback: ${SEED_ENV}, then 0)")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", default=None, help="output format; choices depend on the subcommand")
    p.add_argument("--workers", type=int, default=1)
    return p


def _algo_flags(p: argparse.ArgumentParser, default_algo: str = "kpr"):
    p.add_argument("--graph", required=True)
    p.add_argument("--graph-format", choices=("auto", "json", "edge_list"), default="auto")
    p.add_argument("--algo", choices=ALGORITHMS, default=default_algo)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--phases", type=int, default=None)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--with-prefix", action="store_true", help="two_cuts: run one randwts phase first")
    p.add_argument("--roots", default="min_id",
                   help="min_id | random | adversarial (needs marks in the graph file) | comma-separated preference list")
    p.add_argument("--grid", type=int, nargs=2, metavar=("W", "H"), default=None,
                   help="grid shape for --algo grid_axis")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="fairdecomp", description="Randomized low-diameter decompositions.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a graph")
    g.add_argument("--kind", required=True, choices=("path", "grid", "star", "counterexample"))
    g.add_argument("--n", type=int)
    g.add_argument("--w", type=int)
    g.add_argument("--h", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--stars", type=int, nargs=3, metavar=("S0", "S1", "S2"), default=None,
                   help="counterexample: leaves hung off r0, r1, r2")

    d = sub.add_parser("decompose", parents=[common], help="sample one decomposition")
    _algo_flags(d)

    e = sub.add_parser("estimate", parents=[common], help="Monte Carlo separation probabilities")
    _algo_flags(e)
    e.add_argument("--pairs", default=None,
                   help="edges | all | random:K | 'u-v,u-v,...' | marked (default: edges, led by the marked pair if any)")
    e.add_argument("--trials", type=int, default=1000)
    e.add_argument("--confidence", type=float, default=0.95)
    e.add_argument("--hist", default=None, help="also write a histogram of p_hat as JSON")
    e.add_argument("--bin-width", type=float, default=0.01)

    s = sub.add_parser("summarize", parents=[common], help="cluster counts and diameters over many runs")
    _algo_flags(s)
    s.add_argument("--trials", type=int, default=200)

    m = sub.add_parser("embed", parents=[common], help="embed a graph and report distortion")
    m.add_argument("--graph", required=True)
    m.add_argument("--graph-format", choices=("auto", "json", "edge_list"), default="auto")
    m.add_argument("--kind", choices=("euclidean", "l1"), default="euclidean")
    m.add_argument("--algo", choices=ALGORITHMS, default="grid_axis", help="l1: the LDD being stacked")
    m.add_argument("--R", type=int, default=4)
    m.add_argument("--m", type=int, default=64, help="l1: partitions per unit of R")
    m.add_argument("--grid", type=int, nargs=2, metavar=("W", "H"), default=None)
    m.add_argument("--report", default=None, help="write the distortion report here (default: stderr)")

    o = sub.add_parser("oracle", parents=[common], help="exact KPR separation probabilities on a path")
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--R", type=int, required=True)
    o.add_argument("--phases", type=int, default=3)

    r = sub.add_parser("repro", parents=[common], help="data behind the empirical figures")
    r.add_argument("figure", help="|".join(FIGURES))
    r.add_argument("--graph", required=True)
    r.add_argument("--graph-format", choices=("auto", "json", "edge_list"), default="auto")
    r.add_argument("--R", type=int, default=5)
    r.add_argument("--runs", type=int, default=None, help="default 3000 for gaussian, 200 otherwise")
    r.add_argument("--algo", choices=ALGORITHMS, default="randwts", help="numclusters/maxdiam algorithm")
    r.add_argument("--bin-width", type=float, default=0.01)
    return ap


# -- helpers ------------------------------------------------------------------

def resolve_seed(seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _check_format(fmt: Optional[str], allowed: tuple[str, ...]) -> str:
    if fmt is None:
        return allowed[0]
    if fmt not in allowed:
        raise UsageError(f"--format must be one of {', '.join(allowed)} here, got {fmt!r}")
    return fmt


def _check_out(path: Optional[str]):
    if path is None:
        return
    parent = Path(path).resolve().parent
    if not parent.is_dir():
        raise RuntimeFailure(f"output directory does not exist: {parent}")


def _read_graph(path: str, fmt: str) -> tuple[Graph, Optional[dict]]:
    """Load a graph file; also return the raw JSON object when there is one (for marks)."""
    p = Path(path)
    if not p.is_file():
        raise RuntimeFailure(f"graph file not found: {path}")
    data = p.read_bytes()
    if fmt == "auto":
        fmt = "json" if data.lstrip()[:1] == b"{" else "edge_list"
    try:
        g = load_graph(data, fmt)
    except (GraphFormatError, ValueError, UnicodeDecodeError) as exc:
        raise RuntimeFailure(f"{path}: {exc}") from None
    raw = json.loads(data) if fmt == "json" else None
    return g, raw


def _root_policy(spec: str, g: Graph, raw: Optional[dict], path: str) -> RootPolicy:
    if spec == "min_id":
        return RootPolicy()
    if spec == "random":
        return RootPolicy("uniform_random")
    if spec == "adversarial":
        if not raw or "marks" not in raw:
            raise RuntimeFailure(f"--roots adversarial needs a marked graph (gen --kind counterexample); {path} has no marks")
        mk = raw["marks"]
        return RootPolicy.prefer(mk["r0"], mk["r1"], mk["r2"])
    try:
        pref = tuple(int(x) for x in spec.split(","))
    except ValueError:
        raise UsageError(f"--roots: expected min_id, random, adversarial or a vertex list, got {spec!r}") from None
    pol = RootPolicy.prefer(*pref)
    try:
        pol.validate(g)
    except ValueError as exc:
        raise UsageError(f"--roots: {exc}") from None
    return pol


def _config(args, g: Graph, raw: Optional[dict], seed: int) -> LddConfig:
    policy = _root_policy(args.roots, g, raw, args.graph)
    try:
        cfg = LddConfig(R=args.R, algorithm=args.algo, phases=args.phases, eps=args.eps,
                        with_prefix=args.with_prefix, alpha=args.alpha, root_policy=policy,
                        seed=seed, grid_shape=tuple(args.grid) if args.grid else None)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if cfg.algorithm == "grid_axis" and g.vertex_count != cfg.grid_shape[0] * cfg.grid_shape[1]:
        raise UsageError(f"--grid {cfg.grid_shape[0]} {cfg.grid_shape[1]} does not match n={g.vertex_count}")
    return cfg


def _parse_pairs(spec: Optional[str], raw: Optional[dict], g: Graph):
    if spec is None:
        edges = g.edges()
        if raw and "marks" in raw:
            uv = (raw["marks"]["u"], raw["marks"]["v"])
            return [uv] + [e for e in edges if e != uv]
        return "edges"
    if spec in ("edges", "all"):
        return spec
    if spec == "marked":
        if not raw or "marks" not in raw:
            raise UsageError("--pairs marked needs a marked graph file")
        return [(raw["marks"]["u"], raw["marks"]["v"])]
    if spec.startswith("random:"):
        try:
            return ("random", int(spec.split(":", 1)[1]))
        except ValueError:
            raise UsageError(f"--pairs random:K needs an integer K, got {spec!r}") from None
    try:
        out = []
        for item in spec.split(","):
            u, v = item.split("-")
            out.append((int(u), int(v)))
        return out
    except ValueError:
        raise UsageError(f"--pairs: cannot parse {spec!r}") from None


def _emit(text: str, out: Optional[str]):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _positive(name: str, value: int):
    if value < 1:
        raise UsageError(f"{name} must be >= 1")


# -- subcommands --------------------------------------------------------------

def cmd_gen(args, seed):
    fmt = _check_format(args.format, ("json", "edge_list"))
    if args.kind == "counterexample":
        if args.d is None:
            raise UsageError("--kind counterexample needs --d")
        if fmt != "json":
            raise UsageError("counterexample graphs carry marks and are written as json only")
        try:
            mg = counterexample(args.d)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if args.stars:
            mg = attach_stars(mg, *args.stars)
        _check_out(args.out)
        _emit(mg.to_json() + "\n", args.out)
        return
    need = {"path": ("n",), "star": ("n",), "grid": ("w", "h")}[args.kind]
    missing = [f"--{k}" for k in need if getattr(args, k) is None]
    if missing:
        raise UsageError(f"--kind {args.kind} needs {' '.join(missing)}")
    try:
        g = gen_graph(args.kind, **{k: getattr(args, k) for k in need})
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _check_out(args.out)
    data = save_graph(g, fmt).decode("utf-8")
    _emit(data if data.endswith("\n") else data + "\n", args.out)


def cmd_decompose(args, seed):
    _check_format(args.format, ("json",))
    g, raw = _read_graph(args.graph, args.graph_format)
    cfg = _config(args, g, raw, seed)
    _check_out(args.out)
    dec = decompose(g, cfg)
    _emit(dec.to_json() + "\n", args.out)


def cmd_estimate(args, seed):
    fmt = _check_format(args.format, ("csv", "json"))
    _positive("--trials", args.trials)
    _positive("--workers", args.workers)
    if not 0 < args.confidence < 1:
        raise UsageError("--confidence must lie in (0, 1)")
    g, raw = _read_graph(args.graph, args.graph_format)
    cfg = _config(args, g, raw, seed)
    pairs = _parse_pairs(args.pairs, raw, g)
    _check_out(args.out)
    _check_out(args.hist)
    try:
        est = estimate_separation(g, cfg, pairs, args.trials, args.confidence, workers=args.workers)
    except ValueError as exc:
        raise RuntimeFailure(str(exc)) from None
    if fmt == "csv":
        text = estimates_to_csv(est)
    else:
        text = _dump([e.__dict__ for e in est])
    if args.hist:
        hist = histogram([e.p_hat for e in est], args.bin_width)
        Path(args.hist).write_text(_dump(hist))
    _emit(text, args.out)


def cmd_summarize(args, seed):
    _check_format(args.format, ("json",))
    _positive("--trials", args.trials)
    _positive("--workers", args.workers)
    g, raw = _read_graph(args.graph, args.graph_format)
    cfg = _config(args, g, raw, seed)
    _check_out(args.out)
    summary = summarize_runs(g, cfg, args.trials, args.workers)
    out = summary.to_dict()
    out["algorithm"] = cfg.algorithm
    out["seed"] = seed
    _emit(_dump(out), args.out)


def cmd_embed(args, seed):
    fmt = _check_format(args.format, ("json", "csv"))
    _positive("--R", args.R)
    _positive("--m", args.m)
    g, _ = _read_graph(args.graph, args.graph_format)
    if args.kind == "l1":
        try:
            cfg = LddConfig(R=args.R, algorithm=args.algo, seed=seed,
                            grid_shape=tuple(args.grid) if args.grid else None)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    _check_out(args.out)
    _check_out(args.report)
    try:
        if args.kind == "euclidean":
            cloud = euclidean_embed(g, seed)
            rep = measure_distortion(g, cloud, "l2")
        else:
            cloud = l1_embed_from_ldd(cfg, g, args.R, args.m, seed, workers=args.workers)
            rep = measure_distortion(g, cloud, "l1")
    except ValueError as exc:
        raise RuntimeFailure(str(exc)) from None
    report = _dump({k: (None if v == float("inf") else v) for k, v in rep.__dict__.items()})
    _emit(cloud.to_json() + "\n" if fmt == "json" else cloud.to_csv(), args.out)
    if args.report:
        Path(args.report).write_text(report)
    else:
        sys.stderr.write(report)


def cmd_oracle(args, seed):
    _check_format(args.format, ("csv",))
    try:
        probs = exact_kpr_path_oracle(args.n, args.R, args.phases)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _check_out(args.out)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["u", "v", "p", "exact"])
    for (i, j), p in sorted(probs.items()):
        w.writerow([i, j, repr(float(p)), str(p)])
    _emit(buf.getvalue(), args.out)


def repro_bundle(g: Graph, figure: str, R: int, runs: int, seed: int, workers: int = 1,
                 algo: str = "randwts", bin_width: float = 0.01) -> dict:
    """The data behind one of the empirical figures, as a JSON-ready dict."""
    if figure == "gaussian":
        out = {"figure": figure, "R": R, "runs": runs, "seed": seed, "pairs": "edges", "window": [0.1, 0.6]}
        for name in ("kpr", "randwts"):
            cfg = LddConfig(R=R, algorithm=name, seed=seed)
            est = estimate_separation(g, cfg, "edges", runs, 0.99, workers=workers)
            ps = [e.p_hat for e in est]
            rep = fairness_report(est)
            out[name] = {
                "histogram": histogram(ps, bin_width),
                "min_p": min(ps),
                "max_p": max(ps),
                "fraction_in_window": sum(0.1 <= p <= 0.6 for p in ps) / len(ps),
                "ratio": [None if r.ratio == float("inf") else r.ratio for r in rep],
            }
        return out
    cfg = LddConfig(R=R, algorithm=algo, seed=seed)
    summ = summarize_runs(g, cfg, runs, workers).to_dict()
    out = {"figure": figure, "R": R, "runs": runs, "seed": seed, "algorithm": algo}
    if figure == "numclusters":
        out["normalized_cluster_count"] = summ["normalized_cluster_count"]
        out["cluster_count"] = summ["cluster_count"]
        out["n_over_R"] = g.vertex_count / R
    else:
        out["max_diameter_over_R"] = summ["max_diameter_over_R"]
        out["bound_over_R"] = diameter_bound(cfg) / R
        out["within_bound"] = summ["within_bound"]
    return out


def cmd_repro(args, seed):
    if args.figure not in FIGURES:
        raise UsageError(f"unknown figure {args.figure!r}; choose from {', '.join(FIGURES)}")
    _check_format(args.format, ("json",))
    _positive("--workers", args.workers)
    _positive("--R", args.R)
    runs = args.runs if args.runs is not None else (3000 if args.figure == "gaussian" else 200)
    _positive("--runs", runs)
    g, _ = _read_graph(args.graph, args.graph_format)
    _check_out(args.out)
    _emit(_dump(repro_bundle(g, args.figure, args.R, runs, seed, args.workers, args.algo, args.bin_width)), args.out)


COMMANDS = {
    "gen": cmd_gen,
    "decompose": cmd_decompose,
    "estimate": cmd_estimate,
    "summarize": cmd_summarize,
    "embed": cmd_embed,
    "oracle": cmd_oracle,
    "repro": cmd_repro,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        seed = resolve_seed(args.seed)
        COMMANDS[args.command](args, seed)
    except UsageError as exc:
        print(f"fairdecomp {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeFailure, OSError) as exc:
        print(f"fairdecomp {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
