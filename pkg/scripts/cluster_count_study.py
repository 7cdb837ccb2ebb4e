"""How many clusters do KPR-style decompositions leave on grids?

Compares kpr and randwts (min-id and uniform random roots) against a plain
networkx re-implementation of KPR that removes cut edges and takes
components. Prints the mean count, mean count / (n/R), and the share of runs
with at most n/R clusters.

    python scripts/cluster_count_study.py [--runs 200] [--sizes 20 30 40] [--R 3 5 8]
"""

import argparse
import random

import networkx as nx
import numpy as np

from fairdecomp.decompositions import LddConfig, RootPolicy
from fairdecomp.graph import grid_graph
from fairdecomp.stats import summarize_runs


def nx_kpr_count(h: nx.Graph, R: int, rnd: random.Random, phases: int = 3) -> int:
    clusters = [set(c) for c in nx.connected_components(h)]
    for _ in range(phases):
        nxt = []
        for c in clusters:
            sub = h.subgraph(c)
            lev = nx.single_source_shortest_path_length(sub, min(c))
            k = rnd.randrange(R)
            cut = nx.Graph(sub)
            cut.remove_edges_from([(a, b) for a, b in sub.edges()
                                   if lev[a] != lev[b] and min(lev[a], lev[b]) % R == k])
            nxt.extend(set(x) for x in nx.connected_components(cut))
        clusters = nxt
    return len(clusters)


def row(label, counts, n, R):
    counts = np.asarray(counts)
    print(f"  {label:<22} mean {counts.mean():8.1f}  /(n/R) {counts.mean() / (n / R):.3f}  "
          f"<= n/R in {np.mean(counts <= n / R):.3f} of runs")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--sizes", type=int, nargs="+", default=[20, 30, 40])
    ap.add_argument("--R", type=int, nargs="+", default=[3, 5, 8])
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    for w in args.sizes:
        g = grid_graph(w, w)
        h = nx.Graph(g.edges())
        n = g.vertex_count
        for R in args.R:
            print(f"{w}x{w} grid, R={R}, n/R={n / R:.1f}")
            for algo in ("kpr", "randwts"):
                for roots in ("min_id", "uniform_random"):
                    cfg = LddConfig(R=R, algorithm=algo, root_policy=RootPolicy(roots), seed=args.seed)
                    row(f"{algo}/{roots}", summarize_runs(g, cfg, args.runs).cluster_counts, n, R)
            rnd = random.Random(args.seed)
            row("networkx kpr", [nx_kpr_count(h, R, rnd) for _ in range(args.runs)], n, R)


if __name__ == "__main__":
    main()
