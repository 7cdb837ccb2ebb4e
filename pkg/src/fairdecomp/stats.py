"""Monte Carlo estimation of separation probabilities and run summaries.

Trial ``t`` of a campaign with master seed ``s`` always uses the stream
``Stream(s, t)``. Trials are split into contiguous chunks for worker
processes and reduced by trial index, so the output does not depend on the
number of workers.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist
from typing import Sequence, Union

import numpy as np

from .decompositions import LddConfig, decompose, diameter_bound
from .graph import Graph, induced_diameter
from .rng import Stream


@dataclass(frozen=True)
class SeparationEstimate:
    u: int
    v: int
    distance: float
    rho: float
    trials: int
    hits: int
    p_hat: float
    ci_low: float
    ci_high: float

    @property
    def half_width(self) -> float:
        return max(self.p_hat - self.ci_low, self.ci_high - self.p_hat)

    def ci_intersects(self, lo: float, hi: float) -> bool:
        return self.ci_low <= hi and self.ci_high >= lo


@dataclass(frozen=True)
class RunSummary:
    trial: int
    seed: int
    cluster_count: int
    max_induced_diameter: float


@dataclass(frozen=True)
class FairnessReport:
    distance_class: float
    pairs: int
    min_p: float
    max_p: float
    ratio: float


def z_value(confidence: float) -> float:
    if not 0 < confidence < 1:
        raise ValueError("confidence must lie in (0, 1)")
    return NormalDist().inv_cdf(0.5 + confidence / 2)


def wilson_interval(hits: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1 or not 0 <= hits <= trials:
        raise ValueError("need 0 <= hits <= trials and trials >= 1")
    p = hits / trials
    z2 = z * z
    denom = 1 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    lo = 0.0 if hits == 0 else max(0.0, center - half)
    hi = 1.0 if hits == trials else min(1.0, center + half)
    return lo, hi


# -- pair selection -----------------------------------------------------------

PairSpec = Union[str, tuple, Sequence[tuple[int, int]]]


def resolve_pairs(g: Graph, spec: PairSpec, seed: int = 0) -> list[tuple[int, int]]:
    """``"edges"``, ``"all"``, ``("random", k)`` or an explicit list of pairs."""
    n = g.vertex_count
    if isinstance(spec, str):
        if spec == "edges":
            return g.edges()
        if spec == "all":
            return [(u, v) for u in range(n) for v in range(u + 1, n)]
        raise ValueError(f"unknown pair spec {spec!r}")
    if isinstance(spec, tuple) and len(spec) == 2 and spec[0] == "random":
        k = int(spec[1])
        if n < 2:
            raise ValueError("random pairs need at least two vertices")
        s = Stream(seed, 0xA11)
        out = []
        while len(out) < k:
            u, v = s.randbelow(n), s.randbelow(n)
            if u != v:
                out.append((min(u, v), max(u, v)))
        return out
    pairs = [(int(u), int(v)) for u, v in spec]
    for u, v in pairs:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"pair ({u}, {v}) out of range for n={n}")
    return pairs


def pair_distances(g: Graph, pairs) -> list[float]:
    out = []
    for u, v in pairs:
        dv = g.distances(u)[v]
        out.append(math.inf if dv < 0 else dv)
    return out


# -- campaigns ----------------------------------------------------------------

@dataclass
class Campaign:
    pairs: list[tuple[int, int]]
    trials: int
    hits: list[int]
    runs: list[RunSummary] = field(default_factory=list)


def _chunk(args):
    g, cfg, pairs, start, stop, track = args
    us = [u for u, _ in pairs]
    vs = [v for _, v in pairs]
    hits = [0] * len(pairs)
    runs = []
    for t in range(start, stop):
        stream = Stream(cfg.seed, t)
        dec = decompose(g, cfg, stream)
        cof = dec.cluster_of
        for i in range(len(pairs)):
            if cof[us[i]] != cof[vs[i]]:
                hits[i] += 1
        if track:
            diam = max(induced_diameter(g, c) for c in dec.clusters)
            runs.append(RunSummary(t, stream.key, len(dec.clusters), diam))
    return hits, runs


def _split(trials: int, workers: int) -> list[tuple[int, int]]:
    parts = max(1, min(workers * 4, trials)) if workers > 1 else 1
    bounds = np.linspace(0, trials, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]


def run_trials(g: Graph, cfg: LddConfig, pairs, trials: int, workers: int = 1,
               track_runs: bool = False) -> Campaign:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    pairs = list(pairs)
    jobs = [(g, cfg, pairs, a, b, track_runs) for a, b in _split(trials, workers)]
    if workers <= 1:
        results = [_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_chunk, jobs))
    hits = [0] * len(pairs)
    runs: list[RunSummary] = []
    for h, r in results:
        for i, x in enumerate(h):
            hits[i] += x
        runs.extend(r)
    return Campaign(pairs, trials, hits, runs)


def make_estimates(g: Graph, cfg: LddConfig, camp: Campaign, confidence: float) -> list[SeparationEstimate]:
    z = z_value(confidence)
    out = []
    for (u, v), dist, h in zip(camp.pairs, pair_distances(g, camp.pairs), camp.hits):
        lo, hi = wilson_interval(h, camp.trials, z)
        out.append(SeparationEstimate(u, v, dist, dist / cfg.R, camp.trials, h, h / camp.trials, lo, hi))
    return out


def estimate_separation(g: Graph, cfg: LddConfig, pairs: PairSpec, trials: int,
                        confidence: float = 0.95, workers: int = 1) -> list[SeparationEstimate]:
    """Estimate Pr[u, v in different clusters] for each pair over ``trials`` seeded runs."""
    camp = run_trials(g, cfg, resolve_pairs(g, pairs, cfg.seed), trials, workers)
    return make_estimates(g, cfg, camp, confidence)


def estimates_to_csv(estimates: Sequence[SeparationEstimate]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["u", "v", "d", "rho", "trials", "hits", "p_hat", "ci_low", "ci_high"])
    for e in estimates:
        w.writerow([e.u, e.v, _num(e.distance), f"{e.rho:.6g}", e.trials, e.hits,
                    f"{e.p_hat:.6f}", f"{e.ci_low:.6f}", f"{e.ci_high:.6f}"])
    return buf.getvalue()


def _num(x):
    return "inf" if math.isinf(x) else int(x)


# -- fairness -----------------------------------------------------------------

def fairness_report(estimates: Sequence[SeparationEstimate]) -> list[FairnessReport]:
    """Spread of separation probabilities within each distance class."""
    if not estimates:
        raise ValueError("no estimates")
    groups: dict[float, list[float]] = {}
    for e in estimates:
        groups.setdefault(e.distance, []).append(e.p_hat)
    out = []
    for dist in sorted(groups):
        ps = groups[dist]
        lo, hi = min(ps), max(ps)
        if hi == lo:
            ratio = 1.0
        elif lo == 0:
            ratio = math.inf
        else:
            ratio = hi / lo
        out.append(FairnessReport(dist, len(ps), lo, hi, ratio))
    return out


def histogram(values: Sequence[float], bin_width: float = 0.01, lo: float = 0.0, hi: float = 1.0) -> dict:
    """Fixed-width histogram over [lo, hi]; the last bin is closed on the right."""
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    nbins = max(1, math.ceil((hi - lo) / bin_width - 1e-9))
    counts = [0] * nbins
    for x in values:
        i = min(nbins - 1, max(0, int((x - lo) / bin_width + 1e-12)))
        counts[i] += 1
    bins = [{"lo": round(lo + i * bin_width, 12), "hi": round(min(hi, lo + (i + 1) * bin_width), 12),
             "count": c} for i, c in enumerate(counts)]
    return {"bin_width": bin_width, "bins": bins}


# -- run summaries ------------------------------------------------------------

@dataclass
class RunsSummary:
    n: int
    R: int
    runs: list[RunSummary]
    diameter_bound: float

    @property
    def cluster_counts(self) -> np.ndarray:
        return np.array([r.cluster_count for r in self.runs])

    @property
    def max_diameters(self) -> np.ndarray:
        return np.array([r.max_induced_diameter for r in self.runs], dtype=float)

    def within_bound(self) -> bool:
        return bool(np.all(self.max_diameters <= self.diameter_bound))

    def to_dict(self, quantiles=(0.0, 0.25, 0.5, 0.75, 1.0)) -> dict:
        counts = self.cluster_counts
        diams = self.max_diameters
        base = self.n / self.R

        def describe(a):
            return {
                "mean": float(np.mean(a)),
                "min": float(np.min(a)),
                "max": float(np.max(a)),
                "quantiles": {str(q): float(np.quantile(a, q)) for q in quantiles},
            }

        return {
            "n": self.n,
            "R": self.R,
            "runs": len(self.runs),
            "cluster_count": describe(counts),
            "normalized_cluster_count": describe(counts / base),
            "max_diameter": describe(diams),
            "max_diameter_over_R": describe(diams / self.R),
            "diameter_bound": self.diameter_bound,
            "within_bound": self.within_bound(),
        }


def summarize_runs(g: Graph, cfg: LddConfig, trials: int, workers: int = 1) -> RunsSummary:
    """Cluster counts and largest induced cluster diameter for each of ``trials`` runs."""
    camp = run_trials(g, cfg, [], trials, workers, track_runs=True)
    return RunsSummary(g.vertex_count, cfg.R, camp.runs, diameter_bound(cfg))


# -- exact oracle for KPR on paths --------------------------------------------

ORACLE_LIMITS = {"n": 24, "R": 6, "phases": 3}


def exact_kpr_path_oracle(n: int, R: int, phases: int = 3) -> dict[tuple[int, int], Fraction]:
    """Exact Pr[i, j separated] for KPR with min-id roots on the path 0-1-...-(n-1).

    Works directly on intervals: a cluster ``[a, b]`` rooted at ``a`` has the
    edge ``(x, x+1)`` at level ``x - a``, and offset ``k`` removes the edges
    whose level is congruent to ``k`` mod R. Only the interval holding both
    endpoints matters, so each pair costs at most ``R**phases`` leaves.
    """
    if not (1 <= n <= ORACLE_LIMITS["n"] and 1 <= R <= ORACLE_LIMITS["R"]
            and 1 <= phases <= ORACLE_LIMITS["phases"]):
        raise ValueError(f"oracle limits: n <= 24, R <= 6, phases <= 3 (got n={n}, R={R}, phases={phases})")

    def sep(i, j, a, b, left):
        if left == 0:
            return Fraction(0)
        total = Fraction(0)
        for k in range(R):
            cuts = [x for x in range(a, b) if (x - a) % R == k]
            if any(i <= x < j for x in cuts):
                total += 1
                continue
            lo = max([x + 1 for x in cuts if x < i], default=a)
            hi = min([x for x in cuts if x >= j], default=b)
            total += sep(i, j, lo, hi, left - 1)
        return total / R

    return {(i, j): sep(i, j, 0, n - 1, phases) for i in range(n) for j in range(i + 1, n)}
