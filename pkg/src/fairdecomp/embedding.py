"""Metric embeddings of graph distances and the decompositions built from them.

The Euclidean embedder is Bourgain's random-subset construction: coordinate
``(i, t)`` of vertex ``v`` is its distance to a random vertex subset in which
every vertex is kept with probability ``2**-i``. Each coordinate is
1-Lipschitz, so only contraction has to be fixed, which we do by rescaling
with the worst pairwise contraction. Distortion is O(log n); this replaces the
O(sqrt(log diameter)) planar embedding, so constants downstream are weaker.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.spatial.distance import pdist

from .decompositions import Decomposition, LddConfig, RootPolicy, decompose, kpr
from .graph import Graph, all_pairs_distances
from .rng import Stream, as_stream

_T_BOURGAIN = 21
_T_PROJECT = 22
_T_PART = 23
_T_TOKEN = 24
_T_KPR = 25


@dataclass(frozen=True)
class PointCloud:
    coordinates: np.ndarray  # shape (len(vertices), dim)
    vertices: tuple[int, ...]

    @property
    def dimension(self) -> int:
        return int(self.coordinates.shape[1])

    def __len__(self):
        return len(self.vertices)

    def to_dict(self) -> dict:
        return {"dim": self.dimension, "points": self.coordinates.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PointCloud":
        obj = json.loads(text)
        pts = np.asarray(obj["points"], dtype=float).reshape(len(obj["points"]), int(obj["dim"]))
        return cls(pts, tuple(range(len(pts))))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["vertex"] + [f"x{i}" for i in range(self.dimension)])
        for v, row in zip(self.vertices, self.coordinates):
            w.writerow([v] + [repr(float(x)) for x in row])
        return buf.getvalue()


@dataclass(frozen=True)
class DistortionReport:
    min_ratio: float  # min over pairs of embedded / graph distance, as given
    max_ratio: float
    scale: float  # multiply coordinates by this to make the embedding non-contractive
    max_expansion: float  # max ratio after scaling
    max_contraction_violation: float  # max(0, 1 - min_ratio); 0 means already non-contractive
    distortion: float  # max_ratio / min_ratio, inf if two vertices collide

    @property
    def infinite(self) -> bool:
        return math.isinf(self.distortion)


def _pair_ratios(dist: np.ndarray, coords: np.ndarray, norm: str) -> np.ndarray:
    metric = {"l1": "cityblock", "l2": "euclidean"}[norm]
    emb = pdist(coords, metric=metric)
    k = dist.shape[0]
    iu = np.triu_indices(k, 1)
    return emb / dist[iu]


def measure_distortion(g: Graph, p: PointCloud, norm: str = "l2",
                       dist: Optional[np.ndarray] = None) -> DistortionReport:
    """Exact min/max ratio of embedded to graph distance over all vertex pairs."""
    if norm not in ("l1", "l2"):
        raise ValueError("norm must be 'l1' or 'l2'")
    if len(p) < 2:
        return DistortionReport(1.0, 1.0, 1.0, 1.0, 0.0, 1.0)
    if dist is None:
        dist = all_pairs_distances(g, p.vertices)
    if np.isinf(dist).any():
        raise ValueError("graph distances must be finite (connected input)")
    ratios = _pair_ratios(dist, p.coordinates, norm)
    lo, hi = float(ratios.min()), float(ratios.max())
    if lo == 0.0:
        return DistortionReport(0.0, hi, math.inf, math.inf, 1.0, math.inf)
    scale = 1.0 / lo
    return DistortionReport(lo, hi, scale, hi * scale, max(0.0, 1.0 - lo), hi / lo)


def _bourgain(dist: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    k = dist.shape[0]
    if k == 1:
        return np.zeros((1, 1))
    scales = max(1, math.ceil(math.log2(k)))
    reps = max(1, math.ceil(math.log2(k)))
    probs = np.repeat(2.0 ** -np.arange(1, scales + 1), reps)
    masks = gen.random((len(probs), k)) < probs[:, None]
    empty = ~masks.any(axis=1)
    if empty.any():
        masks[np.flatnonzero(empty), gen.integers(0, k, size=int(empty.sum()))] = True
    # coords[j, v] = min over s in subset j of dist[v, s]
    big = np.where(masks[:, None, :], dist[None, :, :], np.inf)
    coords = big.min(axis=2).T
    # a collision would make the embedding non-injective; add d(., v) for one vertex of each colliding pair
    emb = pdist(coords)
    if (emb == 0).any():
        iu, ju = np.triu_indices(k, 1)
        extra = sorted(set(iu[emb == 0].tolist()))
        coords = np.hstack([coords, dist[:, extra]])
    return coords


def euclidean_embed(g: Graph, rng=None, vertices: Optional[Sequence[int]] = None,
                    dist: Optional[np.ndarray] = None) -> PointCloud:
    """Non-contractive Euclidean embedding of a connected graph (or connected vertex subset).

    Uses O(log^2 n) Bourgain coordinates, rescaled so every pair satisfies
    ``||h(u) - h(v)||_2 >= d(u, v)``.
    """
    verts = tuple(range(g.vertex_count)) if vertices is None else tuple(vertices)
    if dist is None:
        dist = all_pairs_distances(g, verts)
    if np.isinf(dist).any():
        raise ValueError("euclidean_embed needs a connected graph; embed each component separately")
    gen = np.random.default_rng(as_stream(rng).child(_T_BOURGAIN).numpy_seed())
    coords = _bourgain(dist, gen)
    if len(verts) > 1:
        ratios = _pair_ratios(dist, coords, "l2")
        # nudge up so rounding never leaves a pair a hair below its graph distance
        coords = coords * ((1.0 + 1e-12) / ratios.min())
    return PointCloud(coords, verts)


_APSP_CACHE_LIMIT = 8192


def _cluster_distances(g: Graph, cluster: tuple[int, ...]) -> np.ndarray:
    # KPR keeps producing the same clusters across trials; reuse their distance matrices
    cache = g._dist_cache
    key = ("apsp", cluster)
    dist = cache.get(key)
    if dist is None:
        dist = all_pairs_distances(g, cluster)
        if len(cache) < _APSP_CACHE_LIMIT:
            cache[key] = dist
    return dist


def slab_width(R: int) -> float:
    return R * math.sqrt(max(1.0, math.log2(R)))


def ldd_via_embedding(g: Graph, R: int, rng=None, policy: Optional[RootPolicy] = None,
                      params: Optional[LddConfig] = None) -> Decomposition:
    """KPR clusters, each embedded, projected on a Gaussian direction, and cut into slabs.

    Slab width is ``R * sqrt(log2 R)``. The output is a partition, but clusters
    need not be connected.
    """
    if R < 2:
        raise ValueError("R must be >= 2")
    stream = as_stream(rng)
    base = kpr(g, R, 3, policy, stream.child(_T_KPR))
    width = slab_width(R)
    labels = [0] * g.vertex_count
    next_label = 0
    for cluster in base.clusters:
        if len(cluster) == 1:
            labels[cluster[0]] = next_label
            next_label += 1
            continue
        s = stream.child(_T_PROJECT, cluster[0])
        h = euclidean_embed(g, s, cluster, _cluster_distances(g, cluster))
        x = np.random.default_rng(s.numpy_seed()).standard_normal(h.dimension)
        theta = s.random() * width
        q = h.coordinates @ x
        slabs = np.floor((q - theta) / width).astype(np.int64)
        index = {}
        for v, sl in zip(cluster, slabs.tolist()):
            if sl not in index:
                index[sl] = next_label
                next_label += 1
            labels[v] = index[sl]
    return Decomposition.from_labels(labels, params)


Sampler = Union[LddConfig, Callable[[Graph, int, Stream], Decomposition]]


def _sample(sampler: Sampler, g: Graph, R: int, stream: Stream) -> Decomposition:
    if isinstance(sampler, LddConfig):
        return decompose(g, sampler, stream)
    return sampler(g, R, stream)


def _token_block(args):
    sampler, g, R, m, key, start, stop = args
    root = Stream(key)
    block = np.empty((g.vertex_count, stop - start))
    for col, i in enumerate(range(start, stop)):
        dec = _sample(sampler, g, R, root.child(_T_PART, i))
        tok = root.child(_T_TOKEN, i)
        signs = np.array([1.0 if tok.bit() else -1.0 for _ in dec.clusters]) / m
        block[:, col] = signs[np.asarray(dec.cluster_of)]
    return block


def l1_embed_from_ldd(sampler: Sampler, g: Graph, R: int, m: int, rng=None, workers: int = 1) -> PointCloud:
    """Stack ``m * R`` sampled partitions; each cluster gets a random token of +-1/m per partition.

    ``sampler`` is an :class:`LddConfig` or a callable ``(g, R, stream) -> Decomposition``.
    The l1 distance between two points is ``2/m`` times the number of
    partitions that separate them and give their clusters different tokens.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    eta = m * R
    key = as_stream(rng).key
    if workers <= 1:
        coords = _token_block((sampler, g, R, m, key, 0, eta))
    else:
        bounds = np.linspace(0, eta, workers * 4 + 1).astype(int)
        jobs = [(sampler, g, R, m, key, int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            coords = np.hstack(list(ex.map(_token_block, jobs)))
    return PointCloud(coords, tuple(range(g.vertex_count)))
