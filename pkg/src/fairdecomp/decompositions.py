"""Randomized low-diameter decompositions built on BFS layering.

All of the connected-cluster algorithms here share one phase step: every
current cluster picks a root, is layered by BFS inside itself, each vertex is
mapped to a *band* index computed from its level, and the cluster is split
into the connected pieces of equal band. Removing "every edge at level
l = k (mod R)" is exactly the band map ``(level - 1 - k) // R``, since BFS
levels change by at most one along any edge.

Randomness comes from :class:`fairdecomp.rng.Stream` children addressed by
``(tag, phase, min vertex of the cluster)``, so results do not depend on the
order in which clusters are processed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Optional, Sequence

from .graph import Graph, connected_components, grid_graph
from .rng import Stream, as_stream

# stream tags
_T_KPR = 1
_T_RANDWTS = 2
_T_TWOCUT0 = 3
_T_TWOCUT = 4
_T_RADIUS = 5
_T_MIX = 6
_T_GRID = 7
_T_PREFIX = 8
_T_SUB = 9

ALGORITHMS = (
    "kpr",
    "kpr_plus",
    "randwts",
    "two_cuts",
    "rand_radius",
    "mixed_rand_radius",
    "grid_axis",
    "embed",
)


@dataclass(frozen=True)
class RootPolicy:
    """How a cluster picks its BFS root.

    ``min_id`` takes the smallest vertex id; ``uniform_random`` draws a member
    uniformly; ``preference`` takes the first listed vertex present in the
    cluster and falls back to ``min_id``.
    """

    kind: str = "min_id"
    preference: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in ("min_id", "uniform_random", "preference"):
            raise ValueError(f"unknown root policy {self.kind!r}")
        if self.kind == "preference" and not self.preference:
            raise ValueError("preference policy needs at least one vertex")

    @classmethod
    def prefer(cls, *vertices: int) -> "RootPolicy":
        return cls("preference", tuple(int(v) for v in vertices))

    def validate(self, g: Graph):
        for v in self.preference:
            if not 0 <= v < g.vertex_count:
                raise ValueError(f"preferred root {v} out of range")

    def choose(self, members: Sequence[int], label: list[int], cid: int, stream: Stream) -> int:
        if self.kind == "preference":
            for p in self.preference:
                if label[p] == cid:
                    return p
            return min(members)
        if self.kind == "uniform_random":
            ordered = sorted(members)
            return ordered[stream.randbelow(len(ordered))]
        return min(members)

    def to_str(self) -> str:
        if self.kind == "preference":
            return "preference:" + ",".join(map(str, self.preference))
        return self.kind


@dataclass(frozen=True)
class LddConfig:
    R: int
    algorithm: str = "kpr"
    phases: Optional[int] = None  # None -> 3 (4 for kpr_plus)
    eps: float = 0.5
    with_prefix: bool = False
    alpha: float = 0.0
    root_policy: RootPolicy = field(default_factory=RootPolicy)
    seed: int = 0
    grid_shape: Optional[tuple[int, int]] = None  # (w, h) for grid_axis

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if int(self.R) != self.R or self.R < 1:
            raise ValueError("R must be a positive integer")
        if self.phases is not None and self.phases < 1:
            raise ValueError("phases must be >= 1")
        if not 0 < self.eps <= 1:
            raise ValueError("eps must lie in (0, 1]")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.algorithm == "mixed_rand_radius":
            if self.alpha > 1:
                raise ValueError("mixed_rand_radius needs 0 <= alpha <= 1")
            if self.alpha == 0 and self.R < 2:
                raise ValueError("mixed_rand_radius with alpha=0 needs R >= 2")
        if self.algorithm == "embed" and self.R < 2:
            raise ValueError("embedding LDD needs R >= 2")
        if self.algorithm == "grid_axis" and self.grid_shape is None:
            raise ValueError("grid_axis needs grid_shape=(w, h)")

    @property
    def n_phases(self) -> int:
        if self.phases is not None:
            return self.phases
        return 4 if self.algorithm == "kpr_plus" else 3

    def with_seed(self, seed: int) -> "LddConfig":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class Decomposition:
    """A partition of the vertex set; clusters are sorted and ordered by minimum member."""

    clusters: tuple[tuple[int, ...], ...]
    cluster_of: tuple[int, ...]
    params: Optional[LddConfig] = field(default=None, compare=False)

    @classmethod
    def from_labels(cls, labels: Sequence[int], params: Optional[LddConfig] = None) -> "Decomposition":
        groups: dict[int, list[int]] = {}
        for v, lab in enumerate(labels):
            groups.setdefault(lab, []).append(v)
        # vertices were appended in increasing order, so each group is sorted
        clusters = sorted((tuple(m) for m in groups.values()), key=lambda c: c[0])
        cluster_of = [0] * len(labels)
        for i, c in enumerate(clusters):
            for v in c:
                cluster_of[v] = i
        return cls(tuple(clusters), tuple(cluster_of), params)

    @classmethod
    def from_clusters(cls, n: int, clusters, params: Optional[LddConfig] = None) -> "Decomposition":
        labels = [-1] * n
        for i, c in enumerate(clusters):
            for v in c:
                if labels[v] != -1:
                    raise ValueError(f"vertex {v} appears in two clusters")
                labels[v] = i
        if -1 in labels:
            raise ValueError(f"vertex {labels.index(-1)} is not covered")
        return cls.from_labels(labels, params)

    def __len__(self):
        return len(self.clusters)

    def separates(self, u: int, v: int) -> bool:
        return self.cluster_of[u] != self.cluster_of[v]

    def to_dict(self) -> dict:
        p = self.params
        return {
            "R": p.R if p else None,
            "algorithm": p.algorithm if p else None,
            "seed": p.seed if p else None,
            "clusters": [list(c) for c in self.clusters],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "Decomposition":
        obj = json.loads(text)
        clusters = obj["clusters"]
        n = sum(len(c) for c in clusters)
        params = None
        if obj.get("R") is not None and obj.get("algorithm") in ALGORITHMS and obj["algorithm"] != "grid_axis":
            params = LddConfig(R=obj["R"], algorithm=obj["algorithm"], seed=obj.get("seed") or 0)
        return cls.from_clusters(n, clusters, params)


def is_partition(d: Decomposition, n: int) -> bool:
    seen = [False] * n
    for c in d.clusters:
        for v in c:
            if not 0 <= v < n or seen[v]:
                return False
            seen[v] = True
    if not all(seen):
        return False
    return all(v in d.clusters[d.cluster_of[v]] for v in range(n))


def clusters_connected(g: Graph, d: Decomposition) -> bool:
    return all(len(connected_components(g, c)) == 1 for c in d.clusters)


# -- the shared phase step ----------------------------------------------------

class _State:
    """Current clusters as member lists plus a per-vertex label array."""

    __slots__ = ("g", "label", "clusters", "prev_root")

    def __init__(self, g: Graph, clusters: list[list[int]], prev_root=None):
        self.g = g
        self.label = [-1] * g.vertex_count
        self.clusters = clusters
        for cid, members in enumerate(clusters):
            for v in members:
                self.label[v] = cid
        self.prev_root = prev_root if prev_root is not None else [None] * len(clusters)

    @classmethod
    def initial(cls, g: Graph) -> "_State":
        return cls(g, connected_components(g))

    def labels(self) -> list[int]:
        return self.label


def _layer(adj, label, cid, root, level) -> list[int]:
    """BFS inside cluster ``cid``; fills ``level`` and returns the visit order."""
    level[root] = 0
    order = [root]
    i = 0
    while i < len(order):
        x = order[i]
        i += 1
        lx = level[x] + 1
        for w in adj[x]:
            if level[w] < 0 and label[w] == cid:
                level[w] = lx
                order.append(w)
    return order


def _phase(state: _State, step: Callable) -> _State:
    """Run one phase. ``step(cid, members, level)`` returns ``(root, band_fn)`` lazily:

    it is called as ``step(cid, members)`` to get the root, then the returned
    callable maps the filled ``level`` array (restricted to the BFS order) to a
    dict or list of bands.
    """
    g = state.g
    adj = g.adjacency
    label = state.label
    level = [-1] * g.vertex_count
    band = [0] * g.vertex_count
    new_label = [-1] * g.vertex_count
    new_clusters: list[list[int]] = []
    new_prev: list[Optional[int]] = []
    for cid, members in enumerate(state.clusters):
        if len(members) == 1:
            v = members[0]
            new_label[v] = len(new_clusters)
            new_clusters.append(members)
            new_prev.append(v)
            continue
        root, assign = step(cid, members, state.prev_root[cid])
        order = _layer(adj, label, cid, root, level)
        assign(order, level, band)
        for s in order:
            if new_label[s] >= 0:
                continue
            nid = len(new_clusters)
            bs = band[s]
            new_label[s] = nid
            piece = [s]
            stack = [s]
            while stack:
                x = stack.pop()
                for w in adj[x]:
                    if new_label[w] < 0 and label[w] == cid and band[w] == bs:
                        new_label[w] = nid
                        piece.append(w)
                        stack.append(w)
            new_clusters.append(piece)
            new_prev.append(root)
    out = _State.__new__(_State)
    out.g = g
    out.label = new_label
    out.clusters = new_clusters
    out.prev_root = new_prev
    return out


def _single_cut_bands(R: int, k: int):
    def assign(order, level, band):
        for v in order:
            band[v] = (level[v] - 1 - k) // R
    return assign


def _kpr_phases(state: _State, R: int, phases: int, policy: RootPolicy, stream: Stream, tag=_T_KPR) -> _State:
    for ph in range(phases):
        def step(cid, members, _prev, ph=ph):
            s = stream.child(tag, ph, min(members))
            root = policy.choose(members, state.label, cid, s)
            k = s.randbelow(R)
            return root, _single_cut_bands(R, k)
        state = _phase(state, step)
    return state


# -- Algorithm: classic KPR ---------------------------------------------------

def kpr(g: Graph, R: int, phases: int = 3, policy: Optional[RootPolicy] = None, rng=None,
        params: Optional[LddConfig] = None) -> Decomposition:
    """KPR decomposition: per phase and per cluster, cut every BFS level congruent to a random k mod R."""
    if R < 1:
        raise ValueError("R must be >= 1")
    if phases < 1:
        raise ValueError("phases must be >= 1")
    policy = policy or RootPolicy()
    policy.validate(g)
    state = _kpr_phases(_State.initial(g), R, phases, policy, as_stream(rng))
    return Decomposition.from_labels(state.label, params)


# -- Algorithm: KPR with random vertex weights --------------------------------

def _randwts_phases(state: _State, R: int, phases: int, policy: RootPolicy, stream: Stream) -> _State:
    for ph in range(phases):
        def step(cid, members, _prev, ph=ph):
            s = stream.child(_T_RANDWTS, ph, min(members))
            root = policy.choose(members, state.label, cid, s)
            theta = s.randbelow(R)

            def assign(order, level, band):
                for v in order:
                    lv = level[v]
                    if lv % R == theta:
                        lv += s.bit()
                    # V_q = (qR + theta, (q+1)R + theta]; lv <= theta gives q = -1
                    band[v] = (lv - 1 - theta) // R
            return root, assign
        state = _phase(state, step)
    return state


def kpr_randwts(g: Graph, R: int, policy: Optional[RootPolicy] = None, rng=None, phases: int = 3,
                params: Optional[LddConfig] = None) -> Decomposition:
    """KPR with a random 0/1 level bump for vertices on the sampled boundary level."""
    if R < 1:
        raise ValueError("R must be >= 1")
    policy = policy or RootPolicy()
    policy.validate(g)
    state = _randwts_phases(_State.initial(g), R, phases, policy, as_stream(rng))
    return Decomposition.from_labels(state.label, params)


def randwts_bands(levels: Sequence[int], R: int, theta: int, bits: Sequence[int]) -> list[int]:
    """Band index of each vertex after jittering; exposed for consistency checks."""
    out = []
    for lv, b in zip(levels, bits):
        if lv % R == theta:
            lv += b
        out.append((lv - 1 - theta) // R)
    return out


# -- Algorithm: two cuts per phase --------------------------------------------

def sample_kappa(eps: float, R: int, rng) -> float:
    """Draw from density eps / (kappa^(1-eps) R^eps) on (0, R], i.e. CDF (t/R)^eps."""
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    u = rng.random() if isinstance(rng, Stream) else 1.0 - rng.random()
    return R * u ** (1.0 / eps)


def _closest_to(g: Graph, prev_root: int, members: Sequence[int]) -> int:
    dist = g.distances(prev_root)
    return min(members, key=lambda v: (dist[v], v))


def kpr_two_cuts(g: Graph, R: int, eps: float = 0.5, with_prefix: bool = False,
                 policy: Optional[RootPolicy] = None, rng=None,
                 params: Optional[LddConfig] = None) -> Decomposition:
    """One KPR iteration, then two phases that each cut at k1 and k1 + ceil(kappa) (mod R).

    Roots after the first iteration are the vertices closest (in the input
    graph, ties to the smaller id) to the root that created the cluster. With
    ``with_prefix`` the random-weights algorithm runs first and this procedure
    is applied to each of its clusters.
    """
    if R < 1:
        raise ValueError("R must be >= 1")
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    policy = policy or RootPolicy()
    policy.validate(g)
    stream = as_stream(rng)
    state = _State.initial(g)
    if with_prefix:
        state = _randwts_phases(state, R, 3, policy, stream.child(_T_PREFIX))
        state = _State(g, state.clusters)
    state = _kpr_phases(state, R, 1, policy, stream, tag=_T_TWOCUT0)
    for ph in (1, 2):
        def step(cid, members, prev, ph=ph):
            s = stream.child(_T_TWOCUT, ph, min(members))
            root = prev if state.label[prev] == cid else _closest_to(g, prev, members)
            k1 = s.randbelow(R)
            k2 = math.ceil(sample_kappa(eps, R, s))
            residues = sorted({k1, (k1 + k2) % R})

            def assign(order, level, band):
                for v in order:
                    lv = level[v] - 1
                    band[v] = sum((lv - a) // R for a in residues)
            return root, assign
        state = _phase(state, step)
    return Decomposition.from_labels(state.label, params)


# -- Algorithm: random diameter -----------------------------------------------

def sample_radius(alpha: float, R: int, rng) -> float:
    """Draw r on (0, R] with density (1+alpha) r^alpha / R^(1+alpha)."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    u = rng.random() if isinstance(rng, Stream) else 1.0 - rng.random()
    return R * u ** (1.0 / (1.0 + alpha))


def kpr_rand_radius(g: Graph, R: int, alpha: float = 0.0, policy: Optional[RootPolicy] = None, rng=None,
                    phases: int = 3, params: Optional[LddConfig] = None) -> Decomposition:
    """KPR run with parameter ceil(r) for a random r on (0, R]."""
    if R < 1:
        raise ValueError("R must be >= 1")
    stream = as_stream(rng)
    r = max(1, math.ceil(sample_radius(alpha, R, stream.child(_T_RADIUS))))
    return kpr(g, r, phases, policy, stream.child(_T_SUB), params)


def mixture_weight(alpha: float, R: int) -> float:
    """Probability that the mixture uses the random-diameter branch."""
    if alpha > 0:
        return alpha
    if R < 2:
        raise ValueError("alpha = 0 needs R >= 2")
    return 1.0 / math.log2(R)


def mixed_rand_radius(g: Graph, R: int, alpha: float = 0.0, policy: Optional[RootPolicy] = None, rng=None,
                      params: Optional[LddConfig] = None) -> Decomposition:
    """With probability p run the random-diameter variant, else plain KPR.

    ``p = alpha`` for ``alpha > 0`` and ``1 / log2(R)`` for ``alpha = 0``.
    """
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    p = mixture_weight(alpha, R)
    stream = as_stream(rng)
    if stream.child(_T_MIX).random() <= p:
        return kpr_rand_radius(g, R, alpha, policy, stream.child(_T_SUB), params=params)
    return kpr(g, R, 3, policy, stream.child(_T_SUB), params)


def mixture_branch(R: int, alpha: float, rng) -> str:
    """Which branch :func:`mixed_rand_radius` takes for this stream."""
    p = mixture_weight(alpha, R)
    return "rand_radius" if as_stream(rng).child(_T_MIX).random() <= p else "kpr"


# -- Reference scheme: axis-aligned grid blocks -------------------------------

@lru_cache(maxsize=32)
def _grid(w: int, h: int) -> Graph:
    return grid_graph(w, h)


def grid_axis_ldd(g: Graph, w: int, h: int, R: int, rng=None,
                  params: Optional[LddConfig] = None) -> Decomposition:
    """Cut a ``w`` x ``h`` grid into R x R blocks at random offsets (l, m) in [R] x [R]."""
    if R < 1:
        raise ValueError("R must be >= 1")
    if g.vertex_count != w * h or g.adjacency != _grid(w, h).adjacency:
        raise ValueError(f"graph is not the canonical {w}x{h} grid")
    s = as_stream(rng).child(_T_GRID)
    col_off = s.randbelow(R)
    row_off = s.randbelow(R)
    labels = []
    blocks_per_row = (w + R) // R + 1
    for i in range(h):
        rb = (i - row_off) // R + 1
        for j in range(w):
            labels.append(rb * blocks_per_row + (j - col_off) // R + 1)
    return Decomposition.from_labels(labels, params)


# -- dispatch -----------------------------------------------------------------

def decompose(g: Graph, cfg: LddConfig, rng=None) -> Decomposition:
    """Run the algorithm named in ``cfg``; ``rng`` (Stream or int) defaults to ``cfg.seed``."""
    stream = as_stream(cfg.seed if rng is None else rng)
    a = cfg.algorithm
    pol = cfg.root_policy
    if a in ("kpr", "kpr_plus"):
        return kpr(g, cfg.R, cfg.n_phases, pol, stream, cfg)
    if a == "randwts":
        return kpr_randwts(g, cfg.R, pol, stream, cfg.n_phases, cfg)
    if a == "two_cuts":
        return kpr_two_cuts(g, cfg.R, cfg.eps, cfg.with_prefix, pol, stream, cfg)
    if a == "rand_radius":
        return kpr_rand_radius(g, cfg.R, cfg.alpha, pol, stream, cfg.n_phases, cfg)
    if a == "mixed_rand_radius":
        return mixed_rand_radius(g, cfg.R, cfg.alpha, pol, stream, cfg)
    if a == "grid_axis":
        w, h = cfg.grid_shape
        return grid_axis_ldd(g, w, h, cfg.R, stream, cfg)
    if a == "embed":
        from .embedding import ldd_via_embedding
        return ldd_via_embedding(g, cfg.R, stream, policy=pol, params=cfg)
    raise ValueError(f"unknown algorithm {a!r}")


def diameter_bound(cfg: LddConfig) -> float:
    """Hard cap on the induced diameter of any cluster (inf where none is promised)."""
    a = cfg.algorithm
    if a in ("kpr", "kpr_plus", "two_cuts", "rand_radius", "mixed_rand_radius"):
        return 43 * cfg.R
    if a == "randwts":
        return 43 * (cfg.R + 1)
    if a == "grid_axis":
        return 2 * (cfg.R - 1)
    return math.inf
