"""Immutable undirected graphs, BFS layering, and graph file formats.

Vertices are the integers ``0..n-1``. Adjacency lists are stored sorted so two
graphs with the same edge set compare equal. Planarity is assumed by the
decomposition bounds but never checked here; :func:`planarity_warning` only
applies the cheap ``|E| <= 3|V| - 6`` sanity test.
"""

from __future__ import annotations

import json
import math
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

UNREACHED = -1


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    adjacency: tuple[tuple[int, ...], ...]
    labels: Optional[tuple[str, ...]] = field(default=None, compare=False)
    _dist_cache: dict = field(default_factory=dict, init=False, compare=False, repr=False)

    def __post_init__(self):
        if len(self.adjacency) != self.vertex_count:
            raise ValueError("adjacency must have one entry per vertex")
        for u, nbrs in enumerate(self.adjacency):
            prev = -1
            for w in nbrs:
                if w <= prev:
                    raise ValueError(f"neighbors of {u} must be sorted and distinct")
                if w == u:
                    raise ValueError(f"self-loop at {u}")
                if not 0 <= w < self.vertex_count:
                    raise ValueError(f"neighbor {w} of {u} out of range")
                prev = w
        for u, nbrs in enumerate(self.adjacency):
            for w in nbrs:
                if not _contains(self.adjacency[w], u):
                    raise ValueError(f"asymmetric adjacency: {u}->{w} without {w}->{u}")
        if self.labels is not None and len(self.labels) != self.vertex_count:
            raise ValueError("labels must have one entry per vertex")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels=None) -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        adj = tuple(tuple(sorted(s)) for s in nbrs)
        return cls(n, adj, tuple(labels) if labels is not None else None)

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Each undirected edge once, as ``(u, v)`` with ``u < v``, in sorted order."""
        return [(u, w) for u, nbrs in enumerate(self.adjacency) for w in nbrs if u < w]

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def __len__(self):
        return self.vertex_count

    def __hash__(self):
        return hash((self.vertex_count, self.adjacency))

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_dist_cache"] = {}
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)

    def distances(self, root: int) -> list[int]:
        """Whole-graph BFS distances from ``root``, memoized per graph object."""
        d = self._dist_cache.get(root)
        if d is None:
            d = distances_from(self, root)
            self._dist_cache[root] = d
        return d


def _contains(sorted_tuple, x) -> bool:
    lo, hi = 0, len(sorted_tuple)
    while lo < hi:
        mid = (lo + hi) // 2
        if sorted_tuple[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo < len(sorted_tuple) and sorted_tuple[lo] == x


def _as_mask(g: Graph, restrict) -> Optional[list[bool]]:
    if restrict is None:
        return None
    mask = [False] * g.vertex_count
    for v in restrict:
        if not 0 <= v < g.vertex_count:
            raise ValueError(f"vertex {v} out of range")
        mask[v] = True
    return mask


@dataclass(frozen=True)
class BfsLayering:
    root: int
    level: tuple[int, ...]  # UNREACHED (-1) outside the root's component
    parent: tuple[Optional[int], ...]

    def reached(self) -> list[int]:
        return [v for v, lv in enumerate(self.level) if lv != UNREACHED]

    @property
    def depth(self) -> int:
        return max(self.level)


def bfs(g: Graph, root: int, restrict: Optional[Iterable[int]] = None) -> BfsLayering:
    """Breadth-first layering from ``root``, optionally inside the subgraph induced by ``restrict``."""
    if not 0 <= root < g.vertex_count:
        raise ValueError(f"root {root} out of range [0, {g.vertex_count})")
    mask = _as_mask(g, restrict)
    if mask is not None and not mask[root]:
        raise ValueError(f"root {root} not in the restriction set")
    level = [UNREACHED] * g.vertex_count
    parent: list[Optional[int]] = [None] * g.vertex_count
    level[root] = 0
    queue = deque([root])
    adj = g.adjacency
    while queue:
        x = queue.popleft()
        lx = level[x] + 1
        for w in adj[x]:
            if level[w] == UNREACHED and (mask is None or mask[w]):
                level[w] = lx
                parent[w] = x
                queue.append(w)
    return BfsLayering(root, tuple(level), tuple(parent))


def distances_from(g: Graph, root: int) -> list[int]:
    """Plain BFS distances in the whole graph (-1 where unreachable)."""
    level = [UNREACHED] * g.vertex_count
    level[root] = 0
    queue = deque([root])
    adj = g.adjacency
    while queue:
        x = queue.popleft()
        lx = level[x] + 1
        for w in adj[x]:
            if level[w] == UNREACHED:
                level[w] = lx
                queue.append(w)
    return level


def connected_components(g: Graph, restrict: Optional[Iterable[int]] = None) -> list[list[int]]:
    """Maximal connected vertex sets of the (induced) graph, each sorted, ordered by minimum vertex."""
    mask = _as_mask(g, restrict)
    seen = [False] * g.vertex_count
    comps = []
    adj = g.adjacency
    for s in range(g.vertex_count):
        if seen[s] or (mask is not None and not mask[s]):
            continue
        seen[s] = True
        comp = [s]
        stack = [s]
        while stack:
            x = stack.pop()
            for w in adj[x]:
                if not seen[w] and (mask is None or mask[w]):
                    seen[w] = True
                    comp.append(w)
                    stack.append(w)
        comp.sort()
        comps.append(comp)
    return comps


def eccentricity(g: Graph, v: int, restrict: Optional[Iterable[int]] = None) -> float:
    lay = bfs(g, v, restrict)
    members = list(restrict) if restrict is not None else range(g.vertex_count)
    worst = 0
    for w in members:
        lw = lay.level[w]
        if lw == UNREACHED:
            return math.inf
        worst = max(worst, lw)
    return worst


def induced_diameter(g: Graph, cluster: Sequence[int]) -> float:
    """Largest shortest-path distance inside the subgraph induced by ``cluster``.

    Returns ``math.inf`` when the induced subgraph is disconnected.
    """
    members = list(cluster)
    if len(members) <= 1:
        return 0
    mask = [False] * g.vertex_count
    for v in members:
        mask[v] = True
    adj = g.adjacency
    n_c = len(members)
    best = 0
    level = [UNREACHED] * g.vertex_count
    for s in members:
        for v in members:
            level[v] = UNREACHED
        level[s] = 0
        queue = deque([s])
        count = 1
        far = 0
        while queue:
            x = queue.popleft()
            lx = level[x] + 1
            for w in adj[x]:
                if mask[w] and level[w] == UNREACHED:
                    level[w] = lx
                    far = lx
                    count += 1
                    queue.append(w)
        if count < n_c:
            return math.inf
        best = max(best, far)
    return best


def diameter(g: Graph) -> float:
    return induced_diameter(g, range(g.vertex_count))


def all_pairs_distances(g: Graph, vertices: Optional[Sequence[int]] = None) -> np.ndarray:
    """Dense distance matrix of the subgraph induced by ``vertices`` (rows follow ``vertices``).

    Unreachable pairs are ``inf``. Backed by scipy's unweighted shortest paths.
    """
    verts = list(range(g.vertex_count)) if vertices is None else list(vertices)
    index = {v: i for i, v in enumerate(verts)}
    if len(verts) <= 64:
        return _all_pairs_small(g, verts, index)

    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import shortest_path

    rows, cols = [], []
    for v in verts:
        i = index[v]
        for w in g.adjacency[v]:
            j = index.get(w)
            if j is not None:
                rows.append(i)
                cols.append(j)
    k = len(verts)
    mat = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(k, k))
    return shortest_path(mat, method="D", directed=False, unweighted=True)


def _all_pairs_small(g: Graph, verts: list[int], index: dict[int, int]) -> np.ndarray:
    # scipy's sparse setup dominates for tiny clusters; expand BFS frontiers as boolean matrices instead
    k = len(verts)
    adj = np.zeros((k, k), dtype=bool)
    for i, v in enumerate(verts):
        for w in g.adjacency[v]:
            j = index.get(w)
            if j is not None:
                adj[i, j] = True
    out = np.full((k, k), np.inf)
    np.fill_diagonal(out, 0.0)
    seen = np.eye(k, dtype=bool)
    frontier = seen.copy()
    step = 0
    while frontier.any():
        step += 1
        frontier = (frontier.astype(np.uint8) @ adj.astype(np.uint8)).astype(bool) & ~seen
        out[frontier] = step
        seen |= frontier
    return out


def planarity_warning(g: Graph) -> bool:
    """Warn (and return True) when the edge count rules out planarity."""
    n = g.vertex_count
    if n >= 3 and g.edge_count > 3 * n - 6:
        warnings.warn(
            f"graph has {g.edge_count} edges > 3n-6 = {3 * n - 6}; it cannot be planar "
            "and the decomposition bounds do not apply",
            stacklevel=2,
        )
        return True
    return False


# -- generators ---------------------------------------------------------------

def path_graph(n: int) -> Graph:
    if n < 1:
        raise ValueError("path needs n >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def grid_graph(w: int, h: int) -> Graph:
    """``h`` rows by ``w`` columns; vertex (row i, column j) is ``i*w + j``."""
    if w < 1 or h < 1:
        raise ValueError("grid needs w, h >= 1")
    edges = []
    for i in range(h):
        for j in range(w):
            v = i * w + j
            if j + 1 < w:
                edges.append((v, v + 1))
            if i + 1 < h:
                edges.append((v, v + w))
    return Graph.from_edges(w * h, edges)


def star_graph(n: int) -> Graph:
    """Hub 0 joined to leaves ``1..n-1``."""
    if n < 1:
        raise ValueError("star needs n >= 1")
    return Graph.from_edges(n, [(0, i) for i in range(1, n)])


def gen_graph(kind: str, **kw) -> Graph:
    if kind == "path":
        return path_graph(kw["n"])
    if kind == "grid":
        return grid_graph(kw["w"], kw["h"])
    if kind == "star":
        return star_graph(kw["n"])
    raise ValueError(f"unknown graph kind {kind!r}")


# -- file formats -------------------------------------------------------------

def parse_edge_list(text: str) -> Graph:
    edges = []
    max_id = -1
    declared = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            # optional "# n=<count>" header keeps trailing isolated vertices
            body = line[1:].strip()
            if body.startswith("n="):
                try:
                    declared = int(body[2:])
                except ValueError:
                    raise GraphFormatError(f"line {lineno}: bad vertex-count header {raw!r}") from None
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer vertex id in {raw!r}") from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: negative vertex id")
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop at {u}")
        edges.append((u, v))
        max_id = max(max_id, u, v)
    return Graph.from_edges(max(max_id + 1, declared), edges)


def graph_to_dict(g: Graph) -> dict:
    out = {"n": g.vertex_count, "edges": [list(e) for e in g.edges()]}
    if g.labels is not None:
        out["labels"] = list(g.labels)
    return out


def graph_from_dict(obj: dict) -> Graph:
    try:
        n = int(obj["n"])
        raw_edges = obj["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"graph JSON needs integer 'n' and list 'edges': {exc}") from None
    seen = set()
    edges = []
    for i, e in enumerate(raw_edges):
        if not (isinstance(e, (list, tuple)) and len(e) == 2):
            raise GraphFormatError(f"edges[{i}]: expected [u, v], got {e!r}")
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"edges[{i}]: vertex out of range for n={n}")
        if u == v:
            raise GraphFormatError(f"edges[{i}]: self-loop at {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"edges[{i}]: duplicate edge {key}")
        seen.add(key)
        edges.append(key)
    labels = obj.get("labels")
    if labels is not None and len(labels) != n:
        raise GraphFormatError("labels must have length n")
    return Graph.from_edges(n, edges, labels)


def load_graph(data, format: str = "json") -> Graph:
    """Parse a graph from ``bytes``/``str`` in ``edge_list`` or ``json`` format."""
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    if format == "edge_list":
        return parse_edge_list(text)
    if format == "json":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        if "adjacency" in obj:
            return _graph_from_adjacency(obj)
        return graph_from_dict(obj)
    raise ValueError(f"unknown graph format {format!r}")


def _graph_from_adjacency(obj: dict) -> Graph:
    # {"adjacency": [[nbrs of 0], ...]} must be symmetric; we never symmetrize silently.
    adj = obj["adjacency"]
    n = len(adj)
    for u, nbrs in enumerate(adj):
        for w in nbrs:
            if not 0 <= w < n:
                raise GraphFormatError(f"adjacency[{u}]: neighbor {w} out of range")
            if u not in adj[w]:
                raise GraphFormatError(f"asymmetric adjacency: {w} in adjacency[{u}] but {u} not in adjacency[{w}]")
    edges = [(u, w) for u, nbrs in enumerate(adj) for w in nbrs if u < w]
    return Graph.from_edges(n, edges, obj.get("labels"))


def save_graph(g: Graph, format: str = "json") -> bytes:
    if format == "edge_list":
        lines = [f"# n={g.vertex_count}"] + [f"{u} {v}" for u, v in g.edges()]
        return ("\n".join(lines) + "\n").encode("utf-8")
    if format == "json":
        return json.dumps(graph_to_dict(g)).encode("utf-8")
    raise ValueError(f"unknown graph format {format!r}")
