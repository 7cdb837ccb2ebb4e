"""Planar graphs on which KPR with a fixed root preference never separates a pair.

Layout for distance ``d`` (every "path" below has length exactly ``d``):

* a cycle ``u - r1 - v - r2 - u`` made of four paths,
* a spoke path from every cycle vertex to ``r0`` (the cycle sits at level d
  of the BFS tree from ``r0``),
* the straight path ``u = p_0, ..., p_d = v``, drawn outside the cycle,
* a path from every interior ``p_j`` to ``r1`` on one side of the straight
  path and to ``r2`` on the other side.

For ``d = 1`` this is K5 minus the edge r1-r2. Marked vertices get ids
``r0=0, r1=1, r2=2, u=3, v=4`` so that the ``min_id`` root policy agrees
with the adversarial preference ``r0 > r1 > r2`` on the whole graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .graph import Graph, GraphFormatError, distances_from, graph_from_dict, graph_to_dict

R0, R1, R2, U, V = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class MarkedGraph:
    graph: Graph
    u: int
    v: int
    r0: int
    r1: int
    r2: int
    d: int

    @property
    def roots(self) -> tuple[int, int, int]:
        return (self.r0, self.r1, self.r2)

    def marks(self) -> dict:
        return {"u": self.u, "v": self.v, "r0": self.r0, "r1": self.r1, "r2": self.r2, "d": self.d}

    def to_dict(self) -> dict:
        out = graph_to_dict(self.graph)
        out["marks"] = self.marks()
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "MarkedGraph":
        try:
            m = obj["marks"]
            return cls(graph_from_dict(obj), int(m["u"]), int(m["v"]), int(m["r0"]),
                       int(m["r1"]), int(m["r2"]), int(m["d"]))
        except KeyError as exc:
            raise GraphFormatError(f"marked graph JSON missing {exc}") from None


class _Builder:
    def __init__(self, n0: int):
        self.n = n0
        self.edges: list[tuple[int, int]] = []

    def path(self, a: int, b: int, length: int) -> list[int]:
        """Join a to b by a fresh path with ``length`` edges; returns its vertices a..b."""
        verts = [a]
        for _ in range(length - 1):
            verts.append(self.n)
            self.n += 1
        verts.append(b)
        self.edges.extend(zip(verts, verts[1:]))
        return verts


def counterexample(d: int) -> MarkedGraph:
    if d < 1:
        raise ValueError("d must be >= 1")
    b = _Builder(5)
    cycle = []
    for a, c in ((U, R1), (R1, V), (V, R2), (R2, U)):
        cycle.extend(b.path(a, c, d)[:-1])
    for x in cycle:
        b.path(x, R0, d)
    straight = b.path(U, V, d)
    for p in straight[1:-1]:
        b.path(p, R1, d)
    for p in straight[1:-1]:
        b.path(p, R2, d)
    mg = MarkedGraph(Graph.from_edges(b.n, b.edges), U, V, R0, R1, R2, d)
    check_marks(mg)
    return mg


def check_marks(mg: MarkedGraph):
    """Raise if the marked distances are not as designed."""
    du = distances_from(mg.graph, mg.u)
    if du[mg.v] != mg.d:
        raise AssertionError(f"d(u, v) = {du[mg.v]}, expected {mg.d}")
    d0 = distances_from(mg.graph, mg.r0)
    for name in ("u", "v", "r1", "r2"):
        got = d0[getattr(mg, name)]
        if got != mg.d:
            raise AssertionError(f"d(r0, {name}) = {got}, expected {mg.d}")


def attach_stars(mg: MarkedGraph, s0: int, s1: int, s2: int) -> MarkedGraph:
    """Hang ``s_i`` fresh leaves off ``r_i``."""
    if min(s0, s1, s2) < 0:
        raise ValueError("star sizes must be >= 0")
    g = mg.graph
    n = g.vertex_count
    edges = g.edges()
    for hub, count in ((mg.r0, s0), (mg.r1, s1), (mg.r2, s2)):
        edges.extend((hub, n + i) for i in range(count))
        n += count
    return MarkedGraph(Graph.from_edges(n, edges), mg.u, mg.v, mg.r0, mg.r1, mg.r2, mg.d)


def kpr_plus_bound_check(mg: MarkedGraph, R: int, trials: int, seed: int = 0, phases: int = 4,
                         confidence: float = 0.99, workers: int = 1):
    """Estimate Pr[u, v separated] under ``phases``-phase KPR with the adversarial root order.

    With four phases the separation probability is at most 8 (d/R)^4; with
    three it is exactly zero.
    """
    from .decompositions import LddConfig, RootPolicy
    from .stats import estimate_separation

    if R <= 2 * mg.d:
        raise ValueError("the bound needs R > 2d")
    cfg = LddConfig(R=R, algorithm="kpr", phases=phases,
                    root_policy=RootPolicy.prefer(*mg.roots), seed=seed)
    (est,) = estimate_separation(mg.graph, cfg, [(mg.u, mg.v)], trials, confidence, workers=workers)
    return est


def kpr_plus_bound(d: int, R: int) -> float:
    return 8 * (d / R) ** 4
