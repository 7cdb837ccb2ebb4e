import math

import networkx as nx
import pytest
from hypothesis import given, strategies as st
from scipy import stats as sps

from fairdecomp.decompositions import (
    ALGORITHMS,
    Decomposition,
    LddConfig,
    RootPolicy,
    _T_KPR,
    clusters_connected,
    decompose,
    diameter_bound,
    grid_axis_ldd,
    is_partition,
    kpr,
    kpr_randwts,
    mixture_branch,
    mixture_weight,
    randwts_bands,
    sample_kappa,
    sample_radius,
)
from fairdecomp.graph import Graph, grid_graph, induced_diameter, path_graph
from fairdecomp.rng import Stream

CONNECTED_ALGOS = ("kpr", "kpr_plus", "randwts", "two_cuts", "rand_radius", "mixed_rand_radius")


@st.composite
def planar_graphs(draw):
    """Random edge subsets of small grids (planar, possibly disconnected)."""
    w = draw(st.integers(1, 7))
    h = draw(st.integers(1, 7))
    full = grid_graph(w, h).edges()
    keep = draw(st.lists(st.booleans(), min_size=len(full), max_size=len(full)))
    return Graph.from_edges(w * h, [e for e, k in zip(full, keep) if k])


def _cfg(algo, R, seed):
    return LddConfig(R=R, algorithm=algo, seed=seed, with_prefix=seed % 2 == 1, alpha=0.5)


@given(planar_graphs(), st.sampled_from(CONNECTED_ALGOS), st.integers(2, 6), st.integers(0, 2**32))
def test_partition_connected_and_bounded(g, algo, R, seed):
    cfg = _cfg(algo, R, seed)
    d = decompose(g, cfg)
    assert is_partition(d, g.vertex_count)
    assert clusters_connected(g, d)
    bound = diameter_bound(cfg)
    assert all(induced_diameter(g, c) <= bound for c in d.clusters)


@given(planar_graphs(), st.integers(1, 6), st.integers(0, 2**32))
def test_clusters_refine_components(g, R, seed):
    d = kpr(g, R, rng=seed)
    comp = {v: i for i, c in enumerate(nx.connected_components(_nx(g))) for v in c}
    for c in d.clusters:
        assert len({comp[v] for v in c}) == 1


def _nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.vertex_count))
    h.add_edges_from(g.edges())
    return h


@given(planar_graphs(), st.integers(1, 6), st.integers(0, 2**32))
def test_single_phase_matches_edge_removal(g, R, seed):
    """One phase on a connected graph equals: drop edges whose lower BFS level is k mod R."""
    h = _nx(g)
    if g.vertex_count < 2 or not nx.is_connected(h):
        return
    k = Stream(seed).child(_T_KPR, 0, 0).randbelow(R)
    lev = nx.single_source_shortest_path_length(h, 0)
    cut = h.copy()
    cut.remove_edges_from([(a, b) for a, b in h.edges() if lev[a] != lev[b] and min(lev[a], lev[b]) % R == k])
    ref = sorted(sorted(c) for c in nx.connected_components(cut))
    assert [list(c) for c in kpr(g, R, phases=1, rng=seed).clusters] == ref


def test_R1_cuts_everything():
    g = grid_graph(4, 4)
    for algo in ("kpr", "randwts"):
        d = decompose(g, LddConfig(R=1, algorithm=algo, seed=3))
        assert len(d) == g.vertex_count


def test_determinism_and_seed_sensitivity():
    g = grid_graph(12, 12)
    for algo in CONNECTED_ALGOS:
        a = decompose(g, _cfg(algo, 4, 5))
        b = decompose(g, _cfg(algo, 4, 5))
        assert a.to_json() == b.to_json()
    outs = {decompose(g, LddConfig(R=4, seed=s)).to_json() for s in range(10)}
    assert len(outs) > 1


def _freq(g, cfg, u, v, trials):
    hits = sum(decompose(g, cfg, Stream(cfg.seed, t)).separates(u, v) for t in range(trials))
    return hits / trials


def _within(p_hat, p, trials, k=4.0):
    return abs(p_hat - p) <= k * math.sqrt(p * (1 - p) / trials)


def test_kpr_path2_hand_value():
    # each phase cuts the single edge with probability 1/2
    assert _within(_freq(path_graph(2), LddConfig(R=2), 0, 1, 4000), 7 / 8, 4000)


def test_randwts_path2_hand_value():
    # per phase: theta in {0, 1} separates with probability 1/2 each, other thetas never
    p = 1 - (4 / 5) ** 3
    assert p == pytest.approx(61 / 125)
    assert _within(_freq(path_graph(2), LddConfig(R=5, algorithm="randwts"), 0, 1, 4000), p, 4000)


def test_rand_radius_path2_hand_value():
    # ceil(r) = 1 with probability 1/2 (always cut), else KPR with R = 2
    cfg = LddConfig(R=2, algorithm="rand_radius")
    assert _within(_freq(path_graph(2), cfg, 0, 1, 4000), 15 / 16, 4000)


def test_randwts_bands_hand_cases():
    # R = 5, theta = 1: only level 1 jitters
    assert randwts_bands([0, 1, 1, 6], 5, 1, [0, 0, 1, 0]) == [-1, -1, 0, 0]
    assert randwts_bands([0, 1], 5, 0, [1, 0]) == [0, 0]


@pytest.mark.parametrize("eps", [0.25, 0.5, 1.0])
def test_kappa_distribution(eps):
    R = 10
    s = Stream(int(eps * 100))
    xs = [sample_kappa(eps, R, s) for _ in range(4000)]
    assert all(0 < x <= R for x in xs)
    assert sps.kstest(xs, lambda t: (t / R) ** eps).pvalue > 1e-3


@pytest.mark.parametrize("alpha", [0.0, 1.0, 3.0])
def test_radius_distribution(alpha):
    R = 7
    s = Stream(int(alpha * 10) + 1)
    xs = [sample_radius(alpha, R, s) for _ in range(4000)]
    assert sps.kstest(xs, lambda t: (t / R) ** (1 + alpha)).pvalue > 1e-3


def test_mixture_weight_and_branch():
    assert mixture_weight(0.3, 16) == 0.3
    assert mixture_weight(0.0, 16) == 0.25
    with pytest.raises(ValueError):
        mixture_weight(0.0, 1)
    frac = sum(mixture_branch(16, 0.0, Stream(9, t)) == "rand_radius" for t in range(4000)) / 4000
    assert _within(frac, 0.25, 4000)


def test_grid_axis_blocks():
    w, h, R = 9, 7, 3
    g = grid_graph(w, h)
    for seed in range(20):
        d = grid_axis_ldd(g, w, h, R, seed)
        for c in d.clusters:
            rows = {v // w for v in c}
            cols = {v % w for v in c}
            assert len(c) == len(rows) * len(cols)  # a full rectangle
            assert max(rows) - min(rows) < R and max(cols) - min(cols) < R
    # a horizontal edge is cut exactly when the column offset lands on it: probability 1/R
    cfg = LddConfig(R=R, algorithm="grid_axis", grid_shape=(w, h))
    assert _within(_freq(g, cfg, 30, 31, 3000), 1 / R, 3000)
    with pytest.raises(ValueError):
        grid_axis_ldd(path_graph(6), 3, 2, 2)


def test_adversarial_policy_prefers_listed_roots():
    pol = RootPolicy.prefer(5, 2)
    label = [0] * 6
    assert pol.choose(range(6), label, 0, Stream(0)) == 5
    label[5] = 1
    assert pol.choose([0, 1, 2, 3, 4], label, 0, Stream(0)) == 2
    assert RootPolicy().choose([4, 2, 9], [0] * 10, 0, Stream(0)) == 2
    picks = {RootPolicy("uniform_random").choose([1, 2, 3], [0] * 4, 0, Stream(0, t)) for t in range(50)}
    assert picks == {1, 2, 3}


def test_randwts_with_random_roots_still_connected():
    g = grid_graph(10, 10)
    d = kpr_randwts(g, 4, RootPolicy("uniform_random"), 1)
    assert clusters_connected(g, d)


@pytest.mark.parametrize("kw", [
    dict(R=0), dict(R=2.5), dict(R=3, algorithm="nope"), dict(R=3, phases=0), dict(R=3, eps=0),
    dict(R=3, eps=1.5), dict(R=3, alpha=-1), dict(R=3, algorithm="mixed_rand_radius", alpha=2),
    dict(R=1, algorithm="mixed_rand_radius"), dict(R=1, algorithm="embed"), dict(R=3, algorithm="grid_axis"),
])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        LddConfig(**kw)


def test_root_policy_validation():
    with pytest.raises(ValueError):
        RootPolicy("weird")
    with pytest.raises(ValueError):
        RootPolicy("preference")
    with pytest.raises(ValueError):
        kpr(path_graph(3), 2, policy=RootPolicy.prefer(7))


def test_phase_defaults():
    assert LddConfig(R=3).n_phases == 3
    assert LddConfig(R=3, algorithm="kpr_plus").n_phases == 4
    assert set(ALGORITHMS) >= {"kpr", "randwts", "two_cuts", "rand_radius", "mixed_rand_radius", "embed"}


def test_decomposition_json_round_trip():
    g = grid_graph(6, 6)
    d = decompose(g, LddConfig(R=3, algorithm="randwts", seed=4))
    back = Decomposition.from_json(d.to_json())
    assert back == d
    assert back.params.algorithm == "randwts"


def test_from_clusters_errors():
    with pytest.raises(ValueError):
        Decomposition.from_clusters(3, [[0, 1], [1, 2]])
    with pytest.raises(ValueError):
        Decomposition.from_clusters(3, [[0, 1]])
    d = Decomposition.from_clusters(4, [[3, 1], [0], [2]])
    assert d.clusters == ((0,), (1, 3), (2,))
    assert d.separates(0, 1) and not d.separates(1, 3)


def test_empty_and_singleton_graphs():
    for algo in CONNECTED_ALGOS:
        d = decompose(Graph.from_edges(1, []), LddConfig(R=3, algorithm=algo))
        assert d.clusters == ((0,),)


def test_kappa_reference_moments():
    s = Stream(42)
    xs = [sample_kappa(1.0, 10, s) for _ in range(20000)]
    mean = sum(xs) / len(xs)
    assert abs(mean - 5.0) <= 3 * (10 / math.sqrt(12)) / math.sqrt(len(xs))
    ys = [sample_kappa(0.5, 100, s) for _ in range(20000)]
    frac = sum(y <= 25 for y in ys) / len(ys)
    assert _within(frac, 0.5, len(ys), 3.0)


def test_mixture_extremes():
    assert all(mixture_branch(9, 1.0, Stream(t)) == "rand_radius" for t in range(200))
    kpr_frac = sum(mixture_branch(4, 0.0, Stream(1, t)) == "kpr" for t in range(10000)) / 10000
    assert _within(kpr_frac, 0.5, 10000, 3.0)


def test_grid_axis_window_for_short_pairs():
    w = h = 10
    R = 5
    g = grid_graph(w, h)
    cfg = LddConfig(R=R, algorithm="grid_axis", grid_shape=(w, h), seed=2)
    trials = 3000
    for u, v in [(22, 24), (22, 44), (22, 55)]:
        d = abs(u // w - v // w) + abs(u % w - v % w)
        rho = d / R
        p = _freq(g, cfg, u, v, trials)
        slack = 4 * math.sqrt(0.25 / trials)
        assert rho / 2 - slack <= p <= rho + slack


def test_kpr_upper_bound_on_grid():
    from fairdecomp.stats import estimate_separation
    g = grid_graph(12, 12)
    pairs = [(50, 51), (50, 62), (50, 53), (50, 75)]
    cfg = LddConfig(R=6, seed=3)
    for e in estimate_separation(g, cfg, pairs, 1500, 0.99):
        assert e.p_hat <= 3 * e.rho + e.half_width
