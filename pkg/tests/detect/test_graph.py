import numpy as np
import pytest
from numpy import testing
from scipy import sparse

from geoscale.detect.graph import (
    Partition,
    SimilarityGraph,
    louvain_single_pass,
    modularity,
)


def two_triangles():
    # triangles {0, 1, 2} and {3, 4, 5} joined by the weak edge 2-3
    i = [0, 0, 1, 3, 3, 4, 2]
    j = [1, 2, 2, 4, 5, 5, 3]
    w = [1, 1, 1, 1, 1, 1, 0.1]
    return SimilarityGraph.from_edges(6, i, j, w)


def restricted_growth(n):
    """Every set partition of range(n) as a label list."""
    if n == 0:
        yield []
        return

    def rec(prefix, top):
        if len(prefix) == n:
            yield list(prefix)
            return
        for c in range(top + 2):
            yield from rec(prefix + [c], max(top, c))

    yield from rec([0], 0)


def brute_force_q(g):
    A = g.W.toarray()
    k = A.sum(axis=1)
    m2 = A.sum()
    B = (A - np.outer(k, k) / m2) / m2
    best = -np.inf
    for p in restricted_growth(g.n):
        labels = np.array(p)
        best = max(best, float(B[labels[:, None] == labels[None, :]].sum()))
    return best


def planted(seed, sizes=(3, 3, 2)):
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(len(sizes)), sizes)
    n = labels.size
    i, j, w = [], [], []
    for a in range(n):
        for b in range(a + 1, n):
            if labels[a] == labels[b]:
                weight = rng.uniform(1.0, 2.0)
            elif rng.random() < 0.3:
                weight = rng.uniform(0.0, 0.2)
            else:
                continue
            if weight > 0:
                i.append(a)
                j.append(b)
                w.append(weight)
    return SimilarityGraph.from_edges(n, i, j, w)


def test_similarity_graph():
    g = two_triangles()
    assert g.n == 6
    assert g.n_edges == 7
    assert g.total_weight == pytest.approx(12.2)
    testing.assert_allclose(g.degrees, [2, 2, 2.1, 2.1, 2, 2])
    idx, w = g.neighbors(2)
    testing.assert_array_equal(idx, [0, 1, 3])
    testing.assert_allclose(w, [1, 1, 0.1])
    i, j, w = g.edges()
    testing.assert_array_equal(i, [0, 0, 1, 2, 3, 3, 4])
    testing.assert_array_equal(j, [1, 2, 2, 3, 4, 5, 5])
    assert np.all(i < j)


def test_similarity_graph_invalid():
    with pytest.raises(ValueError, match="self-loops"):
        SimilarityGraph.from_edges(3, [0], [0], [1.0])
    with pytest.raises(ValueError, match="non-positive"):
        SimilarityGraph.from_edges(3, [0], [1], [-1.0])
    with pytest.raises(ValueError, match="not symmetric"):
        SimilarityGraph(sparse.csr_matrix(np.array([[0, 1.0], [0, 0]])))
    with pytest.raises(ValueError, match="shape"):
        SimilarityGraph(sparse.csr_matrix((2, 3)))


def test_edge_list(tmp_path):
    g = two_triangles()
    fname = tmp_path / "graph.txt"
    g.to_edge_list(fname)
    lines = fname.read_text().splitlines()
    assert len(lines) == 7
    assert lines[0] == "0 1 1.0"
    h = SimilarityGraph.read_edge_list(fname)
    assert (h.W != g.W).nnz == 0
    fname.write_text("")
    assert SimilarityGraph.read_edge_list(fname, n=4).n_edges == 0


def test_partition():
    p = Partition.from_labels([7, 7, 3, 9, 3])
    testing.assert_array_equal(p.labels, [0, 0, 1, 2, 1])
    assert p.n_communities == 3
    assert len(p) == 5
    comms = [c.tolist() for c in p.communities()]
    assert comms == [[0, 1], [2, 4], [3]]
    assert Partition.singletons(3).n_communities == 3
    assert list(Partition.singletons(0).communities()) == []


def test_modularity():
    g = two_triangles()
    m2 = 12.2
    # each triangle has 6 internal ordered weight and total degree 6.1
    expected = 2 * (6 / m2 - (6.1 / m2) ** 2)
    assert modularity(g, [0, 0, 0, 1, 1, 1]) == pytest.approx(expected)
    assert modularity(g, np.zeros(6, dtype=int)) == pytest.approx(0.0)
    with pytest.raises(ValueError, match="partition size"):
        modularity(g, [0, 1])
    with pytest.raises(ValueError):
        modularity(SimilarityGraph.from_edges(3, [], [], []), [0, 1, 2])


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_modularity_formula(seed):
    rng = np.random.default_rng(seed)
    n = 7
    A = np.triu(rng.uniform(0, 1, (n, n)) * (rng.random((n, n)) < 0.5), 1)
    A = A + A.T
    g = SimilarityGraph(A)
    labels = rng.integers(0, 3, n)
    m2 = A.sum()
    k = A.sum(axis=1)
    q = sum(
        A[a, b] - k[a] * k[b] / m2
        for a in range(n) for b in range(n) if labels[a] == labels[b]
    ) / m2
    assert modularity(g, labels) == pytest.approx(q)


def test_louvain_two_triangles():
    g = two_triangles()
    for seed in range(5):
        p = louvain_single_pass(g, seed)
        assert p.n_communities == 2
        assert p.labels[0] == p.labels[1] == p.labels[2]
        assert p.labels[3] == p.labels[4] == p.labels[5]
        assert p.modularity == pytest.approx(brute_force_q(g))


def test_louvain_deterministic():
    g = planted(4)
    a = louvain_single_pass(g, seed=11)
    b = louvain_single_pass(g, seed=11)
    testing.assert_array_equal(a.labels, b.labels)
    assert a.modularity == b.modularity


@pytest.mark.parametrize("seed", range(5))
def test_louvain_weight_scaling(seed):
    # a power of two scales every gain exactly
    g = planted(seed)
    p = louvain_single_pass(g, seed)
    scaled = louvain_single_pass(SimilarityGraph(g.W * 4.0), seed)
    testing.assert_array_equal(scaled.labels, p.labels)
    assert scaled.modularity == pytest.approx(p.modularity)


SIZES = [(2, 2), (2, 3), (3, 3), (4, 4), (2, 2, 2), (2, 2, 3), (3, 3, 2), (2, 2, 2, 2)]


@pytest.mark.parametrize("seed", range(50))
def test_louvain_near_optimum(seed):
    g = planted(seed, SIZES[seed % len(SIZES)])
    p = louvain_single_pass(g, seed)
    assert p.modularity == pytest.approx(modularity(g, p))
    assert p.modularity >= 0.95 * brute_force_q(g)


def test_louvain_isolated_vertices():
    g = SimilarityGraph.from_edges(4, [0], [1], [0.5])
    p = louvain_single_pass(g)
    assert p.labels[0] == p.labels[1]
    assert len(set(p.labels.tolist())) == 3
    with pytest.raises(ValueError, match="no edges"):
        louvain_single_pass(SimilarityGraph.from_edges(3, [], [], []))
