"""Sparse similarity graphs and single-pass Louvain clustering."""

from __future__ import annotations

import numpy as np
from scipy import sparse

from .._logger import logger

__all__ = [
    "SimilarityGraph",
    "Partition",
    "modularity",
    "louvain_single_pass",
]

_min_gain = 1e-12


class SimilarityGraph:
    """Weighted undirected graph stored as a symmetric CSR matrix.

    Self-loops and non-positive weights are rejected.
    """

    def __init__(self, W) -> None:
        W = sparse.csr_matrix(W, dtype=float)
        W.eliminate_zeros()
        if W.shape[0] != W.shape[1]:
            raise ValueError(f"invalid 'W' shape: {W.shape}")
        if W.diagonal().any():
            raise ValueError("invalid 'W': self-loops present")
        if W.nnz and W.data.min() <= 0:
            raise ValueError("invalid 'W': non-positive weights present")
        if abs(W - W.T).sum() > 1e-12 * max(1.0, abs(W).sum()):
            raise ValueError("invalid 'W': not symmetric")
        W.sort_indices()
        self.W = W

    @classmethod
    def from_edges(cls, n, i, j, w) -> SimilarityGraph:
        """Build from upper or lower triangle edge arrays (no duplicates)."""
        i = np.asarray(i, dtype=np.intp)
        j = np.asarray(j, dtype=np.intp)
        w = np.asarray(w, dtype=float)
        if np.any(i == j):
            raise ValueError("invalid edges: self-loops present")
        if w.size and w.min() <= 0:
            raise ValueError("invalid edges: non-positive weights present")
        W = sparse.coo_matrix(
            (np.concatenate([w, w]), (np.concatenate([i, j]), np.concatenate([j, i]))),
            shape=(n, n),
        )
        return cls(W.tocsr())

    @classmethod
    def read_edge_list(cls, fname, n=None) -> SimilarityGraph:
        """Read the 'i j weight' format written by :meth:`to_edge_list`."""
        data = np.loadtxt(fname, ndmin=2)
        if data.size == 0:
            return cls.from_edges(n or 0, [], [], [])
        i, j, w = data[:, 0].astype(int), data[:, 1].astype(int), data[:, 2]
        if n is None:
            n = int(max(i.max(), j.max())) + 1
        return cls.from_edges(n, i, j, w)

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__}: n={self.n}, edges={self.n_edges}>"

    @property
    def n(self):
        return self.W.shape[0]

    @property
    def n_edges(self):
        """Number of undirected edges."""
        return self.W.nnz // 2

    @property
    def total_weight(self):
        """2m: sum of W over all ordered pairs."""
        return float(self.W.sum())

    @property
    def degrees(self):
        return np.asarray(self.W.sum(axis=1)).ravel()

    def neighbors(self, i):
        """(indices, weights) of the neighbors of vertex i."""
        s, e = self.W.indptr[i], self.W.indptr[i + 1]
        return self.W.indices[s:e], self.W.data[s:e]

    def edges(self):
        """Upper-triangle edges as arrays (i, j, w), sorted by (i, j)."""
        U = sparse.triu(self.W, k=1).tocsr()
        U.sort_indices()
        i = np.repeat(np.arange(self.n), np.diff(U.indptr))
        return i, U.indices.copy(), U.data.copy()

    def to_edge_list(self, fname) -> None:
        """Write one 'i j weight' line per undirected edge."""
        i, j, w = self.edges()
        with open(fname, "w", encoding="utf-8") as fp:
            for a, b, c in zip(i, j, w):
                fp.write(f"{a} {b} {float(c)!r}\n")
        logger.info("wrote %d edges to %s", len(w), fname)


class Partition:
    """Community label per vertex, with the modularity of the labelling."""

    def __init__(self, labels, modularity=None) -> None:
        self.labels = np.asarray(labels, dtype=int)
        self.modularity = modularity

    @classmethod
    def from_labels(cls, labels, graph=None) -> Partition:
        """Relabel to 0..k-1 in order of first appearance."""
        labels = np.asarray(labels)
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        rank = np.empty(first.size, dtype=int)
        rank[np.argsort(first, kind="stable")] = np.arange(first.size)
        part = cls(rank[inverse.ravel()])
        if graph is not None and graph.total_weight > 0:
            part.modularity = modularity(graph, part)
        return part

    @classmethod
    def singletons(cls, n) -> Partition:
        return cls(np.arange(n))

    def __repr__(self) -> str:
        return (
            f"<{self.__class__.__name__}: n={len(self)}, "
            f"communities={self.n_communities}, Q={self.modularity}>"
        )

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_communities(self):
        return int(self.labels.max()) + 1 if len(self.labels) else 0

    def communities(self):
        """Yield sorted member index arrays, one per community label."""
        order = np.argsort(self.labels, kind="stable")
        bounds = np.flatnonzero(np.diff(self.labels[order])) + 1
        yield from np.split(order, bounds) if len(order) else ()


def modularity(g, p) -> float:
    """Newman modularity Q of a partition of a weighted graph."""
    m2 = g.total_weight
    if m2 <= 0:
        raise ValueError("invalid graph: total weight is zero")
    labels = np.asarray(p.labels if isinstance(p, Partition) else p)
    if labels.shape != (g.n,):
        raise ValueError(f"invalid partition size: {labels.shape} for n={g.n}")
    W = g.W.tocoo()
    inside = labels[W.row] == labels[W.col]
    internal = np.bincount(
        labels[W.row][inside], weights=W.data[inside], minlength=labels.max() + 1,
    )
    tot = np.bincount(labels, weights=g.degrees, minlength=labels.max() + 1)
    return float(np.sum(internal / m2 - (tot / m2) ** 2))


def louvain_single_pass(g, seed=0) -> Partition:
    """Phase one of the Louvain method, without graph aggregation.

    Vertices start in singleton communities and are swept in a seeded
    shuffled order; each moves to the neighboring community with the
    largest strictly positive modularity gain (lowest community id on
    ties) until a sweep makes no move.
    """
    n = g.n
    m2 = g.total_weight
    if n == 0 or m2 <= 0:
        raise ValueError("invalid graph: no edges")
    k = g.degrees / m2  # degrees scaled so gains are dimensionless
    W = g.W
    indptr, indices, data = W.indptr, W.indices, W.data / m2
    comm = np.arange(n)
    tot = k.copy()
    order = np.random.default_rng(seed).permutation(n)
    n_sweeps = 0
    moved = True
    while moved:
        moved = False
        n_sweeps += 1
        for i in order:
            s, e = indptr[i], indptr[i + 1]
            if s == e:
                continue
            links = {}
            for j, w in zip(indices[s:e], data[s:e]):
                c = comm[j]
                links[c] = links.get(c, 0.0) + w
            ci = comm[i]
            ki = k[i]
            tot[ci] -= ki
            best = ci
            best_gain = links.get(ci, 0.0) - tot[ci] * ki
            for c in sorted(links):
                gain = links[c] - tot[c] * ki
                if gain > best_gain + _min_gain:
                    best, best_gain = c, gain
            tot[best] += ki
            if best != ci:
                comm[i] = best
                moved = True
    part = Partition.from_labels(comm, g)
    logger.debug(
        "louvain: %d sweeps, %d communities, Q=%.6f",
        n_sweeps, part.n_communities, part.modularity,
    )
    return part
