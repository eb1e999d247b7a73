"""Undirected graphs, GCN-style symmetric normalization, and radius-r
neighborhood similarity (Jaccard overlap of shortest-path balls)."""

from __future__ import annotations

from functools import cached_property
from typing import Iterable

import numpy as np
import scipy.sparse as sp


class Graph:
    """Simple undirected graph on nodes 0..n-1.

    Edges are stored canonically as an (E, 2) int64 array with i < j, sorted
    lexicographically, duplicates removed. Instances are immutable after
    construction; derived matrices are cached.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 1:
            raise ValueError("node count must be positive")
        e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if e.size:
            if e.min() < 0 or e.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(e[:, 0] == e[:, 1]):
                raise ValueError("self-loops are not allowed")
            e = np.unique(np.sort(e, axis=1), axis=0)
        self.n = int(n)
        self.edges = e
        self.edges.setflags(write=False)

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def adjacency(self) -> sp.csr_array:
        """Binary adjacency matrix as float64 CSR."""
        i, j = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([i, j])
        cols = np.concatenate([j, i])
        data = np.ones(rows.shape[0])
        return sp.csr_array((data, (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def degrees(self) -> np.ndarray:
        d = np.zeros(self.n, dtype=np.int64)
        np.add.at(d, self.edges[:, 0], 1)
        np.add.at(d, self.edges[:, 1], 1)
        return d

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.num_edges})"


def sym_normalize(g: Graph) -> sp.csr_array:
    """Self-loop-augmented symmetric normalization D^{-1/2} (A + I) D^{-1/2}.

    D is the diagonal of augmented degrees (1 + deg). The result is exactly
    symmetric: the value for each off-diagonal pair is computed once and
    placed at both (i, j) and (j, i).
    """
    d = g.degrees + 1.0
    inv_sqrt = 1.0 / np.sqrt(d)
    i, j = g.edges[:, 0], g.edges[:, 1]
    off = inv_sqrt[i] * inv_sqrt[j]
    diag_idx = np.arange(g.n)
    rows = np.concatenate([i, j, diag_idx])
    cols = np.concatenate([j, i, diag_idx])
    data = np.concatenate([off, off, 1.0 / d])
    return sp.csr_array((data, (rows, cols)), shape=(g.n, g.n))


def neighborhood_set(g: Graph, i: int, r: int) -> set[int]:
    """Nodes within shortest-path distance r of node i, including i itself.

    Breadth-first search on the unweighted graph, truncated at depth r.
    """
    if not 0 <= i < g.n:
        raise IndexError(f"node index {i} out of range for n={g.n}")
    if r < 1:
        raise ValueError("radius must be at least 1")
    adj = g.adjacency
    indptr, indices = adj.indptr, adj.indices
    seen = {int(i)}
    frontier = [int(i)]
    for _ in range(r):
        nxt = []
        for u in frontier:
            for v in indices[indptr[u]:indptr[u + 1]]:
                v = int(v)
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        if not nxt:
            break
        frontier = nxt
    return seen


def _reachability_within(g: Graph, r: int) -> sp.csr_array:
    """0/1 matrix whose row i marks nodes at distance <= r from i."""
    n = g.n
    i, j = g.edges[:, 0], g.edges[:, 1]
    diag_idx = np.arange(n)
    rows = np.concatenate([i, j, diag_idx])
    cols = np.concatenate([j, i, diag_idx])
    base = sp.csr_array(
        (np.ones(rows.shape[0], dtype=np.int64), (rows, cols)), shape=(n, n)
    )
    reach = base
    for _ in range(r - 1):
        reach = reach @ base
        reach.data[:] = 1  # keep reachability, drop walk counts
    return reach


def r_neighborhood_matrix(g: Graph, r: int) -> np.ndarray:
    """Pairwise Jaccard similarity of radius-r neighborhoods, dense n x n.

    Entry (i, j) is |N_i ∩ N_j| / |N_i ∪ N_j| where N_i is the set of nodes
    within distance r of i (i included, so the diagonal is 1 and the
    denominator is never zero).
    """
    if r < 1:
        raise ValueError("radius must be at least 1")
    reach = _reachability_within(g, r)
    sizes = reach.sum(axis=1)
    inter = (reach @ reach.T).toarray()
    union = sizes[:, None] + sizes[None, :] - inter
    return inter / union


def spmm(a: sp.sparray, x: np.ndarray) -> np.ndarray:
    """Sparse-dense matrix product with an explicit shape check."""
    if a.shape[1] != x.shape[0]:
        raise ValueError(
            f"dimension mismatch: {a.shape[0]}x{a.shape[1]} @ {x.shape[0]}x{x.shape[-1]}"
        )
    return a @ x
