"""Signed weighted directed trust graphs in dual CSR form.

A graph stores each edge twice: once in the successor index (row-major,
for out-neighbour sums and system-matrix rows) and once in the
predecessor index (column-major, for incoming evaluations and PageRank).
Weights are nonzero, lie in [-1, 1], and an ordered pair carries at most
one edge. Node ids are dense 0..n-1 in first-appearance order of the
labels, so the same input file always produces the same indexing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GraphBuildError


@dataclass(frozen=True)
class GraphDiagnostics:
    """Read-only summary emitted by :func:`validate`."""

    n_nodes: int
    n_edges: int
    weight_min: float | None
    weight_max: float | None
    n_sinks: int
    n_isolated: int
    dropped_self_loops: int


class SignedDigraph:
    """Immutable signed weighted digraph.

    Construct via :func:`build_graph` (label records) or
    :func:`from_arrays` (pre-indexed edges). Instances are safe for
    concurrent reads; nothing mutates after ``__init__``.
    """

    __slots__ = (
        "n",
        "labels",
        "succ_ptr",
        "succ_idx",
        "succ_wt",
        "pred_ptr",
        "pred_idx",
        "pred_wt",
        "dropped_self_loops",
        "_label_to_id",
    )

    def __init__(self, n, labels, src, dst, wt, dropped_self_loops=0):
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        wt = np.asarray(wt, dtype=np.float64)
        if not (src.shape == dst.shape == wt.shape):
            raise GraphBuildError("edge arrays must have matching lengths")
        self.n = int(n)
        self.labels = tuple(labels)
        if len(self.labels) != self.n:
            raise GraphBuildError("label count must equal node count")
        self._label_to_id = {lab: i for i, lab in enumerate(self.labels)}
        self.dropped_self_loops = int(dropped_self_loops)

        if wt.size:
            if np.any(~np.isfinite(wt)):
                raise GraphBuildError("edge weights must be finite")
            if np.any((wt < -1.0) | (wt > 1.0)):
                bad = int(np.argmax((wt < -1.0) | (wt > 1.0)))
                raise GraphBuildError(
                    f"weight out of range [-1, 1] on edge "
                    f"({self.labels[src[bad]]!r}, {self.labels[dst[bad]]!r}, {wt[bad]})"
                )
            if np.any(wt == 0.0):
                bad = int(np.argmax(wt == 0.0))
                raise GraphBuildError(
                    f"zero weight on edge ({self.labels[src[bad]]!r}, "
                    f"{self.labels[dst[bad]]!r}); drop zero-weight records first"
                )
            if np.any(src == dst):
                raise GraphBuildError("self-loops must be dropped before construction")
            if src.min() < 0 or src.max() >= self.n or dst.min() < 0 or dst.max() >= self.n:
                raise GraphBuildError("edge endpoint out of range")
            pair_keys = src * self.n + dst
            if np.unique(pair_keys).size != pair_keys.size:
                order = np.argsort(pair_keys, kind="stable")
                dup_pos = order[np.nonzero(np.diff(pair_keys[order]) == 0)[0][0]]
                raise GraphBuildError(
                    f"duplicate edge ({self.labels[src[dup_pos]]!r}, "
                    f"{self.labels[dst[dup_pos]]!r}); dedupe records first"
                )

        self.succ_ptr, self.succ_idx, self.succ_wt = _to_csr(self.n, src, dst, wt)
        self.pred_ptr, self.pred_idx, self.pred_wt = _to_csr(self.n, dst, src, wt)
        for arr in (self.succ_ptr, self.succ_idx, self.succ_wt,
                    self.pred_ptr, self.pred_idx, self.pred_wt):
            arr.setflags(write=False)

    @classmethod
    def from_arrays(cls, n, src, dst, wt, labels=None, dropped_self_loops=0):
        """Build from integer endpoint arrays; labels default to str ids."""
        if labels is None:
            labels = [str(i) for i in range(n)]
        return cls(n, labels, src, dst, wt, dropped_self_loops)

    @property
    def n_edges(self):
        return int(self.succ_idx.size)

    def node_id(self, label):
        return self._label_to_id[label]

    def successors(self, i):
        """(neighbour ids, weights) of out-edges of node i."""
        self._check_index(i)
        lo, hi = self.succ_ptr[i], self.succ_ptr[i + 1]
        return self.succ_idx[lo:hi], self.succ_wt[lo:hi]

    def predecessors(self, i):
        """(neighbour ids, weights) of in-edges of node i, true edge weights."""
        self._check_index(i)
        lo, hi = self.pred_ptr[i], self.pred_ptr[i + 1]
        return self.pred_idx[lo:hi], self.pred_wt[lo:hi]

    def out_strengths(self):
        """Vector d with d[i] = sum of |weight| over successors of i."""
        d = np.zeros(self.n)
        np.add.at(d, np.repeat(np.arange(self.n), np.diff(self.succ_ptr)), np.abs(self.succ_wt))
        return d

    def out_degrees(self):
        """Unweighted successor counts."""
        return np.diff(self.succ_ptr).astype(np.int64)

    def in_trust_sums(self, absolute=False):
        """Column sums of the adjacency matrix, signed or absolute."""
        vals = np.abs(self.pred_wt) if absolute else self.pred_wt
        s = np.zeros(self.n)
        np.add.at(s, np.repeat(np.arange(self.n), np.diff(self.pred_ptr)), vals)
        return s

    def edge_arrays(self):
        """(src, dst, weight) arrays in successor-index order."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.succ_ptr))
        return src, self.succ_idx.copy(), self.succ_wt.copy()

    def edge_list(self):
        """Labelled (src, dst, weight) triples in successor-index order."""
        src, dst, wt = self.edge_arrays()
        return [(self.labels[i], self.labels[j], float(w)) for i, j, w in zip(src, dst, wt)]

    def same_graph(self, other):
        """Equality as a labelled graph: same label set, same labelled edges."""
        if set(self.labels) != set(other.labels):
            return False
        mine = {(a, b): w for a, b, w in self.edge_list()}
        theirs = {(a, b): w for a, b, w in other.edge_list()}
        return mine == theirs

    def _check_index(self, i):
        if not 0 <= i < self.n:
            raise IndexError(f"node index {i} out of range [0, {self.n})")


def _to_csr(n, rows, cols, vals):
    order = np.argsort(rows, kind="stable")
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(ptr, rows + 1, 1)
    np.cumsum(ptr, out=ptr)
    return ptr, cols[order].astype(np.int64), vals[order].astype(np.float64)


def build_graph(edge_records):
    """Assemble a :class:`SignedDigraph` from (src_label, dst_label, weight) triples.

    Labels are indexed in first-appearance order (src before dst within a
    record). Self-loops are dropped and counted; duplicates and
    out-of-range or zero weights are rejected.
    """
    labels = []
    index = {}

    def intern(label):
        if not isinstance(label, str) or not label:
            raise GraphBuildError(f"node label must be a nonempty string, got {label!r}")
        if label not in index:
            index[label] = len(labels)
            labels.append(label)
        return index[label]

    src, dst, wt = [], [], []
    dropped = 0
    for rec in edge_records:
        a, b, w = rec[0], rec[1], rec[2]
        i, j = intern(a), intern(b)
        if i == j:
            dropped += 1
            continue
        src.append(i)
        dst.append(j)
        wt.append(float(w))

    return SignedDigraph(len(labels), labels,
                         np.array(src, dtype=np.int64),
                         np.array(dst, dtype=np.int64),
                         np.array(wt, dtype=np.float64),
                         dropped_self_loops=dropped)


def out_strength(g, i):
    """Sum of absolute out-edge weights of node i (0 for sinks)."""
    g._check_index(i)
    _, w = g.successors(i)
    return float(np.abs(w).sum())


def in_trust_sum(g, i, absolute=False):
    """Incoming weight sum of node i; absolute=True sums |weights|."""
    g._check_index(i)
    _, w = g.predecessors(i)
    return float(np.abs(w).sum() if absolute else w.sum())


class LaplacianView:
    """Row access to L = D - A with D the absolute out-strength diagonal."""

    def __init__(self, g):
        self.graph = g
        self.out_strength = g.out_strengths()

    def row(self, i):
        """(column ids, values) of row i of L, diagonal entry first."""
        cols, wts = self.graph.successors(i)
        out_cols = np.concatenate(([i], cols))
        out_vals = np.concatenate(([self.out_strength[i]], -wts))
        return out_cols, out_vals

    def apply_ones(self, i):
        """Row i of L applied to the all-ones vector: d_ii - sum_j a_ij."""
        _, vals = self.row(i)
        return float(vals.sum())


def laplacian(g):
    return LaplacianView(g)


def validate(g):
    """Non-mutating diagnostics: counts, weight range, sinks, isolated nodes."""
    if g.n == 0:
        return GraphDiagnostics(0, 0, None, None, 0, 0, g.dropped_self_loops)
    out_deg = np.diff(g.succ_ptr)
    in_deg = np.diff(g.pred_ptr)
    wmin = float(g.succ_wt.min()) if g.succ_wt.size else None
    wmax = float(g.succ_wt.max()) if g.succ_wt.size else None
    return GraphDiagnostics(
        n_nodes=g.n,
        n_edges=g.n_edges,
        weight_min=wmin,
        weight_max=wmax,
        n_sinks=int(np.count_nonzero(out_deg == 0)),
        n_isolated=int(np.count_nonzero((out_deg == 0) & (in_deg == 0))),
        dropped_self_loops=g.dropped_self_loops,
    )
