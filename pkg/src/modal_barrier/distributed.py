"""Message-passing evaluation of the Neumann-series edge resistances.

Each vertex owns one row of ``Ahat^t`` and one row of the running partial sum,
stored sparsely as sorted vertex ids with matching values (:class:`SparseRow`).
In every bulk-synchronous round a vertex
receives the current rows of its neighbours and forms its next row as
``sum_{l in N(i)} A_il / (eps + D_i) * row_l``.  After ``p`` rounds each edge
is evaluated from the partial sums held by its two endpoints only.

The simulation runs the vertices one after another, but every read goes
through :class:`_Network`, which hands out frozen previous-round rows and
counts any attempt to read a vertex that is not a neighbour.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .errors import ValidationError
from .graph import EdgeVector, Graph
from .resistance import default_p


class SparseRow:
    """Associative array from vertex id to value, kept as two sorted arrays."""

    __slots__ = ("indices", "values")

    def __init__(self, indices, values):
        self.indices = np.asarray(indices, dtype=np.int64)
        self.values = np.asarray(values, dtype=float)

    @classmethod
    def unit(cls, i: int) -> "SparseRow":
        return cls([i], [1.0])

    def __len__(self):
        return int(self.indices.size)

    def get(self, j: int, default: float = 0.0) -> float:
        k = np.searchsorted(self.indices, j)
        if k < self.indices.size and self.indices[k] == j:
            return float(self.values[k])
        return default

    def items(self):
        return zip(self.indices.tolist(), self.values.tolist())

    def to_dict(self) -> Dict[int, float]:
        return dict(self.items())

    def plus(self, other: "SparseRow") -> "SparseRow":
        if np.array_equal(self.indices, other.indices):
            return SparseRow(self.indices, self.values + other.values)
        idx = np.union1d(self.indices, other.indices)
        vals = np.zeros(idx.size)
        vals[np.searchsorted(idx, self.indices)] += self.values
        vals[np.searchsorted(idx, other.indices)] += other.values
        return SparseRow(idx, vals)


@dataclass
class NodeState:
    vertex: int
    row: SparseRow
    partial_sum: SparseRow
    round: int = 0


@dataclass
class SimStats:
    rounds: int = 0
    messages: int = 0
    entries: int = 0
    max_row_density: List[int] = field(default_factory=list)
    messages_per_round: List[int] = field(default_factory=list)
    non_neighbor_reads: int = 0

    def as_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "messages": self.messages,
            "entries": self.entries,
            "max_row_density": list(self.max_row_density),
            "messages_per_round": list(self.messages_per_round),
            "non_neighbor_reads": self.non_neighbor_reads,
        }


class _Network:
    """Delivers frozen rows along edges and records what was read."""

    def __init__(self, g: Graph, stats: SimStats):
        self._nbrs = [set(g.neighbors(v).tolist()) for v in range(g.n)]
        self._stats = stats
        self.frozen: List[SparseRow] = []

    def read_row(self, reader: int, owner: int) -> SparseRow:
        if owner != reader and owner not in self._nbrs[reader]:
            self._stats.non_neighbor_reads += 1
        row = self.frozen[owner]
        self._stats.messages += 1
        self._stats.entries += len(row)
        return row

    def read_partial_sum(self, reader: int, owner: int, states: List[NodeState]):
        if owner != reader and owner not in self._nbrs[reader]:
            self._stats.non_neighbor_reads += 1
        return states[owner].partial_sum


def _step(i: int, nbrs, coef, net: _Network, prune: float, scratch, touched) -> SparseRow:
    # neighbours in ascending id order so every entry is summed in a fixed order
    for l, c in zip(nbrs, coef):
        row = net.read_row(i, l)
        scratch[row.indices] += c * row.values
        touched[row.indices] = True
    idx = np.flatnonzero(touched)
    vals = scratch[idx].copy()
    scratch[idx] = 0.0
    touched[idx] = False
    if prune > 0:
        keep = np.abs(vals) >= prune
        idx, vals = idx[keep], vals[keep]
    return SparseRow(idx, vals)


def run_distributed(
    g: Graph,
    epsilon: float = 0.1,
    p: Optional[int] = None,
    prune: float = 0.0,
    paper_literal: bool = False,
    keep_states: bool = False,
):
    """Per-vertex simulation of the truncated Neumann series.

    Returns ``(resistance, stats)``, or ``(resistance, stats, states)`` with
    ``keep_states``.  ``prune`` drops row entries below that magnitude
    (0 keeps every entry).  ``paper_literal`` reproduces the extra ``eps`` on
    the ``S_ll`` term of the printed closing formula, in which case the
    values are returned as a plain array because they may be negative.
    """
    if not epsilon > 0:
        raise ValidationError("epsilon must be positive", "distributed-sim")
    p = default_p(g.n) if p is None else int(p)
    if p < 0:
        raise ValidationError("p must be non-negative", "distributed-sim")
    if prune < 0:
        raise ValidationError("prune threshold must be non-negative", "distributed-sim")

    deg = g.degrees()
    A = g.adjacency_sparse()
    nbrs = [A.indices[A.indptr[i]:A.indptr[i + 1]].tolist() for i in range(g.n)]
    coefs = [
        (A.data[A.indptr[i]:A.indptr[i + 1]] / (epsilon + deg[i])).tolist() for i in range(g.n)
    ]
    states = [NodeState(i, SparseRow.unit(i), SparseRow.unit(i)) for i in range(g.n)]
    stats = SimStats()
    net = _Network(g, stats)
    scratch = np.zeros(g.n)
    touched = np.zeros(g.n, dtype=bool)

    for t in range(1, p + 1):
        sent_before = stats.messages
        net.frozen = [s.row for s in states]
        rows = [_step(i, nbrs[i], coefs[i], net, prune, scratch, touched) for i in range(g.n)]
        # barrier: every vertex has its new row before any partial sum changes
        for s, row in zip(states, rows):
            s.row = row
            s.partial_sum = s.partial_sum.plus(row)
            s.round = t
        stats.rounds = t
        stats.messages_per_round.append(stats.messages - sent_before)
        stats.max_row_density.append(max((len(r) for r in rows), default=0))

    r = np.empty(g.m)
    for k, (i, l) in enumerate(zip(g.tails.tolist(), g.heads.tolist())):
        Si = net.read_partial_sum(i, i, states)
        Sl = net.read_partial_sum(i, l, states)
        s_ll = Sl.get(l, 0.0) * (epsilon if paper_literal else 1.0)
        r[k] = epsilon * (
            (Si.get(i, 0.0) - Sl.get(i, 0.0)) / (epsilon + deg[i])
            + (s_ll - Si.get(l, 0.0)) / (epsilon + deg[l])
        )
    out = r if paper_literal else EdgeVector(np.maximum(r, 0.0), "resistance")
    if keep_states:
        return out, stats, states
    return out, stats
