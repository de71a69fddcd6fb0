"""Canonical undirected weighted graphs and their matrix views.

Edges are stored once, as ``(i, j, w)`` with ``i < j``, sorted by ``(i, j)``.
That order is the edge index ``k`` used by every per-edge vector in the
package, and the orientation ``i -> j`` is the one used by the incidence
matrix (``+1`` at the tail ``i``, ``-1`` at the head ``j``).
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TextIO, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _cc

from .errors import ValidationError

log = logging.getLogger(__name__)

EDGE_VECTOR_KINDS = ("gradient", "resistance", "weight")


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected graph with positive edge weights and a fixed edge order.

    Use :meth:`from_edges` to build one from arbitrary ``(i, j, w)`` triples;
    the plain constructor expects arrays that are already canonical and only
    validates them.
    """

    n: int
    tails: np.ndarray
    heads: np.ndarray
    weights: np.ndarray
    labels: Optional[tuple] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tails", _frozen(self.tails, np.int64))
        object.__setattr__(self, "heads", _frozen(self.heads, np.int64))
        object.__setattr__(self, "weights", _frozen(self.weights, np.float64))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
        self._validate()

    def _validate(self):
        n, t, h, w = self.n, self.tails, self.heads, self.weights
        if n < 0:
            raise ValidationError("vertex count must be non-negative", "graph-core")
        if not (t.shape == h.shape == w.shape) or t.ndim != 1:
            raise ValidationError("tails, heads and weights must be 1-d and equal length", "graph-core")
        if t.size:
            if t.min() < 0 or h.max() >= n:
                raise ValidationError("vertex index out of range [0, n)", "graph-core")
            if np.any(t >= h):
                raise ValidationError("edges must satisfy tail < head (no self-loops)", "graph-core")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise ValidationError("edge weights must be finite and positive", "graph-core")
            key = t * n + h
            if np.any(np.diff(key) <= 0):
                raise ValidationError("edges must be sorted by (tail, head) without duplicates", "graph-core")
        if self.labels is not None and len(self.labels) != n:
            raise ValidationError("label map must have one entry per vertex", "graph-core")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence], labels=None) -> "Graph":
        """Build a graph from ``(i, j)`` or ``(i, j, w)`` items in any orientation.

        Mirror duplicates are merged when their weights agree; conflicting
        weights, self-loops and non-positive weights raise ValidationError.
        """
        merged: dict = {}
        for e in edges:
            i, j = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            _check_edge(i, j, w)
            key = (i, j) if i < j else (j, i)
            prev = merged.get(key)
            if prev is not None and prev != w:
                raise ValidationError(
                    f"duplicate edge {key} with conflicting weights {prev} and {w}", "graph-core"
                )
            merged[key] = w
        keys = sorted(merged)
        tails = [k[0] for k in keys]
        heads = [k[1] for k in keys]
        weights = [merged[k] for k in keys]
        return cls(n, tails, heads, weights, labels)

    # -- basic views -------------------------------------------------------

    @property
    def m(self) -> int:
        return int(self.tails.size)

    @property
    def edges(self) -> list:
        return [(int(i), int(j), float(w)) for i, j, w in zip(self.tails, self.heads, self.weights)]

    def label(self, v: int):
        return v if self.labels is None else self.labels[v]

    def index_of(self, label) -> int:
        """Dense vertex index for an external id (identity when there is no label map)."""
        if self.labels is None:
            v = int(label)
            if not 0 <= v < self.n:
                raise ValidationError(f"vertex {label!r} not in graph", "graph-core")
            return v
        lookup = self._cache.get("label_index")
        if lookup is None:
            lookup = {str(lab): k for k, lab in enumerate(self.labels)}
            self._cache["label_index"] = lookup
        try:
            return lookup[str(label)]
        except KeyError:
            raise ValidationError(f"vertex {label!r} not in graph", "graph-core") from None

    def with_weights(self, weights) -> "Graph":
        """Same topology and labels, new edge weights."""
        w = np.asarray(weights, dtype=float)
        if w.shape != (self.m,):
            raise ValidationError(f"expected {self.m} weights, got shape {w.shape}", "graph-core")
        return Graph(self.n, self.tails, self.heads, w, self.labels)

    def unit_weighted(self) -> "Graph":
        return self.with_weights(np.ones(self.m))

    def same_topology(self, other: "Graph") -> bool:
        return (
            self.n == other.n
            and np.array_equal(self.tails, other.tails)
            and np.array_equal(self.heads, other.heads)
        )

    # -- matrices ------------------------------------------------------------

    def adjacency_sparse(self) -> sp.csr_matrix:
        """Symmetric CSR adjacency with sorted column indices in every row."""
        A = self._cache.get("A_csr")
        if A is None:
            rows = np.concatenate([self.tails, self.heads])
            cols = np.concatenate([self.heads, self.tails])
            vals = np.concatenate([self.weights, self.weights])
            A = sp.csr_matrix((vals, (rows, cols)), shape=(self.n, self.n))
            A.sort_indices()
            self._cache["A_csr"] = A
        return A

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        A[self.tails, self.heads] = self.weights
        A[self.heads, self.tails] = self.weights
        return A

    def degrees(self) -> np.ndarray:
        """Weighted degrees (row sums of the adjacency matrix)."""
        d = np.zeros(self.n)
        np.add.at(d, self.tails, self.weights)
        np.add.at(d, self.heads, self.weights)
        return d

    def edge_counts(self) -> np.ndarray:
        """Number of incident edges per vertex, ignoring weights."""
        return np.bincount(np.concatenate([self.tails, self.heads]), minlength=self.n)

    def neighbors(self, v: int) -> np.ndarray:
        A = self.adjacency_sparse()
        return A.indices[A.indptr[v]:A.indptr[v + 1]]

    def laplacian(self) -> np.ndarray:
        return laplacian(self)

    def incidence(self) -> np.ndarray:
        return incidence(self)

    def isolated_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.edge_counts() == 0)

    def validation_report(self) -> list:
        """Non-fatal findings worth surfacing to a user (currently isolated vertices)."""
        notes = []
        iso = self.isolated_vertices()
        if iso.size:
            shown = ", ".join(str(self.label(int(v))) for v in iso[:10])
            more = "" if iso.size <= 10 else f" (+{iso.size - 10} more)"
            notes.append(f"{iso.size} isolated vertices (unreachable by diffusion): {shown}{more}")
        return notes


def _check_edge(i, j, w, lineno=None):
    where = f"line {lineno}: " if lineno is not None else ""
    if i == j:
        raise ValidationError(f"{where}self-loop on vertex {i}", "graph-core")
    if not np.isfinite(w) or w <= 0:
        raise ValidationError(f"{where}non-positive weight {w}", "graph-core")


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of every vertex to one of ``q`` non-empty clusters."""

    q: int
    assignment: np.ndarray

    def __post_init__(self):
        a = _frozen(self.assignment, np.int64)
        object.__setattr__(self, "assignment", a)
        if self.q < 1:
            raise ValidationError("partition needs at least one cluster", "graph-core")
        if a.ndim != 1 or (a.size and (a.min() < 0 or a.max() >= self.q)):
            raise ValidationError(f"cluster ids must lie in [0, {self.q})", "graph-core")
        empty = np.flatnonzero(np.bincount(a, minlength=self.q) == 0)
        if empty.size:
            raise ValidationError(f"clusters {empty.tolist()} have no vertices", "graph-core")

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        """Relabel arbitrary cluster ids to dense ``0..q-1`` in sorted order."""
        uniq = sorted(set(labels), key=_sort_key)
        remap = {c: k for k, c in enumerate(uniq)}
        return cls(len(uniq), [remap[c] for c in labels])

    @property
    def n(self) -> int:
        return int(self.assignment.size)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.q)

    def members(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == j)

    def check_graph(self, g: Graph):
        if self.n != g.n:
            raise ValidationError(
                f"partition covers {self.n} vertices but graph has {g.n}", "graph-core"
            )

    def indicator_basis(self) -> np.ndarray:
        """n x q matrix whose column j is the unit vector uniform on cluster j."""
        U = np.zeros((self.n, self.q))
        U[np.arange(self.n), self.assignment] = 1.0
        return U / np.sqrt(self.sizes())


class EdgeVector:
    """Real values over the edges of a graph, in canonical edge order.

    ``kind`` is one of ``gradient``, ``resistance`` or ``weight``; resistances
    must be non-negative and weights must lie in (0, 1].
    """

    __slots__ = ("values", "kind")

    def __init__(self, values, kind: str):
        if kind not in EDGE_VECTOR_KINDS:
            raise ValidationError(f"unknown edge vector kind {kind!r}", "graph-core")
        v = np.array(values, dtype=float)
        if v.ndim != 1:
            raise ValidationError("edge vector must be 1-d", "graph-core")
        if kind == "resistance" and np.any(v < 0):
            raise ValidationError("resistance values must be non-negative", "graph-core")
        if kind == "weight" and np.any((v <= 0) | (v > 1)):
            raise ValidationError("weight values must lie in (0, 1]", "graph-core")
        v.setflags(write=False)
        self.values = v
        self.kind = kind

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __getitem__(self, k):
        return self.values[k]

    def __repr__(self):
        return f"EdgeVector(kind={self.kind!r}, m={self.values.size})"

    def check_graph(self, g: Graph):
        if self.values.size != g.m:
            raise ValidationError(
                f"edge vector has {self.values.size} entries, graph has {g.m} edges", "graph-core"
            )


# -- operations -------------------------------------------------------------


def laplacian(g: Graph) -> np.ndarray:
    """Dense ``L = D - A``."""
    L = -g.adjacency()
    L[np.diag_indices(g.n)] = g.degrees()
    return L


def laplacian_sparse(g: Graph) -> sp.csr_matrix:
    return (sp.diags(g.degrees()) - g.adjacency_sparse()).tocsr()


def incidence(g: Graph) -> np.ndarray:
    """n x m oriented incidence: column k is ``e_tail - e_head``.

    ``B @ diag(w) @ B.T`` reproduces the Laplacian.
    """
    B = np.zeros((g.n, g.m))
    k = np.arange(g.m)
    B[g.tails, k] = 1.0
    B[g.heads, k] = -1.0
    return B


def partitioned_graph(g: Graph, p: Partition) -> Graph:
    """Drop every edge whose endpoints fall in different clusters."""
    p.check_graph(g)
    a = p.assignment
    keep = a[g.tails] == a[g.heads]
    return Graph(g.n, g.tails[keep], g.heads[keep], g.weights[keep], g.labels)


def connected_components(g: Graph) -> tuple:
    """``(count, per-vertex component id)``."""
    count, comp = _cc(g.adjacency_sparse(), directed=False)
    return int(count), comp


# -- file formats -----------------------------------------------------------


def _sort_key(x):
    # numeric ids sort numerically, everything else after them as text
    try:
        return (0, int(x), "")
    except (TypeError, ValueError):
        return (1, 0, str(x))


def _as_text(source: Union[str, TextIO]) -> Iterable[str]:
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def load_edge_list(source: Union[str, TextIO], format: str = "auto") -> Graph:
    """Parse a SNAP-style edge list.

    ``source`` is the file content or an open text stream.  Each non-comment
    line holds ``i j`` (``unweighted``), ``i j w`` (``weighted``) or either
    (``auto``).  Vertex ids are arbitrary tokens; they are remapped to dense
    indices (numeric ids in numeric order) and kept as ``Graph.labels``.
    """
    if format not in ("auto", "weighted", "unweighted"):
        raise ValidationError(f"unknown edge-list format {format!r}", "graph-core")
    raw = []
    ids = set()
    for lineno, line in enumerate(_as_text(source), start=1):
        s = line.strip()
        if not s or s.startswith("#") or s.startswith("%"):
            continue
        tok = s.split()
        ok = {"auto": (2, 3), "weighted": (3,), "unweighted": (2,)}[format]
        if len(tok) not in ok:
            raise ValidationError(
                f"line {lineno}: expected {' or '.join(map(str, ok))} fields, got {len(tok)}",
                "graph-core",
            )
        try:
            w = float(tok[2]) if len(tok) == 3 else 1.0
        except ValueError:
            raise ValidationError(f"line {lineno}: bad weight {tok[2]!r}", "graph-core") from None
        if tok[0] == tok[1]:
            raise ValidationError(f"line {lineno}: self-loop on vertex {tok[0]}", "graph-core")
        _check_edge(0, 1, w, lineno)
        raw.append((tok[0], tok[1], w, lineno))
        ids.add(tok[0])
        ids.add(tok[1])

    ordered = sorted(ids, key=_sort_key)
    index = {v: k for k, v in enumerate(ordered)}
    labels = tuple(int(v) if _sort_key(v)[0] == 0 else v for v in ordered)

    merged: dict = {}
    for a, b, w, lineno in raw:
        i, j = index[a], index[b]
        key = (i, j) if i < j else (j, i)
        prev = merged.get(key)
        if prev is not None and prev != w:
            raise ValidationError(
                f"line {lineno}: duplicate edge ({a}, {b}) with conflicting weights {prev} and {w}",
                "graph-core",
            )
        merged[key] = w
    keys = sorted(merged)
    g = Graph(
        len(ordered),
        [k[0] for k in keys],
        [k[1] for k in keys],
        [merged[k] for k in keys],
        labels,
    )
    for note in g.validation_report():
        log.warning(note)
    return g


def read_edge_list(path, format: str = "auto") -> Graph:
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh, format)


def dump_edge_list(g: Graph) -> str:
    """Serialize as ``label_i label_j w`` lines (weights round-trip exactly)."""
    out = io.StringIO()
    for i, j, w in zip(g.tails, g.heads, g.weights):
        out.write(f"{g.label(int(i))} {g.label(int(j))} {float(w)!r}\n")
    return out.getvalue()


def load_partition(source: Union[str, TextIO], g: Graph) -> Partition:
    """Parse ``vertex_id cluster_id`` lines; every vertex of ``g`` must appear once."""
    clusters: list = [None] * g.n
    for lineno, line in enumerate(_as_text(source), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        tok = s.split()
        if len(tok) != 2:
            raise ValidationError(f"partition line {lineno}: expected 2 fields", "graph-core")
        try:
            v = g.index_of(tok[0])
        except ValidationError as exc:
            raise ValidationError(f"partition line {lineno}: {exc}", "graph-core") from None
        if clusters[v] is not None and clusters[v] != tok[1]:
            raise ValidationError(
                f"partition line {lineno}: vertex {tok[0]} assigned twice", "graph-core"
            )
        clusters[v] = tok[1]
    missing = [g.label(v) for v, c in enumerate(clusters) if c is None]
    if missing:
        raise ValidationError(f"partition misses vertices {missing[:10]}", "graph-core")
    return Partition.from_labels(clusters)


def read_partition(path, g: Graph) -> Partition:
    with open(path, encoding="utf-8") as fh:
        return load_partition(fh, g)
