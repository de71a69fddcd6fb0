"""Edge resistances from the low Laplacian modes, and the weights derived from them.

Three routes compute the q-aggregated resistance ``r_k = sum_{l<q} (u_l[j] - u_l[i])**2``
on every edge ``k = (i, j)``:

* ``exact``: from the first q eigenvectors.
* ``approx-i``: the projector onto those eigenvectors is replaced by the
  resolvent ``eps * (eps*I + L)^-1``; no eigendecomposition and no q.
* ``approx-ii``: the resolvent is replaced by the truncated Neumann series
  ``sum_{t<=p} Ahat^t (eps*I + D)^-1`` with ``Ahat = (eps*I + D)^-1 A``,
  which only needs neighbour-to-neighbour products (see
  :mod:`modal_barrier.distributed` for the message-passing version).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import ValidationError
from .graph import EdgeVector, Graph
from .spectral import Spectrum, spectrum_of

DEFAULT_EPSILON = 0.1
DEFAULT_EPSILON_B = 0.01


def default_p(n: int) -> int:
    return int(math.ceil(n / 2))


@dataclass(frozen=True)
class ApproxConfig:
    epsilon: float = DEFAULT_EPSILON
    p: Optional[int] = None  # None means ceil(n/2)
    epsilon_b: float = DEFAULT_EPSILON_B

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValidationError("epsilon must be positive", "resistance")
        if not self.epsilon_b > 0:
            raise ValidationError("epsilon_b must be positive", "resistance")
        if self.p is not None and self.p < 0:
            raise ValidationError("p must be non-negative", "resistance")

    def p_for(self, g: Graph) -> int:
        return default_p(g.n) if self.p is None else int(self.p)


def mode_gradient(g: Graph, u) -> EdgeVector:
    """Head-minus-tail difference of a vertex distribution on every edge."""
    u = np.asarray(u, dtype=float)
    if u.shape != (g.n,):
        raise ValidationError(f"distribution must have length {g.n}", "resistance")
    return EdgeVector(u[g.heads] - u[g.tails], "gradient")


def _edge_quadratic(g: Graph, M: np.ndarray) -> np.ndarray:
    """``diag(B^T M B)`` for symmetric M: ``M_ii - 2 M_ij + M_jj`` per edge."""
    i, j = g.tails, g.heads
    return M[i, i] - M[i, j] - M[j, i] + M[j, j]


def aggregated_resistance_exact(
    g: Graph, q: int, spectrum: Optional[Spectrum] = None, method: str = "auto"
) -> EdgeVector:
    """Sum over the first ``q`` eigenvectors of the squared edge gradients."""
    s = spectrum_of(g, method) if spectrum is None else spectrum
    if not 1 <= q <= g.n:
        raise ValidationError(f"q must lie in [1, {g.n}], got {q}", "resistance")
    U = s.block(q)
    d = U[g.heads] - U[g.tails]
    return EdgeVector(np.einsum("kl,kl->k", d, d), "resistance")


def epsilon_for(a_hat: float, alpha_hat: float, q: int) -> float:
    """Resolvent shift matched to a target average relative outgoing weight.

    ``sqrt(2q) * a_hat / sqrt(alpha_hat * sqrt(1 - alpha_hat**2))``.
    """
    if not 0 < alpha_hat < 1:
        raise ValidationError("alpha_hat must lie in (0, 1)", "resistance")
    if not a_hat > 0:
        raise ValidationError("a_hat must be positive", "resistance")
    if q < 1:
        raise ValidationError("q must be at least 1", "resistance")
    return math.sqrt(2 * q) * a_hat / math.sqrt(alpha_hat * math.sqrt(1 - alpha_hat**2))


def resolvent(g: Graph, epsilon: float) -> np.ndarray:
    """Dense ``(eps*I + L)^-1`` via a Cholesky factorization."""
    if not epsilon > 0:
        raise ValidationError("epsilon must be positive", "resistance")
    M = g.laplacian()
    M[np.diag_indices(g.n)] += epsilon
    return sla.cho_solve(sla.cho_factor(M, lower=True), np.eye(g.n))


def aggregated_resistance_approx1(g: Graph, epsilon: float = DEFAULT_EPSILON) -> EdgeVector:
    """``eps * diag(B^T (eps*I + L)^-1 B)``."""
    R = resolvent(g, epsilon)
    r = epsilon * _edge_quadratic(g, R)
    return EdgeVector(np.maximum(r, 0.0), "resistance")


def normalized_adjacency(g: Graph, epsilon: float) -> sp.csr_matrix:
    """Left-normalized adjacency ``(eps*I + D)^-1 A`` with sorted row indices."""
    A = g.adjacency_sparse()
    scale = 1.0 / (epsilon + g.degrees())
    vals = A.data * np.repeat(scale, np.diff(A.indptr))
    Ahat = sp.csr_matrix((vals, A.indices.copy(), A.indptr.copy()), shape=A.shape)
    Ahat.has_sorted_indices = True
    return Ahat


def spectral_radius_bound(g: Graph, epsilon: float) -> float:
    """Exact ``||Ahat||_inf``, the max row sum ``D_i / (eps + D_i)``.

    The row sum grows with the degree, so this equals ``1 / (1 + eps/d_max)``
    for the largest weighted degree and is always below 1.
    """
    if not epsilon > 0:
        raise ValidationError("epsilon must be positive", "resistance")
    d = g.degrees()
    return float(np.max(d / (epsilon + d))) if g.n else 0.0


def rho_upper_bound(g: Graph, epsilon: float) -> float:
    d_max = float(g.degrees().max()) if g.n else 0.0
    return 1.0 / (1.0 + epsilon / d_max) if d_max > 0 else 0.0


def partial_sum_norm_bound(rho: float, N: int) -> float:
    """Bound on ``||S_N||_inf``: ``(1 - rho**(N+1)) / (1 - rho)``."""
    return (1.0 - rho ** (N + 1)) / (1.0 - rho)


def tail_norm_bound(rho: float, N: int) -> float:
    """Bound on ``||S_inf - S_N||_inf``: ``rho**(N+1) / (1 - rho)``."""
    return rho ** (N + 1) / (1.0 - rho)


def neumann_partial_sum(g: Graph, epsilon: float, p: int, strategy: str = "auto") -> np.ndarray:
    """Dense ``S_p = sum_{t=0}^{p} Ahat^t``.

    ``power`` forms each power as ``Ahat @ previous`` (sparse rows, switching
    to dense storage once the powers fill in) and accumulates them in order,
    mirroring the per-vertex recursion exactly.  ``doubling`` uses
    ``S_{2k} = S_k + Ahat^k S_k`` with dense BLAS products and is much faster
    for large graphs.  ``auto`` picks ``power`` up to 1000 vertices.
    """
    if p < 0:
        raise ValidationError("p must be non-negative", "resistance")
    Ahat = normalized_adjacency(g, epsilon)
    if strategy == "auto":
        strategy = "power" if g.n <= 1000 else "doubling"
    if strategy == "power":
        return _partial_sum_power(Ahat, p)
    if strategy == "doubling":
        return _partial_sum_doubling(Ahat, p)
    raise ValidationError(f"unknown partial-sum strategy {strategy!r}", "resistance")


def _partial_sum_power(Ahat: sp.csr_matrix, p: int) -> np.ndarray:
    n = Ahat.shape[0]
    S = np.eye(n)
    P = sp.identity(n, format="csr")
    dense = False
    for _ in range(p):
        P = Ahat @ P
        if not dense and P.nnz > 0.1 * n * n:
            P = P.toarray()
            dense = True
        if dense:
            S += P
        else:
            S += P.toarray()
    return S


def _partial_sum_doubling(Ahat: sp.csr_matrix, p: int) -> np.ndarray:
    n = Ahat.shape[0]
    Ad = Ahat.toarray()
    # G = sum_{t<k} Ahat^t, P = Ahat^k, built over the bits of k = p + 1
    k = p + 1
    G = np.eye(n)
    P = Ad.copy()
    for bit in bin(k)[3:]:
        G = G + P @ G
        P = P @ P
        if bit == "1":
            G = G + P
            P = Ad @ P
    return G


def _edge_values_from_partial_sum(g: Graph, S: np.ndarray, epsilon: float, paper_literal: bool):
    i, l = g.tails, g.heads
    d = g.degrees()
    Sll = S[l, l] * (epsilon if paper_literal else 1.0)
    return epsilon * ((S[i, i] - S[l, i]) / (epsilon + d[i]) + (Sll - S[i, l]) / (epsilon + d[l]))


def aggregated_resistance_approx2(
    g: Graph,
    epsilon: float = DEFAULT_EPSILON,
    p: Optional[int] = None,
    strategy: str = "auto",
    paper_literal: bool = False,
):
    """``eps * diag(B^T S_p (eps*I + D)^-1 B)`` with the Neumann partial sum ``S_p``.

    ``paper_literal`` multiplies the ``S_ll`` term by an extra ``eps``, as in
    the printed closing line of the per-vertex algorithm.  It exists only for
    comparison, can go negative, and is returned as a plain array.
    """
    if not epsilon > 0:
        raise ValidationError("epsilon must be positive", "resistance")
    p = default_p(g.n) if p is None else int(p)
    S = neumann_partial_sum(g, epsilon, p, strategy)
    r = _edge_values_from_partial_sum(g, S, epsilon, paper_literal)
    if paper_literal:
        return r
    return EdgeVector(np.maximum(r, 0.0), "resistance")


def barrier_weights(r, epsilon_b: float = DEFAULT_EPSILON_B) -> EdgeVector:
    """``eps_b / (eps_b + r_k)``: 1 on zero-resistance edges, small on barriers."""
    r = np.asarray(r, dtype=float)
    if not epsilon_b > 0:
        raise ValidationError("epsilon_b must be positive", "resistance")
    if np.any(r < 0):
        raise ValidationError("resistance values must be non-negative", "resistance")
    return EdgeVector(epsilon_b / (epsilon_b + r), "weight")


def shuffle_weights(w, seed: int) -> EdgeVector:
    """Uniformly random permutation of the weights (same multiset, new edges).

    Uses numpy's PCG64 seeded through ``SeedSequence(seed)``; the permutation
    is a Fisher-Yates shuffle.
    """
    w = np.asarray(w, dtype=float)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))
    return EdgeVector(w[rng.permutation(w.size)], "weight")


def unit_weights(g: Graph) -> EdgeVector:
    return EdgeVector(np.ones(g.m), "weight")


METHODS = ("exact", "approx-i", "approx-ii")


def compute_resistance(
    g: Graph,
    method: str = "exact",
    q: Optional[int] = None,
    epsilon: float = DEFAULT_EPSILON,
    p: Optional[int] = None,
    paper_literal: bool = False,
) -> EdgeVector:
    """Dispatch to one of the centralized resistance routes by name.

    ``q=None`` with the exact method means "detect q from the spectral gap".
    """
    if method == "exact":
        s = spectrum_of(g)
        if q is None:
            from .spectral import detect_q

            q = detect_q(s)
        return aggregated_resistance_exact(g, q, s)
    if method == "approx-i":
        return aggregated_resistance_approx1(g, epsilon)
    if method == "approx-ii":
        return aggregated_resistance_approx2(g, epsilon, p, paper_literal=paper_literal)
    raise ValidationError(f"unknown resistance method {method!r}", "resistance")
