"""Dense symmetric eigendecomposition and eigenvalue-gap cluster counting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError

#: Largest matrix the dense path accepts; bigger graphs must use the resolvent
#: or Neumann approximations in :mod:`modal_barrier.resistance`.
MAX_DENSE_N = 2000

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 60
#: ``method="auto"`` uses the Jacobi solver up to this size and LAPACK above it.
JACOBI_AUTO_MAX_N = 128


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return int(self.eigenvalues.size)

    def block(self, q: int) -> np.ndarray:
        """First ``q`` eigenvectors as an n x q matrix."""
        if not 1 <= q <= self.n:
            raise ValidationError(f"q must lie in [1, {self.n}], got {q}", "spectral")
        return self.eigenvectors[:, :q]

    def projector(self, q: int) -> np.ndarray:
        U = self.block(q)
        return U @ U.T

    def zero_tolerance(self) -> float:
        return 1e-9 * max(1.0, float(self.eigenvalues[-1]))

    def zero_multiplicity(self, tol: float | None = None) -> int:
        tol = self.zero_tolerance() if tol is None else tol
        return int(np.count_nonzero(self.eigenvalues <= tol))


def _round_robin(N: int):
    """Yield N-1 rounds of N/2 disjoint pairs covering every pair exactly once."""
    players = list(range(N))
    for _ in range(N - 1):
        half = N // 2
        yield np.array(players[:half]), np.array(players[N - 1:half - 1:-1])
        players = [players[0], players[-1]] + players[1:-1]


def jacobi_eigh(S: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigensolver for a dense symmetric matrix.

    Rotations are scheduled in round-robin order so every round touches
    disjoint index pairs; those rotations commute and are applied together
    with array operations.  Sweeps continue until the off-diagonal Frobenius
    norm drops below ``tol * ||S||_F``.

    Returns unsorted ``(eigenvalues, eigenvectors)``.
    """
    A = np.array(S, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    if n < 2:
        return np.diag(A).copy(), V
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return np.zeros(n), V
    N = n + (n % 2)
    rounds = []
    for P, Q in _round_robin(N):
        keep = (P < n) & (Q < n)
        rounds.append((P[keep], Q[keep]))

    diag = np.diag_indices(n)

    def off_norm():
        D = A.copy()
        D[diag] = 0.0
        return np.linalg.norm(D)

    for _ in range(max_sweeps):
        if off_norm() < tol * scale:
            break
        for P, Q in rounds:
            apq = A[P, Q]
            active = np.abs(apq) > 1e-300
            if not np.any(active):
                continue
            P, Q, apq = P[active], Q[active], apq[active]
            app, aqq = A[P, P], A[Q, Q]
            theta = (aqq - app) / (2.0 * apq)
            big = np.abs(theta) > 1e150
            th = np.where(big, 1.0, theta)
            t = np.sign(th) / (np.abs(th) + np.sqrt(th * th + 1.0))
            t = np.where(big, 0.5 / np.where(big, theta, 1.0), t)
            t[theta == 0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            # A <- J^T A J, V <- V J with J[p,p]=J[q,q]=c, J[p,q]=s, J[q,p]=-s
            rp, rq = A[P, :], A[Q, :]
            A[P, :] = c[:, None] * rp - s[:, None] * rq
            A[Q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = A[:, P], A[:, Q]
            A[:, P] = cp * c - cq * s
            A[:, Q] = cp * s + cq * c
            # the rotated diagonal is more accurate from the closed form
            A[P, P] = app - t * apq
            A[Q, Q] = aqq + t * apq
            A[P, Q] = 0.0
            A[Q, P] = 0.0
            vp, vq = V[:, P], V[:, Q]
            V[:, P] = vp * c - vq * s
            V[:, Q] = vp * s + vq * c
    else:
        if off_norm() >= tol * scale:
            raise NumericalError(
                f"Jacobi did not converge in {max_sweeps} sweeps", "spectral"
            )
    return np.diag(A).copy(), V


def _fix_signs(V: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column positive (ties: lowest index)."""
    mag = np.abs(V)
    top = mag.max(axis=0)
    # first row within rounding of the column maximum
    idx = np.argmax(mag >= top - 1e-12 * np.maximum(top, 1.0), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def eigendecompose(L: np.ndarray, method: str = "auto") -> Spectrum:
    """Eigendecomposition of a symmetric matrix (typically a graph Laplacian).

    ``method`` is ``"jacobi"`` (the in-package solver), ``"lapack"``
    (``numpy.linalg.eigh``) or ``"auto"`` (Jacobi up to
    ``JACOBI_AUTO_MAX_N`` vertices, LAPACK beyond).  Eigenvalues within ``1e-12 * max(1, lambda_max)``
    of zero are snapped to exactly zero.
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValidationError("matrix must be square", "spectral")
    n = L.shape[0]
    if n > MAX_DENSE_N:
        raise ValidationError(
            f"n={n} exceeds the dense eigensolver budget ({MAX_DENSE_N}); "
            "use the approx-i or approx-ii resistance methods instead",
            "spectral",
        )
    if n and np.max(np.abs(L - L.T)) > 1e-12 * max(1.0, np.max(np.abs(L))):
        raise ValidationError("matrix is not symmetric", "spectral")
    if method == "auto":
        method = "jacobi" if n <= JACOBI_AUTO_MAX_N else "lapack"
    if method == "jacobi":
        w, V = jacobi_eigh(L)
    elif method == "lapack":
        w, V = np.linalg.eigh(L)
    else:
        raise ValidationError(f"unknown eigensolver {method!r}", "spectral")
    order = np.argsort(w, kind="stable")
    w, V = w[order], V[:, order]
    if n:
        w[np.abs(w) <= 1e-12 * max(1.0, abs(w[-1]))] = 0.0
    return Spectrum(w, _fix_signs(V))


def default_max_q(n: int) -> int:
    return min(n - 1, 32)


def gap_scores(s: Spectrum, max_q: int | None = None) -> np.ndarray:
    """Relative gaps ``(lam_i - lam_{i-1}) / (lam_i + delta)`` for ``i = 0..max_q``.

    Entries 0 and 1 are set to ``nan``: index 0 has no predecessor and index 1
    always scores ~1 on a connected graph because ``lam_0 = 0``.
    """
    lam = s.eigenvalues
    max_q = default_max_q(s.n) if max_q is None else int(max_q)
    if not 2 <= max_q <= s.n - 1:
        raise ValidationError(f"max_q must lie in [2, {s.n - 1}], got {max_q}", "spectral")
    delta = 1e-9 * lam[-1]
    i = np.arange(2, max_q + 1)
    scores = np.full(max_q + 1, np.nan)
    denom = lam[i] + delta
    with np.errstate(invalid="ignore", divide="ignore"):
        scores[i] = np.where(denom > 0, (lam[i] - lam[i - 1]) / denom, 0.0)
    return scores


def detect_q(s: Spectrum, max_q: int | None = None) -> int:
    """Cluster count from the largest relative eigenvalue gap in ``[2, max_q]``.

    Ties go to the smaller index.  Raises NumericalError when no index has a
    meaningful gap (e.g. a complete graph, whose non-zero eigenvalues coincide).
    """
    scores = gap_scores(s, max_q)
    best = int(np.nanargmax(scores))
    if not scores[best] > 1e-9:
        raise NumericalError("no gap found in the eigenvalue sequence", "spectral")
    return best


def spectrum_of(g, method: str = "auto") -> Spectrum:
    """Eigendecompose the Laplacian of ``g``; results are cached on the graph."""
    key = ("spectrum", method)
    cached = g._cache.get(key)
    if cached is None:
        cached = eigendecompose(g.laplacian(), method)
        g._cache[key] = cached
    return cached
