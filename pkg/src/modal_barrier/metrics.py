"""Partition quality measures and executable checks of the bounds that relate them
to the Laplacian spectrum.

Every ``check_*`` function returns a :class:`BoundReport` carrying both sides
of an inequality, so callers can tabulate slack instead of only pass/fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ValidationError
from .graph import Graph, Partition
from .resistance import aggregated_resistance_exact, epsilon_for, resolvent
from .spectral import Spectrum, spectrum_of

BOUND_TOL = 1e-9


@dataclass(frozen=True)
class BoundReport:
    """Both sides of ``lhs <= rhs``.

    ``status`` is ``"satisfied"``, ``"violated"`` or ``"vacuous"`` (the
    hypotheses fail, e.g. a zero eigenvalue in a denominator or ``alpha >= 1``;
    then lhs/rhs may be ``nan``).
    """

    name: str
    lhs: float
    rhs: float
    status: str
    inputs: dict = field(default_factory=dict)
    reason: str = ""

    @property
    def satisfied(self) -> bool:
        return self.status == "satisfied"

    @property
    def vacuous(self) -> bool:
        return self.status == "vacuous"

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


def _report(name, lhs, rhs, inputs, tol=BOUND_TOL):
    status = "satisfied" if lhs <= rhs + tol else "violated"
    return BoundReport(name, float(lhs), float(rhs), status, inputs)


def _vacuous(name, inputs, reason, lhs=math.nan, rhs=math.nan):
    return BoundReport(name, float(lhs), float(rhs), "vacuous", inputs, reason)


def _spectrum(g: Graph, spectrum: Optional[Spectrum]) -> Spectrum:
    return spectrum_of(g) if spectrum is None else spectrum


def modal_distance(g: Graph, p: Partition, spectrum: Optional[Spectrum] = None) -> float:
    """Distance between the span of the first q Laplacian modes and the span of
    the cluster indicators, normalized to [0, 1].

    Computed as ``sqrt(sum_{j<q, k>=q} (nbar_j . u_k)**2 / (q (n-q)))`` with
    ``nbar_j`` the unit vector uniform on cluster j.
    """
    p.check_graph(g)
    q, n = p.q, g.n
    if q >= n:
        raise ValidationError(f"q={q} must be smaller than n={n}", "partition-metrics")
    s = _spectrum(g, spectrum)
    C = p.indicator_basis().T @ s.eigenvectors[:, q:]
    val = float(np.sum(C * C)) / (q * (n - q))
    return math.sqrt(min(max(val, 0.0), 1.0))


def outgoing_weights(g: Graph, p: Partition) -> np.ndarray:
    """Total weight of edges leaving each cluster (length q)."""
    p.check_graph(g)
    a = p.assignment
    cut = a[g.tails] != a[g.heads]
    out = np.zeros(p.q)
    np.add.at(out, a[g.tails[cut]], g.weights[cut])
    np.add.at(out, a[g.heads[cut]], g.weights[cut])
    return out


def relative_outgoing_weights(g: Graph, p: Partition) -> np.ndarray:
    return outgoing_weights(g, p) / np.sqrt(p.sizes())


def relative_outgoing_weight(g: Graph, p: Partition, j: int) -> float:
    """Outgoing weight of cluster ``j`` divided by the square root of its size."""
    if not 0 <= j < p.q:
        raise ValidationError(f"cluster id must lie in [0, {p.q})", "partition-metrics")
    return float(relative_outgoing_weights(g, p)[j])


def avg_relative_outgoing_weight(g: Graph, p: Partition) -> float:
    """Root mean square of the per-cluster relative outgoing weights."""
    r = relative_outgoing_weights(g, p)
    return float(np.sqrt(np.mean(r * r)))


def alpha_star(avgrelout: float, lambda_q: float, q: int) -> float:
    """Smallest alpha for which ``avgrelout <= alpha * lambda_q / sqrt(2q)``."""
    if not lambda_q > 0:
        raise ValidationError(
            "lambda_q must be positive (graph has more than q components)", "partition-metrics"
        )
    return math.sqrt(2 * q) * avgrelout / lambda_q


def partition_alpha(g: Graph, p: Partition, spectrum: Optional[Spectrum] = None) -> float:
    s = _spectrum(g, spectrum)
    return alpha_star(avg_relative_outgoing_weight(g, p), _lambda(s, p.q), p.q)


def _lambda(s: Spectrum, q: int) -> float:
    lam = float(s.eigenvalues[q])
    return 0.0 if lam <= s.zero_tolerance() else lam


def prop1_rhs(avgrelout: float, lambda_q: float, n: int, q: int) -> float:
    return math.sqrt(2.0 / (n - q)) * avgrelout / lambda_q


def check_prop1(g: Graph, p: Partition, spectrum: Optional[Spectrum] = None) -> BoundReport:
    """``modal_distance <= sqrt(2/(n-q)) * avgrelout / lambda_q``."""
    s = _spectrum(g, spectrum)
    q, n = p.q, g.n
    lam = _lambda(s, q) if q < n else 0.0
    a = avg_relative_outgoing_weight(g, p)
    inputs = {"q": q, "n": n, "lambda_q": lam, "avgrelout": a}
    if lam == 0.0:
        return _vacuous("prop1", inputs, "lambda_q is zero")
    md = modal_distance(g, p, s)
    inputs["modal_distance"] = md
    return _report("prop1", md, prop1_rhs(a, lam, n, q), inputs)


def prop2_rhs(alpha: float) -> float:
    return alpha / math.sqrt(1.0 - alpha * alpha)


def check_prop2(g: Graph, p: Partition, spectrum: Optional[Spectrum] = None) -> BoundReport:
    """``lambda_{q-1} / lambda_q <= alpha / sqrt(1 - alpha**2)`` with alpha = alpha_star."""
    s = _spectrum(g, spectrum)
    q = p.q
    lam = _lambda(s, q) if q < g.n else 0.0
    a = avg_relative_outgoing_weight(g, p)
    inputs = {"q": q, "n": g.n, "lambda_q": lam, "avgrelout": a}
    if lam == 0.0:
        return _vacuous("prop2", inputs, "lambda_q is zero")
    alpha = alpha_star(a, lam, q)
    lam_prev = _lambda(s, q - 1)
    inputs.update(alpha=alpha, lambda_q_minus_1=lam_prev)
    if alpha >= 1.0:
        return _vacuous("prop2", inputs, "not alpha-realizable for alpha < 1", lam_prev / lam)
    return _report("prop2", lam_prev / lam, prop2_rhs(alpha), inputs)


def check_prop3(g: Graph, g2: Graph, p: Partition) -> BoundReport:
    """``||r(g) - r(g2)||_2 <= 2 alpha sqrt(2 d_max)`` for two weightings of one topology.

    ``alpha`` is the larger of the two alpha_star values and ``d_max`` the
    largest number of edges at any vertex.
    """
    if not g.same_topology(g2):
        raise ValidationError("graphs must share vertex and edge sets", "partition-metrics")
    q = p.q
    s1, s2 = spectrum_of(g), spectrum_of(g2)
    d_max = int(g.edge_counts().max()) if g.m else 0
    inputs = {"q": q, "n": g.n, "d_max": d_max}
    if q >= g.n or _lambda(s1, q) == 0.0 or _lambda(s2, q) == 0.0:
        return _vacuous("prop3", inputs, "lambda_q is zero")
    alpha = max(partition_alpha(g, p, s1), partition_alpha(g2, p, s2))
    inputs["alpha"] = alpha
    diff = np.asarray(aggregated_resistance_exact(g, q, s1)) - np.asarray(
        aggregated_resistance_exact(g2, q, s2)
    )
    lhs = float(np.linalg.norm(diff))
    if alpha >= 1.0:
        return _vacuous("prop3", inputs, "not alpha-realizable for alpha < 1", lhs)
    return _report("prop3", lhs, 2.0 * alpha * math.sqrt(2.0 * d_max), inputs)


def prop4_rhs(alpha_hat: float, beta: float) -> float:
    return math.sqrt(alpha_hat / math.sqrt(1.0 - alpha_hat**2)) / beta


def check_prop4(
    g: Graph,
    p: Partition,
    a_hat: float,
    alpha_hat: float,
    spectrum: Optional[Spectrum] = None,
) -> BoundReport:
    """Relative 2-norm error of ``eps (eps I + L)^-1`` against the first-q projector.

    ``eps`` comes from :func:`epsilon_for`.  The hypotheses are checked on the
    given partition: its alpha_star must not exceed ``alpha_hat`` and ``beta``
    is the tightest ratio placing the actual avgrelout within
    ``[beta a_hat, a_hat / beta]``.
    """
    s = _spectrum(g, spectrum)
    q = p.q
    a = avg_relative_outgoing_weight(g, p)
    lam = _lambda(s, q) if q < g.n else 0.0
    inputs = {"q": q, "n": g.n, "a_hat": a_hat, "alpha_hat": alpha_hat, "avgrelout": a}
    if lam == 0.0:
        return _vacuous("prop4", inputs, "lambda_q is zero")
    if not 0 < alpha_hat < 1 or not a_hat > 0:
        return _vacuous("prop4", inputs, "need 0 < alpha_hat < 1 and a_hat > 0")
    if a <= 0:
        return _vacuous("prop4", inputs, "partition has no outgoing weight, beta is zero")
    alpha = alpha_star(a, lam, q)
    beta = min(a / a_hat, a_hat / a)
    eps = epsilon_for(a_hat, alpha_hat, q)
    inputs.update(alpha=alpha, beta=beta, epsilon=eps)
    if alpha > alpha_hat:
        return _vacuous("prop4", inputs, "alpha_star exceeds alpha_hat")
    P = s.projector(q)
    E = P - eps * resolvent(g, eps)
    lhs = np.linalg.norm(E, 2) / np.linalg.norm(P, 2)
    return _report("prop4", lhs, prop4_rhs(alpha_hat, beta), inputs)
