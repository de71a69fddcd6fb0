"""Stochastic S -> E -> C -> R spread on a weighted graph.

Each day, every contagious vertex passes the infection to each susceptible
neighbour independently with probability ``w_k * pa`` for the joining edge k.
Newly infected vertices incubate for a uniform integer number of days, stay
contagious for another uniform integer number of days, then recover with
permanent immunity.

Randomness for one run is laid out up front from a per-run seed:

* the patient zero (when chosen at random),
* an incubation and a contagious duration for every vertex,
* a uniform draw for every directed edge and every day of the source's
  contagious period.

None of these depend on the weights, so running two weightings with the same
seed couples them: an edge attempt succeeds in both unless its draw falls
between the two probabilities.  Indexing draws by the source's contagious day
(not the calendar day) makes infection times monotone in every edge weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .errors import ValidationError
from .graph import EdgeVector, Graph

NEVER = np.iinfo(np.int64).max // 4

COUNT_MODES = ("infected", "contagious-only")


@dataclass(frozen=True)
class EpidemicParams:
    pa: float = 0.03
    incubation_range: Tuple[int, int] = (3, 5)
    infectious_range: Tuple[int, int] = (15, 70)
    horizon: int = 120
    runs: int = 200
    seed: int = 0
    count: str = "infected"

    def __post_init__(self):
        if not 0 <= self.pa <= 1:
            raise ValidationError("pa must lie in [0, 1]", "epidemic")
        for name in ("incubation_range", "infectious_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValidationError(f"{name} must have low <= high", "epidemic")
        if self.incubation_range[0] < 0 or self.infectious_range[0] < 1:
            raise ValidationError(
                "incubation must be >= 0 days and the contagious period >= 1 day", "epidemic"
            )
        if self.horizon < 0:
            raise ValidationError("horizon must be non-negative", "epidemic")
        if self.runs < 1:
            raise ValidationError("runs must be at least 1", "epidemic")
        if self.count not in COUNT_MODES:
            raise ValidationError(f"count must be one of {COUNT_MODES}", "epidemic")


@dataclass
class EpidemicRun:
    """One simulated outbreak.

    ``infection_day[v]`` is the day v was exposed (``NEVER`` if it never was;
    negative for a patient zero that starts contagious).  Per-day arrays have
    ``horizon + 1`` entries, day 0 being the initial state.
    """

    patient_zero: int
    infection_day: np.ndarray
    contagious_day: np.ndarray
    recovery_day: np.ndarray
    infected: np.ndarray
    contagious: np.ndarray
    new_infections: np.ndarray

    def counts(self, mode: str = "infected") -> np.ndarray:
        return self.infected if mode == "infected" else self.contagious

    def state_on(self, day: int) -> np.ndarray:
        """Per-vertex state at the end of ``day``: 0 S, 1 E, 2 C, 3 R."""
        s = np.zeros(self.infection_day.size, dtype=np.int8)
        s[self.infection_day <= day] = 1
        s[self.contagious_day <= day] = 2
        s[self.recovery_day <= day] = 3
        return s


def _edge_probabilities(g: Graph, w, pa: float) -> np.ndarray:
    if isinstance(w, EdgeVector):
        w.check_graph(g)
    w = np.asarray(g.weights if w is None else w, dtype=float)
    if w.shape != (g.m,):
        raise ValidationError(f"expected {g.m} edge weights, got shape {w.shape}", "epidemic")
    if np.any((w < 0) | (w > 1)):
        raise ValidationError("epidemic weights must lie in [0, 1]", "epidemic")
    return w * pa


def run_rng(seed: int, run: int) -> np.random.Generator:
    """Generator for run ``run``: PCG64 seeded by ``SeedSequence([seed, run])``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(run)])))


def simulate_epidemic(
    g: Graph,
    w=None,
    params: EpidemicParams = EpidemicParams(),
    patient_zero: Union[int, str] = "random",
    run: int = 0,
    initial_state: str = "exposed",
) -> EpidemicRun:
    """Simulate ``params.horizon`` days from a single initial case.

    ``initial_state="contagious"`` starts the patient zero already contagious
    (on the first day of its contagious period) instead of exposed.
    """
    P = _edge_probabilities(g, w, params.pa)
    n = g.n
    rng = run_rng(params.seed, run)
    if isinstance(patient_zero, str):
        if patient_zero != "random":
            raise ValidationError(f"invalid patient zero {patient_zero!r}", "epidemic")
        if n == 0:
            raise ValidationError("graph has no vertices", "epidemic")
        p0 = int(rng.integers(n))
    else:
        p0 = int(patient_zero)
        if not 0 <= p0 < n:
            raise ValidationError(f"patient zero {p0} out of range", "epidemic")
    if initial_state not in ("exposed", "contagious"):
        raise ValidationError("initial_state must be 'exposed' or 'contagious'", "epidemic")

    inc_lo, inc_hi = params.incubation_range
    dur_lo, dur_hi = params.infectious_range
    incubation = rng.integers(inc_lo, inc_hi + 1, size=n)
    duration = rng.integers(dur_lo, dur_hi + 1, size=n)
    # directed edges: k -> (tail, head) then (head, tail); rows of U follow this order
    src = np.concatenate([g.tails, g.heads])
    dst = np.concatenate([g.heads, g.tails])
    Pd = np.concatenate([P, P])
    U = rng.random((src.size, dur_hi))

    infection_day = np.full(n, NEVER, dtype=np.int64)
    infection_day[p0] = -incubation[p0] if initial_state == "contagious" else 0
    cday = np.full(n, NEVER, dtype=np.int64)
    rday = np.full(n, NEVER, dtype=np.int64)
    cday[p0] = infection_day[p0] + incubation[p0]
    rday[p0] = cday[p0] + duration[p0]

    H = params.horizon
    new = np.zeros(H + 1, dtype=np.int64)
    new[0] = 1
    rows = np.arange(src.size)
    for d in range(1, H + 1):
        # contagious at the end of the previous day, indexed by their own contagious day
        k = (d - 1) - cday[src]
        live = (k >= 0) & (d - 1 < rday[src]) & (infection_day[dst] == NEVER)
        if not np.any(live):
            if not np.any((rday > d - 1) & (rday != NEVER)):
                break  # nobody exposed or contagious any more
            continue
        e = rows[live]
        hit = U[e, k[live]] < Pd[live]
        if np.any(hit):
            v = np.unique(dst[e[hit]])
            infection_day[v] = d
            cday[v] = d + incubation[v]
            rday[v] = cday[v] + duration[v]
            new[d] = v.size

    days = np.arange(H + 1)[:, None]
    infected = np.count_nonzero((infection_day[None, :] <= days) & (rday[None, :] > days), axis=1)
    contagious = np.count_nonzero((cday[None, :] <= days) & (rday[None, :] > days), axis=1)
    return EpidemicRun(p0, infection_day, cday, rday, infected, contagious, new)


def monte_carlo_epidemic(
    g: Graph,
    w=None,
    params: EpidemicParams = EpidemicParams(),
    patient_zero: Union[int, str] = "random",
) -> np.ndarray:
    """Per-day mean count over ``params.runs`` runs seeded ``(params.seed, run)``.

    Runs are summed in run order, so the result is bitwise reproducible.
    """
    total = np.zeros(params.horizon + 1)
    for run in range(params.runs):
        total += simulate_epidemic(g, w, params, patient_zero, run).counts(params.count)
    return total / params.runs


def peak(curve) -> Tuple[float, int]:
    """``(peak value, first day it is reached)``."""
    curve = np.asarray(curve)
    day = int(np.argmax(curve))
    return float(curve[day]), day
