from collections import deque

import numpy as np
import pytest

from modal_barrier.distributed import SparseRow, run_distributed
from modal_barrier.generators import k2, path, random_graph
from modal_barrier.resistance import (
    aggregated_resistance_approx2,
    neumann_partial_sum,
    normalized_adjacency,
    rho_upper_bound,
)


def hop_ball(g, src, t):
    dist = {src: 0}
    todo = deque([src])
    while todo:
        v = todo.popleft()
        if dist[v] == t:
            continue
        for u in g.neighbors(v).tolist():
            if u not in dist:
                dist[u] = dist[v] + 1
                todo.append(u)
    return set(dist)


def test_k2_p0():
    r, stats = run_distributed(k2(), 0.1, 0)
    assert r.values[0] == pytest.approx(0.181818181818, abs=1e-9)
    assert stats.rounds == 0 and stats.messages == 0


def test_path3_message_counts():
    _, stats = run_distributed(path(3), 0.1, 2)
    assert stats.rounds == 2
    assert stats.messages_per_round == [4, 4]
    assert stats.messages == 8


@pytest.mark.parametrize("seed", range(4))
def test_matches_centralized(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(int(rng.integers(5, 60)), 0.15, rng)
    r, stats = run_distributed(g, 0.1)
    expect = aggregated_resistance_approx2(g, 0.1).values
    assert np.max(np.abs(r.values - expect) / np.abs(expect)) <= 1e-10
    assert stats.non_neighbor_reads == 0
    assert all(m == 2 * g.m for m in stats.messages_per_round)


def test_rows_and_partial_sums_match_matrix_powers():
    g = random_graph(25, 0.15, np.random.default_rng(11))
    eps, p = 0.2, 6
    _, _, states = run_distributed(g, eps, p, keep_states=True)
    Ahat = normalized_adjacency(g, eps).toarray()
    P = np.linalg.matrix_power(Ahat, p)
    S = neumann_partial_sum(g, eps, p)
    for s in states:
        row = np.zeros(g.n)
        row[s.row.indices] = s.row.values
        assert np.allclose(row, P[s.vertex], rtol=0, atol=1e-14)
        ps = np.zeros(g.n)
        ps[s.partial_sum.indices] = s.partial_sum.values
        assert np.allclose(ps, S[s.vertex], rtol=0, atol=1e-14)
        assert s.round == p


def test_row_support_within_hop_ball_and_row_sums_decay():
    g = random_graph(40, 0.05, np.random.default_rng(12))
    eps = 0.1
    rho = rho_upper_bound(g, eps)
    for t in (1, 2, 3, 5):
        _, _, states = run_distributed(g, eps, t, keep_states=True)
        for s in states:
            assert set(s.row.indices.tolist()) <= hop_ball(g, s.vertex, t)
            assert s.row.values.sum() <= rho**t * (1 + 1e-12)


def test_deterministic():
    g = random_graph(30, 0.1, np.random.default_rng(13))
    a, sa = run_distributed(g, 0.1, 10)
    b, sb = run_distributed(g, 0.1, 10)
    assert np.array_equal(a.values, b.values)
    assert sa.as_dict() == sb.as_dict()


def test_pruning_is_opt_in_and_bounded():
    g = random_graph(60, 0.05, np.random.default_rng(14))
    exact, s0 = run_distributed(g, 0.1, 20)
    pruned, s1 = run_distributed(g, 0.1, 20, prune=1e-6)
    assert s1.entries <= s0.entries
    assert np.allclose(pruned.values, exact.values, atol=1e-4)


def test_paper_literal_matches_centralized_literal():
    g = random_graph(15, 0.3, np.random.default_rng(15))
    r, _ = run_distributed(g, 0.1, 4, paper_literal=True)
    assert np.allclose(r, aggregated_resistance_approx2(g, 0.1, 4, paper_literal=True), rtol=1e-12)


def test_sparse_row():
    a = SparseRow([1, 4], [0.5, 2.0])
    b = SparseRow([0, 4], [1.0, 1.0])
    c = a.plus(b)
    assert c.to_dict() == {0: 1.0, 1: 0.5, 4: 3.0}
    assert c.get(2) == 0.0 and len(c) == 3


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        run_distributed(k2(), 0.0, 1)
    with pytest.raises(ValueError):
        run_distributed(k2(), 0.1, -1)
    with pytest.raises(ValueError):
        run_distributed(k2(), 0.1, 1, prune=-1)
