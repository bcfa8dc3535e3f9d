import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from regime_predprey import (check_generator, occupation_fractions, sample_switching_path,
                             stationary_law)
from regime_predprey.ctmc import SwitchingPath
from regime_predprey.ergodics import batch_half_width
from regime_predprey.errors import NegativeOffDiagonal, NotIrreducible, RowSumNonzero

from conftest import random_generator


def gauss_left_null(q):
    """Stationary vector by Gaussian elimination with partial pivoting on
    Q^T with its last equation replaced by the normalisation."""
    n = len(q)
    a = [[float(q[j][i]) for j in range(n)] for i in range(n)]
    b = [0.0] * n
    a[n - 1] = [1.0] * n
    b[n - 1] = 1.0
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        a[col], a[piv] = a[piv], a[col]
        b[col], b[piv] = b[piv], b[col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            for c in range(col, n):
                a[r][c] -= f * a[col][c]
            b[r] -= f * b[col]
    x = [0.0] * n
    for r in range(n - 1, -1, -1):
        x[r] = (b[r] - sum(a[r][c] * x[c] for c in range(r + 1, n))) / a[r][r]
    return np.array(x)


def batch_se_check(path, mu, batches=20, k=3.0):
    """Occupation fractions within ``k`` batch-means standard errors of ``mu``."""
    n = mu.size
    edges = np.linspace(0, path.horizon, batches + 1)
    fr = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        jt = path.jump_times
        sel = (jt > lo) & (jt < hi)
        i_lo = np.searchsorted(jt, lo, side="right")
        states = path.states[i_lo:i_lo + sel.sum() + 1]
        sub = SwitchingPath(jt[sel] - lo, states, hi - lo)
        fr.append(occupation_fractions(sub, n))
    fr = np.array(fr)
    se = fr.std(axis=0, ddof=1) / np.sqrt(batches)
    total = occupation_fractions(path, n)
    return np.all(np.abs(total - mu) <= k * se), total, se


def test_check_generator_examples():
    check_generator([[-1.0, 1.0], [1.0, -1.0]])
    check_generator([[0.0]])
    with pytest.raises(NotIrreducible):
        check_generator([[-1.0, 1.0], [0.0, 0.0]])
    with pytest.raises(NegativeOffDiagonal):
        check_generator([[1.0, -1.0], [1.0, -1.0]])
    with pytest.raises(RowSumNonzero):
        check_generator([[-1.0, 1.1], [1.0, -1.0]])


def test_reducible_three_state_detected():
    # 1 <-> 2 communicate, 3 only leaves
    with pytest.raises(NotIrreducible):
        check_generator([[-1, 1, 0], [1, -1, 0], [1, 1, -2]])


def test_row_sum_tolerance_is_relative():
    check_generator([[-1000.0, 1000.0 + 5e-7], [1.0, -1.0]])


def test_two_state_closed_form():
    q12, q21 = 0.7, 2.3
    mu = stationary_law([[-q12, q12], [q21, -q21]]).mu
    assert np.allclose(mu, [q21 / (q12 + q21), q12 / (q12 + q21)], atol=1e-15)
    assert stationary_law([[0.0]]).mu.tolist() == [1.0]


def test_random_four_state_against_elimination_oracle():
    rng = np.random.default_rng(11)
    for _ in range(20):
        q = random_generator(rng, 4, 0.0, 3.0)
        q[0, 1] = max(q[0, 1], 0.1)
        np.fill_diagonal(q, 0.0)
        np.fill_diagonal(q, -q.sum(axis=1))
        check_generator(q)
        mu = stationary_law(q).mu
        assert np.max(np.abs(mu - gauss_left_null(q))) < 1e-10
        assert np.max(np.abs(mu @ q)) < 1e-12 * np.abs(q).max()


def test_single_state_path_has_no_jumps():
    p = sample_switching_path([[0.0]], 0, 100.0, np.random.default_rng(0))
    assert p.jump_times.size == 0 and p.states.tolist() == [0]
    assert occupation_fractions(p).tolist() == [1.0]


def test_symmetric_chain_occupation():
    p = sample_switching_path([[-1.0, 1.0], [1.0, -1.0]], 0, 1e4, np.random.default_rng(5))
    assert abs(occupation_fractions(p, 2)[0] - 0.5) < 0.02


def test_occupation_of_single_mid_jump():
    p = SwitchingPath(np.array([5.0]), np.array([0, 1]), 10.0)
    assert occupation_fractions(p, 2).tolist() == [0.5, 0.5]


def test_three_state_occupation_against_stationary_law():
    q = np.array([[-1.0, 0.6, 0.4], [0.2, -0.5, 0.3], [1.5, 0.5, -2.0]])
    p = sample_switching_path(q, 2, 2e4, np.random.default_rng(3))
    ok, total, se = batch_se_check(p, stationary_law(q).mu)
    assert ok, (total, se)


def test_reproducible_and_well_formed():
    q = np.array([[-1.0, 0.6, 0.4], [0.2, -0.5, 0.3], [1.5, 0.5, -2.0]])
    a = sample_switching_path(q, 0, 500.0, np.random.default_rng(9))
    b = sample_switching_path(q, 0, 500.0, np.random.default_rng(9))
    assert np.array_equal(a.jump_times, b.jump_times) and np.array_equal(a.states, b.states)
    assert np.all(np.diff(a.jump_times) > 0)
    assert np.all((a.jump_times > 0) & (a.jump_times < 500.0))
    assert np.all(np.diff(a.states) != 0)
    assert a.states.size == a.jump_times.size + 1


def test_regime_at_is_right_continuous():
    p = SwitchingPath(np.array([1.0, 2.0]), np.array([0, 1, 0]), 3.0)
    assert p.regime_at([0.0, 0.999, 1.0, 1.5, 2.0, 3.0]).tolist() == [0, 0, 1, 1, 0, 0]


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31 - 1))
def test_stationary_law_positive_and_normalised(n, seed):
    q = random_generator(np.random.default_rng(seed), n, 0.01, 5.0)
    mu = stationary_law(q).mu
    assert np.all(mu > 0)
    assert abs(mu.sum() - 1) < 1e-14
    assert np.max(np.abs(gauss_left_null(q) - mu)) < 1e-10


def test_batch_half_width_equal_weights_matches_t_interval():
    from scipy import stats
    x = np.random.default_rng(1).normal(size=20)
    expected = stats.t.ppf(0.975, 19) * x.std(ddof=1) / np.sqrt(20)
    assert abs(batch_half_width(x) - expected) < 1e-14
