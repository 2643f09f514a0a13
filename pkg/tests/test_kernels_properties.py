import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from antigibbs import kernels as K
from antigibbs.dominance import check_detailed_balance, check_invariance, peskun_dominates

import oracles

ALL = K.METHOD_NAMES


def random_pis(n, seed, ties=True):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        m = int(rng.integers(2, 9))
        if ties and rng.random() < 0.3:
            w = rng.integers(1, 4, size=m).astype(float)
        else:
            w = rng.exponential(size=m)
        if rng.random() < 0.1:
            w[rng.integers(m)] = 0.0
            if w.sum() == 0:
                w[0] = 1.0
        out.append(w / w.sum())
    return out


PIS = random_pis(400, 11)


@pytest.mark.parametrize("method", ALL)
def test_stochastic_and_invariant(method):
    for pi in PIS:
        P = K.kernel_matrix(method, pi)
        assert P.min() >= -1e-12
        assert np.abs(P.sum(1) - 1).max() < 1e-9
        assert check_invariance(P, pi)


@pytest.mark.parametrize("method", K.REVERSIBLE)
def test_reversible(method):
    for pi in PIS:
        assert check_detailed_balance(K.kernel_matrix(method, pi), pi)


@pytest.mark.parametrize("method", K.MINIMAL_SELF)
def test_minimal_self_attained(method):
    for pi in PIS:
        P = K.kernel_matrix(method, pi)
        self_mass = float(pi @ np.diag(P))
        assert abs(self_mass - max(0.0, 2 * pi.max() - 1)) < 1e-9


@pytest.mark.parametrize("method", ("DNAM",) + K.MINIMAL_SELF)
def test_forced_when_max_at_least_half(method):
    rng = np.random.default_rng(5)
    for _ in range(100):
        m = int(rng.integers(2, 8))
        w = rng.exponential(size=m)
        j = int(rng.integers(m))
        w[j] = 0
        w = w / w.sum() * (1 - rng.uniform(0.5, 1.0))
        w[j] = 1 - w.sum()
        pi = w
        F = np.zeros((m, m))
        F[:, j] = 1.0
        F[j] = pi / pi[j]
        F[j, j] = (2 * pi[j] - 1) / pi[j]
        assert np.abs(K.kernel_matrix(method, pi) - F).max() < 1e-12, method


def test_ust_dst_reversal():
    for pi in PIS:
        U = K.kernel_matrix("UST", pi)
        D = K.kernel_matrix("DST", pi)
        nz = pi > 0
        R = (pi[None, :] * U.T) / np.where(nz, pi, 1)[:, None]
        assert np.abs((R - D)[np.ix_(nz, nz)]).max() < 1e-9


def test_peskun_chain():
    for pi in PIS:
        G, Mh, U = (K.kernel_matrix(x, pi) for x in ("GS", "MHGS", "UNAM"))
        assert peskun_dominates(Mh, G) and peskun_dominates(U, Mh)


def test_dnam_does_not_peskun_dominate_gs():
    pi = np.array([1, 3, 3, 5]) / 12
    assert not peskun_dominates(K.kernel_matrix("DNAM", pi), K.kernel_matrix("GS", pi))


def test_nam_matches_nested_am_oracle():
    rng = np.random.default_rng(2)
    for pi in PIS[:150]:
        sigma = rng.permutation(pi.size)
        ref = oracles.to_float(oracles.nested_am_matrix(pi, list(sigma)))
        P = np.array([K.nam_row(pi, sigma, k) for k in range(pi.size)])
        assert np.abs(P - ref).max() < 1e-9


@pytest.mark.parametrize("method", ["ST", "UST", "DST", "HST", "OHST"])
def test_towers_match_geometric_oracle(method):
    for pi in PIS[:150]:
        if pi.max() >= 0.5:
            continue
        m = pi.size
        if method == "ST":
            shift, sig = pi.max(), np.arange(m)
        elif method == "UST":
            shift, sig = pi.max(), K._peak_first_order(pi, False)
        elif method == "DST":
            shift, sig = pi.max(), K._peak_first_order(pi, True)
        else:
            shift = 0.5
            sig = np.arange(m) if method == "HST" else K.order_permutation(pi, "non-decreasing")
        ref = oracles.to_float(oracles.tower_matrix(pi, shift, list(sig)))
        nz = pi > 0
        assert np.abs((K.kernel_matrix(method, pi) - ref)[nz]).max() < 1e-9


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=8),
       st.sampled_from(ALL), st.data())
def test_rows_valid_hypothesis(w, method, data):
    w = np.array(w)
    if w.sum() <= 1e-6:
        w[0] = 1.0
    pi = w / w.sum()
    k = data.draw(st.integers(0, pi.size - 1))
    row = K.kernel_row(method, pi, k)
    assert row.min() >= -1e-12 and abs(row.sum() - 1) < 1e-9
    assert np.all(row[pi == 0] == 0) or pi[k] == 0


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=8),
       st.sampled_from(["ST", "UST", "DST", "UDST", "HST", "OHST", "FSS", "ZFSS", "UDNAM"]),
       st.floats(0.0, 0.999999), st.data())
def test_sampler_only_returns_supported_values(w, method, u, data):
    pi = np.array(w) / sum(w)
    k = data.draw(st.integers(0, pi.size - 1))
    row = K.kernel_row(method, pi, k)
    j = K.kernel_sample(method, pi, k, u)
    assert 0 <= j < pi.size and row[j] > 0


@pytest.mark.parametrize("method", ["ST", "HST", "OHST", "UST", "DST", "UDST", "FSS", "ZFSS"])
def test_direct_sampler_matches_row(method):
    grid = (np.arange(20000) + 0.5) / 20000
    for pi in PIS[:40]:
        for k in range(pi.size):
            if pi[k] == 0:
                continue
            row = K.kernel_row(method, pi, k)
            draws = K.kernel_sample_many(method, pi, k, grid)
            freq = np.bincount(draws, minlength=pi.size) / grid.size
            # stratified u: each value's frequency is exact up to the
            # number of interval endpoints times the grid spacing
            assert np.abs(freq - row).max() < 2 * pi.size / grid.size


def test_sample_many_matches_single():
    pi = np.array([0.1, 0.2, 0.2, 0.05, 0.45])
    us = np.random.default_rng(0).random(200)
    for method in ALL:
        many = K.kernel_sample_many(method, pi, 3, us)
        assert list(many) == [K.kernel_sample(method, pi, 3, u) for u in us]
