"""Worked transition matrices used as reference examples (tol 1e-12)."""

import numpy as np
import pytest

from antigibbs import kernels as K
from antigibbs.dominance import check_invariance

from goldens import GOLDENS, M, PANELS, PI4, PI9, ZFSS_CORRECTED, DNAM6, UNAM6, nam_matrix

TOL = 1e-12
EXACT = [g for g in GOLDENS if "as printed" not in g[0]]


@pytest.mark.parametrize("name,compute,expected,pi", EXACT, ids=[g[0] for g in EXACT])
def test_golden(name, compute, expected, pi):
    P = compute()
    assert np.abs(P - expected).max() < TOL
    assert check_invariance(expected, pi)


def test_zfss_rows_and_printed_erratum():
    printed = next(g for g in GOLDENS if "as printed" in g[0])[2]
    P = K.kernel_matrix("ZFSS", PI9)
    assert np.abs(P - ZFSS_CORRECTED).max() < TOL
    assert np.abs((P - printed)[[0, 3, 4]]).max() < TOL
    assert check_invariance(P, PI9)
    assert not check_invariance(printed, PI9)
    assert abs((np.array(PI9) @ printed)[4] - 0.40) < 1e-12


def test_udnam_is_mean_of_panel_a():
    exp = (M(UNAM6["a"]) + M(DNAM6["a"])) / 2
    assert np.abs(K.kernel_matrix("UDNAM", PANELS["a"]) - exp).max() < TOL


def test_nam_other_orders_zero_self():
    p = PANELS["a"]
    left = M([[0, "3/11", "3/11", "5/11"], ["1/11", 0, "5/33", "25/33"],
              ["1/11", "5/33", 0, "25/33"], ["1/11", "15/33", "15/33", 0]])
    right = M([[0, "3/21", "3/21", "5/7"], ["1/21", 0, "5/21", "5/7"],
               ["1/21", "5/21", 0, "5/7"], ["1/7", "3/7", "3/7", 0]])
    for sig in ([0, 3, 1, 2], [0, 3, 2, 1]):
        assert np.abs(nam_matrix(p, sig) - left).max() < TOL
    for sig in ([3, 0, 1, 2], [3, 0, 2, 1]):
        assert np.abs(nam_matrix(p, sig) - right).max() < TOL


def test_spec_row_examples():
    assert np.allclose(K.gs_row(PI4, 1), PI4, atol=0)
    assert np.allclose(K.mhgs_row([1, 0, 0], 0), [1, 0, 0])
    assert np.allclose(K.nam_row([1 / 3] * 3, [0, 1, 2], 1), [0.5, 0, 0.5], atol=TOL)
    assert np.allclose(K.unam_row(PANELS["b"], 2), [0.25, 0.25, 0, 0.5], atol=TOL)
    assert np.abs(K.kernel_row("HST", [0.4, 0.3, 0.1, 0.2], 2) - [1, 0, 0, 0]).max() < TOL


@pytest.mark.parametrize("zero", [False, True])
def test_fss_sample_examples(zero):
    for u in np.linspace(0, 0.999, 37):
        assert K.fss_sample(PI9, 0, zero, u) == 4
        assert K.fss_sample([0.7, 0.1, 0.2], 1, zero, u) == 0


def test_min_self_probability():
    assert K.min_self_probability([0.25] * 4) == 0
    assert abs(K.min_self_probability([0.7, 0.3]) - 4 / 7) < TOL
    assert K.min_self_probability([0.5, 0.3, 0.2]) == 0


def test_forced_matrix_examples():
    assert np.abs(K.kernel_row("ZDNAM", [0.25, 0.75], 0) - [0, 1]).max() < TOL
    assert np.abs(K.dnam_row([0.7, 0.3], 0) - [4 / 7, 3 / 7]).max() < TOL
    assert np.abs(K.udnam_row([0.7, 0.3], 1) - [1, 0]).max() < TOL
    assert np.abs(K.kernel_row("GS", [0.1, 0.9], 0) - [0.1, 0.9]).max() < TOL


def test_order_permutation_examples():
    assert list(K.order_permutation([0.3, 0.1, 0.3, 0.3])) == [1, 0, 2, 3]
    assert list(K.order_permutation(PI4, "non-increasing")) == [3, 2, 1, 0]
    assert list(K.order_permutation([1 / 3] * 3)) == [0, 1, 2]
    # non-increasing is the exact mirror of non-decreasing, ties included
    assert list(K.order_permutation([0.3, 0.1, 0.3, 0.3], "non-increasing")) == [3, 2, 0, 1]


def test_shift_must_be_in_open_unit_interval():
    for s in (0, 1, -0.2, 1.5):
        with pytest.raises(ValueError):
            K.shifted_tower_row(PI4, 0, s)


def test_unknown_method():
    with pytest.raises(ValueError):
        K.kernel_row("XYZ", PI4, 0)
    with pytest.raises(ValueError):
        K.kernel_row(14, PI4, 0)
