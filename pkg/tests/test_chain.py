import numpy as np
import pytest

from antigibbs.chain import run_chain
from antigibbs.models import BeliefNet, Mixture, Potts, brute_force_expectations
from antigibbs.stats import asymptotic_variance, mcse


def test_deterministic_and_seed_sensitive():
    p = Potts(4, 4, 3, 0.5)
    a = run_chain(p, "ZDNAM", "Random", 200, seed=11)
    b = run_chain(p, "ZDNAM", "Random", 200, seed=11)
    c = run_chain(p, "ZDNAM", "Random", 200, seed=12)
    assert np.array_equal(a.thinned, b.thinned) and np.array_equal(a.unthinned, b.unthinned)
    assert a.self_transition_count == b.self_transition_count
    assert not np.array_equal(a.thinned, c.thinned)


def test_rng_contract():
    # b = 0 makes every conditional uniform, so GS sets x_i = floor(4u)
    p = Potts(3, 3, 4, 0.0)
    rng = np.random.default_rng(5)
    x = np.array([rng.integers(0, 4) for _ in range(9)])
    for _ in range(2):          # Sequential scans make no schedule draws
        for i in range(9):
            x[i] = int(rng.random() * 4)
    r = run_chain(p, "GS", "Sequential", 2, seed=5)
    assert np.array_equal(r.thinned[-1], p.functions(x))
    # Random scan: n index draws, then n update uniforms
    rng = np.random.default_rng(6)
    x = np.array([rng.integers(0, 4) for _ in range(9)])
    sched = [rng.integers(0, 9) for _ in range(9)]
    for i in sched:
        x[i] = int(rng.random() * 4)
    r = run_chain(p, "GS", "Random", 1, seed=6)
    assert np.array_equal(r.thinned[0], p.functions(x))


def test_thinned_is_every_nth_unthinned():
    p = Potts(3, 4, 3, 0.85)
    r = run_chain(p, "HST", "RandomOrder", 50, seed=1)
    assert np.array_equal(r.thinned, r.unthinned[p.n - 1::p.n])
    assert r.updates == 600 and r.function_names == p.function_names
    assert run_chain(p, "GS", "Random", 5, seed=1, record_unthinned=False).unthinned is None


@pytest.mark.parametrize("scan", ["Random", "Sequential", "ShuffledSequential",
                                  "Checkerboard", "RandomOrder", "RandomOrderX4"])
@pytest.mark.parametrize("method", ["GS", "ZDNAM", "UDST", "ZFSS"])
def test_small_potts_means(method, scan):
    p = Potts(2, 3, 3, 0.6)
    exact = np.array([mu for mu, _ in brute_force_expectations(p)])
    r = run_chain(p, method, scan, 20000, seed=3, shuffle_seed=0)
    for j in range(3):
        est = asymptotic_variance(r.unthinned[:, j])
        se = mcse(est)
        assert abs(est.mean - exact[j]) < 4.5 * se + 1e-9, (j, est.mean, exact[j], se)


def test_direct_and_row_sampling_agree_in_distribution():
    p = Potts(2, 3, 3, 0.6)
    a = run_chain(p, "OHST", "Random", 20000, seed=4, direct=True)
    b = run_chain(p, "OHST", "Random", 20000, seed=4, direct=False)
    assert abs(a.self_freq - b.self_freq) < 0.02


def test_no_self_transitions_for_antiferromagnet():
    # b < 0 on a 5x5 torus: every conditional has max below 1/2
    p = Potts(5, 5, 4, -0.4)
    for method in ("ZDNAM", "ST", "UDST", "HST", "OHST", "ZFSS"):
        r = run_chain(p, method, "Random", 400, seed=1)
        assert r.self_transition_count == 0
        assert r.max_cond_ge_half_count == 0


def test_gs_self_frequency_matches_conditional_mass():
    p = Potts(5, 5, 4, -0.4)
    r = run_chain(p, "GS", "Random", 4000, seed=2)
    assert abs(r.self_freq - 0.274) < 0.02


def test_sequential_rejected_for_mixture():
    with pytest.raises(ValueError, match="sequential"):
        run_chain(Mixture(), "GS", "Sequential", 5, seed=0)


def test_checkerboard_needs_lattice():
    with pytest.raises(ValueError):
        run_chain(BeliefNet(), "GS", "Checkerboard", 5, seed=0)


def test_bad_arguments():
    p = Potts(2, 2, 2, 0.0)
    with pytest.raises(ValueError):
        run_chain(p, "GS", "Random", 0, seed=0)
    with pytest.raises(ValueError):
        run_chain(p, "XX", "Random", 1, seed=0)
    with pytest.raises(ValueError):
        run_chain(p, "GS", "Spiral", 1, seed=0)
