"""Autocovariances and asymptotic variance of MCMC mean estimates."""

from dataclasses import dataclass
import warnings

import numpy as np

MIN_LENGTH = 1000
CUTOFF_FRAC = 0.005
CUTOFF_RUN = 5


@dataclass
class AsymVarEstimate:
    gamma0: float
    asym_var: float
    M: int
    thinning_factor: int
    N: int
    mean: float


def autocovariance(trace, maxlag: int) -> np.ndarray:
    """gamma_k = (1/N) sum_{t<N-k} (f_t - mean)(f_{t+k} - mean), k = 0..maxlag.

    Computed with a zero-padded FFT, so long traces cost O(N log N).
    """
    f = np.asarray(trace, dtype=np.float64)
    N = f.size
    if maxlag < 0 or maxlag >= N:
        raise ValueError("maxlag must be below the trace length")
    d = f - f.mean()
    size = 1 << int(2 * N - 1).bit_length()
    F = np.fft.rfft(d, size)
    acov = np.fft.irfft(F * np.conj(F), size)[: maxlag + 1] / N
    # a constant trace should give exact zeros, not FFT round-off
    if not np.any(d):
        acov[:] = 0.0
    return acov


def choose_lag(gamma) -> int:
    """Truncation lag M: the smallest k with |gamma_j| < CUTOFF_FRAC * gamma_0
    for the CUTOFF_RUN consecutive lags j = k, k+1, ...; if no such run
    starts within the supplied lags, the last lag is used.  An even M is
    moved to the next odd lag (or the previous one at the end of the
    supplied lags).
    """
    g = np.asarray(gamma)
    if g[0] <= 0:
        return 0
    small = np.abs(g[1:]) < CUTOFF_FRAC * g[0]
    run = 0
    M = g.size - 1
    for k, s in enumerate(small, start=1):
        run = run + 1 if s else 0
        if run == CUTOFF_RUN:
            M = k - CUTOFF_RUN + 1
            break
    # end on an odd lag so autocovariances enter in adjacent (even, odd)
    # pairs; otherwise a strongly antithetic trace is cut mid-oscillation
    if M % 2 == 0:
        M = M + 1 if M + 1 < g.size else M - 1
    return max(M, 0)


def asymptotic_variance(trace, thinning_factor: int = 1) -> AsymVarEstimate:
    """(gamma_0 + 2 sum_{k=1..M} gamma_k) * thinning_factor, floored at zero."""
    f = np.asarray(trace, dtype=np.float64)
    N = f.size
    if N < MIN_LENGTH:
        raise ValueError(f"trace too short for asymptotic variance (need {MIN_LENGTH})")
    maxlag = max(2, N // 100)
    g = autocovariance(f, maxlag)
    M = choose_lag(g)
    v = (g[0] + 2 * g[1: M + 1].sum()) * thinning_factor
    if v < 0:
        warnings.warn("negative asymptotic variance estimate clamped to zero", RuntimeWarning)
        v = 0.0
    return AsymVarEstimate(float(g[0]), float(v), int(M), int(thinning_factor), N, float(f.mean()))


def mcse(estimate, N: int | None = None) -> float:
    """Monte Carlo standard error sqrt(asym_var / N) of the mean estimate.

    N defaults to the trace length stored in the estimate; for a thinned
    estimate pass the number of updates (trace length times n) to match
    the cost-adjusted variance.
    """
    av = estimate.asym_var if isinstance(estimate, AsymVarEstimate) else float(estimate)
    if N is None:
        if not isinstance(estimate, AsymVarEstimate):
            raise ValueError("N required")
        N = estimate.N * estimate.thinning_factor
    if N <= 0:
        raise ValueError("N must be positive")
    return float(np.sqrt(av / N))
