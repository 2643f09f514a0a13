"""Probability vectors and transition rows.

Values are indexed 0..m-1 throughout the library; the CLI and any files
written for people use 1..m.
"""

import numpy as np
from numba import njit

NEG_CLAMP = 1e-15


class ProbabilityError(ValueError):
    pass


def normalize(raw) -> np.ndarray:
    """Divide nonnegative weights by their sum, returning a float64 vector."""
    w = np.asarray(raw, dtype=np.float64)
    if w.ndim != 1 or w.size == 0 or not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ProbabilityError("invalid unnormalized probabilities")
    top = w.max()
    if top <= 0:
        raise ProbabilityError("invalid unnormalized probabilities")
    # rescale by the max first so tiny weights (e.g. 1e-300) don't underflow
    w = w / top
    p = w / w.sum()
    return np.clip(p, 0.0, 1.0)


def validate(row, tol: float = 1e-9) -> bool:
    """True iff every entry lies in [-tol, 1+tol] and the sum is within tol of 1."""
    p = np.asarray(row, dtype=np.float64)
    if p.ndim != 1 or p.size == 0 or not np.all(np.isfinite(p)):
        return False
    if np.any(p < -tol) or np.any(p > 1 + tol):
        return False
    return abs(p.sum() - 1.0) <= tol


def repair(row) -> np.ndarray:
    """Clamp round-off negatives in [-1e-15, 0) to zero."""
    p = np.array(row, dtype=np.float64)
    p[(p < 0) & (p >= -NEG_CLAMP)] = 0.0
    return p


@njit(cache=True)
def categorical_index(p, u):
    """Smallest j whose cumulative (positive-entry) sum exceeds u.

    Entries <= 0 are skipped, so a zero-probability value is never returned;
    if round-off leaves u above the total, the last positive entry is used.
    """
    s = 0.0
    j = -1
    for i in range(p.shape[0]):
        if p[i] > 0:
            s += p[i]
            j = i
            if u < s:
                return i
    return j


def sample_categorical(row, u: float) -> int:
    """Draw an index from ``row`` using the uniform variate ``u`` in [0, 1)."""
    return int(categorical_index(np.asarray(row, dtype=np.float64), float(u)))
