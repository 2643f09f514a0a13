"""Antithetic modifications of reversible transition matrices.

An antithetic modification (AM) picks disjoint value sets A and B and a
strength delta, moves flow from within-A and within-B transitions to
A<->B transitions, and leaves the matrix reversible.  P - P* is rank one
with eigenvalue delta * (pi(A) + pi(B)).
"""

from dataclasses import dataclass

import numpy as np

FEAS_TOL = 1e-12


class InfeasibleModification(ValueError):
    pass


@dataclass(frozen=True)
class AMSpec:
    A: tuple
    B: tuple
    delta: float

    def __post_init__(self):
        a, b = set(self.A), set(self.B)
        if not a or not b or a & b:
            raise ValueError("A and B must be disjoint and nonempty")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")


def am_modify(P, pi, spec: AMSpec, check_reversible: bool = True) -> np.ndarray:
    """Return the antithetically modified matrix P*."""
    P = np.array(P, dtype=np.float64)
    pi = np.asarray(pi, dtype=np.float64)
    m = pi.size
    if P.shape != (m, m):
        raise ValueError("dimension mismatch")
    if check_reversible:
        F = pi[:, None] * P
        if np.abs(F - F.T).max() > 1e-9:
            raise ValueError("antithetic modification requires a reversible kernel")
    A = np.asarray(sorted(spec.A), dtype=np.int64)
    B = np.asarray(sorted(spec.B), dtype=np.int64)
    pA, pB = pi[A].sum(), pi[B].sum()
    if pA <= 0 or pB <= 0:
        raise ValueError("A and B must have positive probability")
    d = float(spec.delta)
    if d == 0:
        return P
    dAA = d * pi[A] * pB / pA    # reduction of P(a -> a') for each a'
    dBB = d * pi[B] * pA / pB
    if (np.any(P[np.ix_(A, A)] < dAA[None, :] - FEAS_TOL)
            or np.any(P[np.ix_(B, B)] < dBB[None, :] - FEAS_TOL)):
        raise InfeasibleModification("antithetic modification infeasible")
    P[np.ix_(A, A)] -= dAA[None, :]
    P[np.ix_(A, B)] += d * pi[B][None, :]
    P[np.ix_(B, B)] -= dBB[None, :]
    P[np.ix_(B, A)] += d * pi[A][None, :]
    P[np.abs(P) < 1e-15] = 0.0
    return P


def binary_antithetic_row(pi, k) -> np.ndarray:
    """Row out of ``k`` for the recursive halving scheme.

    Starting from Gibbs sampling, the values are split into a first and
    second half and the maximal AM between the halves is applied; the same
    is then done inside each half, and so on down to single values.  Only
    the blocks containing ``k`` affect its row.  Within the current block
    every transition has probability c * pi(target); the maximal delta is
    c * min(pi(A)/pi(B), pi(B)/pi(A)), after which c for the half holding
    k drops to c - delta * pi(other)/pi(own).
    """
    pi = np.asarray(pi, dtype=np.float64)
    m = pi.size
    if m < 1 or m & (m - 1):
        raise ValueError("binary halving needs a power-of-two number of values")
    k = int(k)
    if not 0 <= k < m:
        raise ValueError(f"current value {k} outside 0..{m - 1}")
    row = pi.copy()
    lo, hi, c = 0, m, 1.0
    while hi - lo >= 2:
        mid = (lo + hi) // 2
        pA, pB = pi[lo:mid].sum(), pi[mid:hi].sum()
        own, other = ((lo, mid), (mid, hi)) if k < mid else ((mid, hi), (lo, mid))
        p_own, p_other = (pA, pB) if k < mid else (pB, pA)
        if pA > 0 and pB > 0 and c > 0:
            d = c * min(pA / pB, pB / pA)
            row[own[0]:own[1]] -= d * pi[own[0]:own[1]] * p_other / p_own
            row[other[0]:other[1]] += d * pi[other[0]:other[1]]
            c = max(0.0, c - d * p_other / p_own)
        lo, hi = own
    row[np.abs(row) < 1e-15] = 0.0
    return row


def binary_antithetic_matrix(pi) -> np.ndarray:
    return np.array([binary_antithetic_row(pi, k) for k in range(len(pi))])
