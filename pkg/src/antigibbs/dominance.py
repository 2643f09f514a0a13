"""Predicates on transition matrices: invariance, reversibility, Peskun and
efficiency dominance, spectra, and closed-form NAM/ZDNAM eigenvalues."""

from dataclasses import dataclass
import warnings

import numpy as np

from .kernels import order_permutation

STRUCT_TOL = 1e-9
EIG_TOL = 1e-8


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    has_unit_eigenvalue: bool


def _square(P, pi):
    P = np.asarray(P, dtype=np.float64)
    pi = np.asarray(pi, dtype=np.float64)
    if P.ndim != 2 or P.shape != (pi.size, pi.size):
        raise ValueError("dimension mismatch")
    return P, pi


def check_invariance(P, pi, tol: float = STRUCT_TOL) -> bool:
    P, pi = _square(P, pi)
    return bool(np.abs(pi @ P - pi).max() <= tol)


def check_detailed_balance(P, pi, tol: float = STRUCT_TOL) -> bool:
    P, pi = _square(P, pi)
    F = pi[:, None] * P
    return bool(np.abs(F - F.T).max() <= tol)


def peskun_dominates(Pstar, P, tol: float = 1e-12) -> bool:
    """True iff every off-diagonal entry of Pstar is at least that of P."""
    Pstar = np.asarray(Pstar, dtype=np.float64)
    P = np.asarray(P, dtype=np.float64)
    if Pstar.shape != P.shape or P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("dimension mismatch")
    off = ~np.eye(P.shape[0], dtype=bool)
    return bool(np.all(Pstar[off] >= P[off] - tol))


def _symmetrized(P, pi):
    """D^1/2 P D^-1/2 restricted to values with positive probability."""
    P, pi = _square(P, pi)
    if not check_detailed_balance(P, pi):
        raise ValueError("spectrum requires reversible kernel")
    keep = pi > 0
    P = P[np.ix_(keep, keep)]
    r = np.sqrt(pi[keep])
    S = r[:, None] * P / r[None, :]
    return (S + S.T) / 2


def spectrum(P, pi) -> SpectrumReport:
    ev = np.linalg.eigvalsh(_symmetrized(P, pi))
    return SpectrumReport(ev, bool(np.any(np.abs(ev - 1) <= EIG_TOL)))


def _is_irreducible(P, pi) -> bool:
    keep = np.asarray(pi) > 0
    A = np.asarray(P)[np.ix_(keep, keep)] > 0
    n = A.shape[0]
    seen = np.zeros(n, bool)
    seen[0] = True
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for j in np.nonzero(A[i] & ~seen)[0]:
            seen[j] = True
            frontier.append(j)
    return bool(seen.all())


def efficiency_dominates(P, Q, pi, tol: float = EIG_TOL) -> bool:
    """True iff P efficiency-dominates Q, i.e. Q - P has no negative eigenvalue."""
    SP = _symmetrized(P, pi)
    SQ = _symmetrized(Q, pi)
    if not (_is_irreducible(P, pi) and _is_irreducible(Q, pi)):
        warnings.warn("efficiency comparison of a reducible kernel", RuntimeWarning)
    return bool(np.linalg.eigvalsh(SQ - SP).min() >= -tol)


def difference_eigenvalues(P, Q, pi) -> np.ndarray:
    """Sorted eigenvalues of P - Q (both reversible w.r.t. pi)."""
    return np.linalg.eigvalsh(_symmetrized(P, pi) - _symmetrized(Q, pi))


def forced_spectrum(pi) -> np.ndarray:
    """Eigenvalues of the forced matrix used when max pi >= 1/2."""
    pi = np.asarray(pi, dtype=np.float64)
    p = pi.max()
    ev = np.zeros(pi.size)
    ev[0] = 1.0
    if pi.size > 1:
        ev[1] = -(1 - p) / p
    return np.sort(ev)


def nam_spectrum_closed_form(pi, sigma=None, variant: str = "nam") -> np.ndarray:
    """Eigenvalues of a NAM or ZDNAM matrix from its construction steps.

    ``variant="nam"`` uses the focal order ``sigma`` (default: identity);
    ``variant="zdnam"`` uses the non-increasing order.  Returned sorted.
    """
    pi = np.asarray(pi, dtype=np.float64)
    m = pi.size
    if variant == "nam":
        sigma = np.arange(m) if sigma is None else np.asarray(sigma, dtype=np.int64)
    elif variant == "zdnam":
        sigma = order_permutation(pi, "non-increasing")
        if pi[sigma[0]] >= 0.5:
            return forced_spectrum(pi)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    q = pi[sigma]
    ev = [1.0]
    s, f = 1.0, 1.0
    i = 0
    while len(ev) < m:
        if variant == "zdnam" and i + 1 < m and q[i + 1] >= s - q[i] - q[i + 1]:
            s2 = s - q[i] - q[i + 1]
            d = 1 - (q[i] - q[i + 1] + s2) * (q[i + 1] ** 2 - (q[i] - s2) ** 2) / (q[i] * q[i + 1] * s2)
            r = np.sqrt(max(d, 0.0))
            ev += [-f / 2 * (1 + r), -f / 2 * (1 - r)]
            break
        s_new = s - q[i]
        if q[i] >= s_new:
            ev.append(-f * s_new / q[i])
            break
        ev.append(-q[i] * f / s_new)
        f *= 1 - q[i] / s_new
        s = s_new
        i += 1
    ev += [0.0] * (m - len(ev))
    return np.sort(np.array(ev[:m]))
