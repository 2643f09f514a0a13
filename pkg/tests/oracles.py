"""Independent reference implementations used to check the library.

These follow the defining constructions (nested antithetic modifications,
geometric towers, direct autocovariance sums, full enumeration) rather
than the library's algorithms, mostly in exact rational arithmetic.
"""

from fractions import Fraction as Fr
import itertools

import numpy as np


def frac_vec(pi):
    v = [Fr(p).limit_denominator(10 ** 9) if not isinstance(p, Fr) else p for p in pi]
    s = sum(v)
    return [x / s for x in v]


def gibbs_matrix(pi):
    return [list(pi) for _ in pi]


def max_delta(P, pi, A, B):
    """Largest feasible strength of the AM between A and B on matrix P."""
    pA = sum(pi[a] for a in A)
    pB = sum(pi[b] for b in B)
    cands = []
    for a in A:
        for a2 in A:
            if pi[a2] > 0:
                cands.append(P[a][a2] * pA / (pi[a2] * pB))
    for b in B:
        for b2 in B:
            if pi[b2] > 0:
                cands.append(P[b][b2] * pB / (pi[b2] * pA))
    return min(cands)


def apply_am(P, pi, A, B, d):
    pA = sum(pi[a] for a in A)
    pB = sum(pi[b] for b in B)
    Q = [row[:] for row in P]
    for a in A:
        for a2 in A:
            Q[a][a2] -= d * pi[a2] * pB / pA
        for b2 in B:
            Q[a][b2] += d * pi[b2]
    for b in B:
        for b2 in B:
            Q[b][b2] -= d * pi[b2] * pA / pB
        for a2 in A:
            Q[b][a2] += d * pi[a2]
    return Q


def nested_am_matrix(pi, sigma):
    """NAM as a chain of maximal AMs: {sigma_i} against everything after it."""
    pi = frac_vec(pi)
    P = gibbs_matrix(pi)
    m = len(pi)
    for i in range(m - 1):
        A = [sigma[i]]
        B = list(sigma[i + 1:])
        if sum(pi[b] for b in B) == 0 or pi[A[0]] == 0:
            continue
        P = apply_am(P, pi, A, B, max_delta(P, pi, A, B))
    return P


def binary_halving_matrix(pi):
    """Recursive halving with maximal AMs applied on the full matrix."""
    pi = frac_vec(pi)
    P = gibbs_matrix(pi)

    def rec(idx):
        nonlocal P
        if len(idx) < 2:
            return
        h = len(idx) // 2
        A, B = idx[:h], idx[h:]
        if sum(pi[a] for a in A) > 0 and sum(pi[b] for b in B) > 0:
            P = apply_am(P, pi, A, B, max_delta(P, pi, A, B))
        rec(A)
        rec(B)

    rec(list(range(len(pi))))
    return P


def tower_matrix(pi, shift, sigma):
    """Stack values in order sigma on [0, 1); from value k, a point u in its
    interval moves to u - shift (mod 1).  P(k -> i) = overlap length / pi(k)."""
    pi = frac_vec(pi)
    shift = Fr(shift)
    m = len(pi)
    lo = {}
    c = Fr(0)
    for j in sigma:
        lo[j] = c
        c += pi[j]

    def pieces(a, b):
        # interval [a, b) reduced mod 1, b - a <= 1
        a2, b2 = a % 1, a % 1 + (b - a)
        if b2 <= 1:
            return [(a2, b2)]
        return [(a2, Fr(1)), (Fr(0), b2 - 1)]

    P = [[Fr(0)] * m for _ in range(m)]
    for k in range(m):
        if pi[k] == 0:
            continue
        for (a, b) in pieces(lo[k] - shift, lo[k] + pi[k] - shift):
            for i in range(m):
                ov = min(b, lo[i] + pi[i]) - max(a, lo[i])
                if ov > 0:
                    P[k][i] += ov / pi[k]
    return P


def to_float(P):
    return np.array([[float(x) for x in row] for row in P])


def autocov_direct(f, maxlag):
    f = np.asarray(f, dtype=float)
    N = f.size
    d = f - f.mean()
    return np.array([np.dot(d[: N - k], d[k:]) / N for k in range(maxlag + 1)])


def beliefnet_expectations(alpha, beta, gamma, linear=False):
    """Exact expectations of the three indicators by numpy broadcasting."""
    f = (lambda w: w) if linear else np.exp
    nt, vt = alpha.shape
    nm, vm = beta.shape[1], beta.shape[3]
    nb, vb = gamma.shape[1], gamma.shape[3]

    def logsoftmax(s):
        s = s - s.max(-1, keepdims=True)
        return s - np.log(np.exp(s).sum(-1, keepdims=True))

    top_states = np.array(list(itertools.product(range(vt), repeat=nt)))
    mid_states = np.array(list(itertools.product(range(vm), repeat=nm)))
    la = logsoftmax(alpha)
    lp_top = sum(la[i, top_states[:, i]] for i in range(nt))                 # (T,)
    # s[t, j, v] = sum_i exp(beta[i, j, top_i, v])
    s_mid = sum(f(beta[i][:, top_states[:, i], :]).transpose(1, 0, 2) for i in range(nt))
    lmid = logsoftmax(s_mid)                                                   # (T, nm, vm)
    lp_mid = sum(lmid[:, j, mid_states[:, j]] for j in range(nm))              # (T, M)
    s_bot = sum(f(gamma[j][:, mid_states[:, j], :]).transpose(1, 0, 2) for j in range(nm))
    lbot = logsoftmax(s_bot)                                                   # (M, nb, vb)
    p_bot1 = np.exp(lbot[:, 0, 0])                                             # P(bot1 = 1 | mid)
    w = np.exp(lp_top[:, None] + lp_mid)                                       # (T, M)
    w /= w.sum()
    e_mid1 = w[:, mid_states[:, 0] == 0].sum()
    e_bot1 = (w * p_bot1[None, :]).sum()
    e_and = (w[top_states[:, 0] == 0] * p_bot1[None, :]).sum()
    return e_mid1, e_bot1, e_and


def potts_enumerate(R, C, m, b):
    """Exact means of (count of 1s, sum of squared counts, equal pairs)."""
    n = R * C
    acc = np.zeros(3)
    Z = 0.0
    for x in itertools.product(range(m), repeat=n):
        g = np.array(x).reshape(R, C)
        eq = int((g == np.roll(g, -1, 0)).sum() + (g == np.roll(g, -1, 1)).sum())
        w = np.exp(b * eq)
        cnt = np.bincount(g.ravel(), minlength=m)
        acc += w * np.array([cnt[0], (cnt ** 2).sum(), eq])
        Z += w
    return acc / Z
