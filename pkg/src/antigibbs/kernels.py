"""Single-variable update kernels: Gibbs sampling and thirteen modifications.

Every kernel takes the (normalized) conditional distribution ``pi`` of the
variable being updated and its current value ``k`` (0-based) and produces
the row of transition probabilities out of ``k``.  The shifted-tower and
flattened-slice families also have direct samplers driven by one uniform
variate.  Inner routines are numba-compiled so the chain runner can call
them without leaving nopython mode; the public wrappers at the bottom
accept any sequence.
"""

from enum import IntEnum

import numpy as np
from numba import njit

from .prob_core import NEG_CLAMP, categorical_index


class Method(IntEnum):
    GS = 0
    MHGS = 1
    UNAM = 2
    DNAM = 3
    UDNAM = 4
    ZDNAM = 5
    ST = 6
    UST = 7
    DST = 8
    UDST = 9
    HST = 10
    OHST = 11
    FSS = 12
    ZFSS = 13


METHOD_NAMES = [m.name for m in Method]
REVERSIBLE = ("GS", "MHGS", "UNAM", "DNAM", "UDNAM", "ZDNAM", "UDST", "HST", "OHST")
EDGE = 1e-12
MINIMAL_SELF = ("ZDNAM", "ST", "UST", "DST", "UDST", "HST", "OHST", "ZFSS")


def parse_method(name) -> Method:
    if isinstance(name, (Method, int, np.integer)):
        try:
            return Method(int(name))
        except ValueError:
            raise ValueError(f"unknown method {name!r}") from None
    try:
        return Method[str(name).upper()]
    except KeyError:
        raise ValueError(f"unknown method {name!r}") from None


# ---------------------------------------------------------------- helpers


@njit(cache=True)
def _order(pi, descending):
    """Indices sorted by probability.

    Non-decreasing order is a stable sort (ties by ascending index);
    non-increasing order is its exact reverse, so ties come last index
    first.  Making the two orders mirror images keeps UST/DST mutual
    reverses (so UDST is reversible) and reproduces the reference DNAM
    matrices for tied probabilities.
    """
    m = pi.shape[0]
    sigma = np.empty(m, np.int64)
    for i in range(m):
        v = pi[i]
        j = i
        while j > 0 and pi[sigma[j - 1]] > v:
            sigma[j] = sigma[j - 1]
            j -= 1
        sigma[j] = i
    if descending:
        return sigma[::-1].copy()
    return sigma


@njit(cache=True)
def _argmax_first(pi):
    j = 0
    for i in range(1, pi.shape[0]):
        if pi[i] > pi[j]:
            j = i
    return j


@njit(cache=True)
def _clamp(p):
    for i in range(p.shape[0]):
        if p[i] < 0 and p[i] >= -NEG_CLAMP:
            p[i] = 0.0
    return p


@njit(cache=True)
def _forced_row(pi, k):
    """Row out of a value with probability >= 1/2 under minimal self transitions."""
    m = pi.shape[0]
    p = np.empty(m)
    pk = pi[k]
    for i in range(m):
        if i != k:
            p[i] = min(1.0, pi[i] / pk)
    p[k] = (2 * pk - 1) / pk
    return p


@njit(cache=True)
def _one_hot(m, j):
    p = np.zeros(m)
    p[j] = 1.0
    return p


@njit(cache=True)
def _min_self(pi):
    p = pi.max()
    if p <= 0.5:
        return 0.0
    return (2 * p - 1) / p


# ---------------------------------------------------------- Gibbs family


@njit(cache=True)
def _gs_row(pi, k):
    return pi.copy()


@njit(cache=True)
def _mhgs_row(pi, k):
    m = pi.shape[0]
    for i in range(m):
        if 1 - pi[i] <= 0:
            return pi.copy()
    p = np.empty(m)
    s = 0.0
    for i in range(m):
        if i != k:
            p[i] = min(1.0, pi[i] / (1 - pi[k]), pi[i] / (1 - pi[i]))
            s += p[i]
    p[k] = 0.0 if 1 - s < 0 else 1 - s
    return p


@njit(cache=True)
def _nam_row(pi, sigma, k):
    """Nested antithetic modification with focal values taken in order sigma."""
    m = pi.shape[0]
    p = np.zeros(m)
    s = 1.0
    f = 1.0
    i = 0
    while sigma[i] != k:
        j = sigma[i]
        if f <= 0:
            p[j] = 0.0
        else:
            q = pi[j]
            s -= q
            if q >= s:
                p[j] = f
                f = 0.0
            else:
                p[j] = (q / s) * f
                f -= p[j]
        i += 1
    if f <= 0:
        p[k] = 0.0
    else:
        q = pi[k]
        s -= q
        if q > s:
            p[k] = ((q - s) / q) * f
            for jj in range(i + 1, m):
                p[sigma[jj]] = min(f, pi[sigma[jj]] / q * f)
        elif s > 0:
            p[k] = 0.0
            for jj in range(i + 1, m):
                p[sigma[jj]] = min(f, pi[sigma[jj]] / s * f)
    return _clamp(p)


@njit(cache=True)
def _unam_row(pi, k):
    m = pi.shape[0]
    sigma = _order(pi, False)
    p = np.zeros(m)
    s = 1.0
    f = 1.0
    i = 0
    while sigma[i] != k:
        j = sigma[i]
        q = pi[j]
        s -= q
        p[j] = min(f, q / s * f)
        f -= p[j]
        i += 1
    if i == m - 1:
        p[k] = f
    else:
        s -= pi[k]
        p[k] = 0.0
        for jj in range(i + 1, m):
            p[sigma[jj]] = min(f, pi[sigma[jj]] / s * f)
    return _clamp(p)


@njit(cache=True)
def _dnam_row(pi, k):
    if pi[k] >= 0.5:
        return _forced_row(pi, k)
    return _nam_row(pi, _order(pi, True), k)


@njit(cache=True)
def _udnam_row(pi, k):
    return 0.5 * (_unam_row(pi, k) + _dnam_row(pi, k))


@njit(cache=True)
def _zdnam_row(pi, k):
    m = pi.shape[0]
    if pi[k] >= 0.5:
        return _forced_row(pi, k)
    sigma = _order(pi, True)
    p = np.zeros(m)
    if pi[sigma[0]] >= 0.5:
        p[sigma[0]] = 1.0
        return p
    s = 1.0
    f = 1.0
    i = 0
    # forward check: stop one step before plain DNAM would leave mass on a
    # value heavier than everything after it
    while (f > 0 and sigma[i] != k
           and pi[sigma[i + 1]] < s - pi[sigma[i]] - pi[sigma[i + 1]]):
        q = pi[sigma[i]]
        s -= q
        p[sigma[i]] = (q / s) * f
        f -= p[sigma[i]]
        i += 1
    q = pi[sigma[i]]
    s -= q
    if f > 0 and s > 0 and i < m - 1:
        q2 = pi[sigma[i + 1]]
        s2 = max(0.0, s - q2)
        if q2 >= s2:
            a = (q + q2 - s2) / 2
            if k == sigma[i]:
                p[sigma[i]] = 0.0
                p[sigma[i + 1]] = f * a / q
            elif k == sigma[i + 1]:
                p[sigma[i]] = f * a / q2
                p[sigma[i + 1]] = 0.0
            if s2 <= 0:
                i += 2
            else:
                b = (q - q2 + s2) / (2 * s2)
                c = (s2 + q2 - q) / (2 * s2)
                if k == sigma[i]:
                    i += 2
                    while i < m:
                        p[sigma[i]] = f * b * pi[sigma[i]] / q
                        i += 1
                elif k == sigma[i + 1]:
                    i += 2
                    while i < m:
                        p[sigma[i]] = f * c * pi[sigma[i]] / q2
                        i += 1
                else:
                    p[sigma[i]] = f * b
                    p[sigma[i + 1]] = f * c
                    i += 2
        else:
            p[sigma[i]] = 0.0
            i += 1
            while i < m:
                p[sigma[i]] = (pi[sigma[i]] / s) * f
                i += 1
    while i < m:
        p[sigma[i]] = 0.0
        i += 1
    return _clamp(p)


# ------------------------------------------------------ shifted towers


@njit(cache=True)
def _interior(u):
    # keep the point off interval ends, where rounding in the cumulative
    # sums could pick a neighbour with zero transition probability
    return min(max(u, EDGE), 1.0 - EDGE)


@njit(cache=True)
def _st_row(pi, k, shift, sigma):
    m = pi.shape[0]
    j = _argmax_first(pi)
    if pi[j] >= 0.5:
        return _forced_row(pi, k) if k == j else _one_hot(m, j)
    cum = np.empty(m)
    total = 0.0
    for i in range(m):
        cum[sigma[i]] = total
        total += pi[sigma[i]]
    v = np.empty(m)
    t = 0.0
    pk = pi[k]
    for i in range(m):
        d1 = pk - shift + cum[k] - cum[i]
        d2 = d1 + total
        v[i] = (max(0.0, min(d1, pk + pi[i] - d1, pk, pi[i]))
                + max(0.0, min(d2, pk + pi[i] - d2, pk, pi[i])))
        t += v[i]
    if t == 0:
        return _one_hot(m, _argmax_first(pi))
    return v / t


@njit(cache=True)
def _st_sample(pi, k, shift, sigma, r):
    m = pi.shape[0]
    j = _argmax_first(pi)
    if pi[k] <= 0 or (pi[j] >= 0.5 and k != j):
        return j
    if pi[k] >= 0.5:
        return categorical_index(_forced_row(pi, k), r)
    u = 0.0
    i = 0
    while sigma[i] != k:
        u += pi[sigma[i]]
        i += 1
    u += _interior(r) * pi[k] - shift
    if u < 0:
        u += 1
    # intervals are half-open [lo, hi)
    s = 0.0
    j = -1
    i = 0
    while i < m and u >= s:
        if pi[sigma[i]] > 0:
            s += pi[sigma[i]]
            j = sigma[i]
        i += 1
    return j


@njit(cache=True)
def _identity(m):
    return np.arange(m)


@njit(cache=True)
def _peak_first_order(pi, descending):
    """Most probable value first, then the rest sorted up or down."""
    m = pi.shape[0]
    x1 = _argmax_first(pi)
    rest = _order(pi, descending)
    sigma = np.empty(m, np.int64)
    sigma[0] = x1
    j = 1
    for i in range(m):
        if rest[i] != x1:
            sigma[j] = rest[i]
            j += 1
    return sigma


@njit(cache=True)
def _ust_row(pi, k):
    return _st_row(pi, k, pi.max(), _peak_first_order(pi, False))


@njit(cache=True)
def _dst_row(pi, k):
    return _st_row(pi, k, pi.max(), _peak_first_order(pi, True))


@njit(cache=True)
def _udst_row(pi, k):
    return 0.5 * (_ust_row(pi, k) + _dst_row(pi, k))


# ------------------------------------------------ flattened slice sampling


@njit(cache=True)
def _fss_setup(pi, zero):
    """Return (x1, pi1, pi2, j2, x0, f) for the flattened-slice construction."""
    m = pi.shape[0]
    x1 = _argmax_first(pi)
    p1 = pi[x1]
    p2 = 0.0
    j2 = -1
    for i in range(m):
        if i != x1 and pi[i] > p2:
            p2 = pi[i]
            j2 = i
    x0 = x1
    while True:
        x0 = m - 1 if x0 == 0 else x0 - 1
        pstar = (0.5 - p1) + (0.5 - pi[x0])
        f = (p1 - p2) / pstar
        if not (zero and pi[x0] < f * p2):
            break
    return x1, p1, p2, j2, x0, f


@njit(cache=True)
def _fss_prev(i, x1, x0, m):
    """Step left along the bars: x1 -> x0 -> (value before x1) -> ..., skipping x0."""
    if i == x1:
        return x0
    if i == x0:
        i = m - 1 if x1 == 0 else x1 - 1
    else:
        i = m - 1 if i == 0 else i - 1
    if i == x0:
        i = m - 1 if x0 == 0 else x0 - 1
    return i


@njit(cache=True)
def _fss_forced(pi, k, x1, p1):
    m = pi.shape[0]
    if k != x1:
        return _one_hot(m, x1)
    p = np.empty(m)
    for i in range(m):
        p[i] = (2 * p1 - 1) / p1 if i == k else pi[i] / p1
    return p


@njit(cache=True)
def _fss_row(pi, k, zero):
    m = pi.shape[0]
    if pi[k] <= 0:
        return pi.copy()
    x1 = _argmax_first(pi)
    p1 = pi[x1]
    if p1 >= 0.5 or m <= 2:
        return _fss_forced(pi, k, x1, p1)
    x1, p1, p2, j2, x0, f = _fss_setup(pi, zero)
    v = np.zeros(m)
    if k == x1:
        for i in range(m):
            if i != x1 and i != x0:
                v[i] = f * pi[i]
    lo = 0.0
    hi = p2 if k == x1 else pi[k]
    i = k
    while lo < hi:
        i = _fss_prev(i, x1, x0, m)
        if lo < pi[i]:
            if i != x1 and i != x0:
                t = min(hi, f * pi[i])
                if lo < t:
                    v[x1] += t - lo
                    lo = t
            t = min(hi, pi[i])
            v[i] += t - lo
            lo = t
    return _clamp(v / pi[k])


@njit(cache=True)
def _fss_sample(pi, k, zero, u):
    m = pi.shape[0]
    if pi[k] <= 0:
        return categorical_index(pi, u)
    x1 = _argmax_first(pi)
    p1 = pi[x1]
    if p1 >= 0.5 or m <= 2:
        if k != x1:
            return x1
        return categorical_index(_fss_forced(pi, k, x1, p1), u)
    x1, p1, p2, j, x0, f = _fss_setup(pi, zero)
    r = _interior(u) * pi[k]
    if k == x1 and r >= p2:
        # landed in the excess of the peak, spread over the other values
        r -= p2
        s = 0.0
        i = -1
        while i < m - 1 and r >= s:
            i += 1
            if i != x1 and i != x0 and pi[i] > 0:
                s += f * pi[i]
                j = i
        return j
    lo = 0.0
    hi = p2 if k == x1 else pi[k]
    i = k
    s = 0.0
    while lo < hi and r >= s:
        i = _fss_prev(i, x1, x0, m)
        if lo < pi[i]:
            if i != x1 and i != x0:
                t = min(hi, f * pi[i])
                if lo < t:
                    s += t - lo
                    j = x1
                    lo = t
            if r >= s:
                t = min(hi, pi[i])
                s += t - lo
                j = i
                lo = t
    return j


# ------------------------------------------------------------- dispatch


@njit(cache=True)
def _kernel_row(method, pi, k):
    m = pi.shape[0]
    if method == 0:
        return _gs_row(pi, k)
    elif method == 1:
        return _mhgs_row(pi, k)
    elif method == 2:
        return _unam_row(pi, k)
    elif method == 3:
        return _dnam_row(pi, k)
    elif method == 4:
        return _udnam_row(pi, k)
    elif method == 5:
        return _zdnam_row(pi, k)
    elif method == 6:
        return _st_row(pi, k, pi.max(), _identity(m))
    elif method == 7:
        return _ust_row(pi, k)
    elif method == 8:
        return _dst_row(pi, k)
    elif method == 9:
        return _udst_row(pi, k)
    elif method == 10:
        return _st_row(pi, k, 0.5, _identity(m))
    elif method == 11:
        return _st_row(pi, k, 0.5, _order(pi, True))
    elif method == 12:
        return _fss_row(pi, k, False)
    else:
        return _fss_row(pi, k, True)


@njit(cache=True)
def _kernel_draw(method, pi, k, u, direct):
    """New value for one update, from one uniform ``u`` in [0, 1).

    With ``direct`` the shifted-tower and slice families use their direct
    samplers (UDST picks UST or DST with the first bit of ``u``); otherwise
    every method samples from its row.
    """
    m = pi.shape[0]
    if direct and method >= 6:
        if method == 6:
            return _st_sample(pi, k, pi.max(), _identity(m), u)
        elif method == 7:
            return _st_sample(pi, k, pi.max(), _peak_first_order(pi, False), u)
        elif method == 8:
            return _st_sample(pi, k, pi.max(), _peak_first_order(pi, True), u)
        elif method == 9:
            if u < 0.5:
                return _st_sample(pi, k, pi.max(), _peak_first_order(pi, False), 2 * u)
            return _st_sample(pi, k, pi.max(), _peak_first_order(pi, True), 2 * u - 1)
        elif method == 10:
            return _st_sample(pi, k, 0.5, _identity(m), u)
        elif method == 11:
            return _st_sample(pi, k, 0.5, _order(pi, True), u)
        elif method == 12:
            return _fss_sample(pi, k, False, u)
        else:
            return _fss_sample(pi, k, True, u)
    if method == 0:
        return categorical_index(pi, u)
    return categorical_index(_kernel_row(method, pi, k), u)


# ------------------------------------------------------- public wrappers


def _pi(pi) -> np.ndarray:
    p = np.ascontiguousarray(pi, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("probability vector must be 1-d and non-empty")
    return p


def _k(k, m) -> int:
    k = int(k)
    if not 0 <= k < m:
        raise ValueError(f"current value {k} outside 0..{m - 1}")
    return k


def _sigma(sigma, m) -> np.ndarray:
    s = np.ascontiguousarray(sigma, dtype=np.int64)
    if s.shape != (m,) or not np.array_equal(np.sort(s), np.arange(m)):
        raise ValueError("sigma must be a permutation of 0..m-1")
    return s


def order_permutation(pi, direction: str = "non-decreasing") -> np.ndarray:
    """Stable sort of values by probability; ties keep ascending index order."""
    if direction not in ("non-decreasing", "non-increasing"):
        raise ValueError(f"unknown direction {direction!r}")
    return _order(_pi(pi), direction == "non-increasing")


def gs_row(pi, k):
    p = _pi(pi)
    return _gs_row(p, _k(k, p.size))


def mhgs_row(pi, k):
    p = _pi(pi)
    return _mhgs_row(p, _k(k, p.size))


def nam_row(pi, sigma, k):
    p = _pi(pi)
    return _nam_row(p, _sigma(sigma, p.size), _k(k, p.size))


def unam_row(pi, k):
    p = _pi(pi)
    return _unam_row(p, _k(k, p.size))


def dnam_row(pi, k):
    p = _pi(pi)
    return _dnam_row(p, _k(k, p.size))


def udnam_row(pi, k):
    p = _pi(pi)
    return _udnam_row(p, _k(k, p.size))


def zdnam_row(pi, k):
    p = _pi(pi)
    return _zdnam_row(p, _k(k, p.size))


def _shift(shift):
    shift = float(shift)
    if not 0 < shift < 1:
        raise ValueError("shift must lie strictly between 0 and 1")
    return shift


def shifted_tower_row(pi, k, shift, sigma=None):
    p = _pi(pi)
    sig = np.arange(p.size) if sigma is None else _sigma(sigma, p.size)
    return _st_row(p, _k(k, p.size), _shift(shift), sig)


def shifted_tower_sample(pi, k, shift, sigma=None, u=0.5) -> int:
    p = _pi(pi)
    sig = np.arange(p.size) if sigma is None else _sigma(sigma, p.size)
    return int(_st_sample(p, _k(k, p.size), _shift(shift), sig, float(u)))


def udst_row(pi, k):
    p = _pi(pi)
    return _udst_row(p, _k(k, p.size))


def fss_row(pi, k, zero_flag: bool = False):
    p = _pi(pi)
    return _fss_row(p, _k(k, p.size), bool(zero_flag))


def fss_sample(pi, k, zero_flag: bool = False, u: float = 0.5) -> int:
    p = _pi(pi)
    return int(_fss_sample(p, _k(k, p.size), bool(zero_flag), float(u)))


def min_self_probability(pi) -> float:
    """Smallest possible self-transition probability out of the most probable value."""
    return float(_min_self(_pi(pi)))


def kernel_row(method, pi, k):
    p = _pi(pi)
    return _kernel_row(int(parse_method(method)), p, _k(k, p.size))


def kernel_sample(method, pi, k, u: float, direct: bool = True) -> int:
    p = _pi(pi)
    return int(_kernel_draw(int(parse_method(method)), p, _k(k, p.size), float(u), direct))


@njit(cache=True)
def _draw_many(method, pi, k, us, direct):
    out = np.empty(us.shape[0], dtype=np.int64)
    for t in range(us.shape[0]):
        out[t] = _kernel_draw(method, pi, k, us[t], direct)
    return out


def kernel_sample_many(method, pi, k, us, direct: bool = True) -> np.ndarray:
    """``kernel_sample`` applied to each uniform in ``us``."""
    p = _pi(pi)
    us = np.ascontiguousarray(us, dtype=np.float64)
    return _draw_many(int(parse_method(method)), p, _k(k, p.size), us, direct)


def kernel_matrix(method, pi) -> np.ndarray:
    """Full m x m transition matrix, built row by row."""
    p = _pi(pi)
    meth = int(parse_method(method))
    return np.array([_kernel_row(meth, p, k) for k in range(p.size)])
