"""Benchmark target distributions: Potts lattice, Bayesian mixture, belief net.

Each model exposes numba-compiled pieces the chain runner calls directly:

    cond(P, x, A, i, out) -> m_i     normalized conditional of x[i] into out[:m_i]
    change(P, x, A, i, old, new)     update auxiliary statistics A after x[i] changed
    funcs(P, x, A, out)              monitored function values
    logjoint(P, x)                   unnormalized log probability (for enumeration)
    scratch_aux(P, x) -> A           auxiliary statistics computed from scratch

``P`` is a tuple of parameters and ``A`` a tuple of mutable arrays owned by
one chain.  Values are 0-based, so "value 1" in a function name is 0 here.
"""

from importlib import resources
import math

import numpy as np
from numba import njit

ENUM_LIMIT = 10 ** 8


@njit(cache=True)
def _normalize_log(out, m):
    top = out[0]
    for v in range(1, m):
        if out[v] > top:
            top = out[v]
    tot = 0.0
    for v in range(m):
        out[v] = math.exp(out[v] - top)
        tot += out[v]
    for v in range(m):
        out[v] /= tot


class Model:
    """Bundle of parameters and compiled callbacks for one target distribution."""

    name = "model"
    function_names: tuple = ()
    lattice_shape = None
    allows_sequential = True

    def __init__(self, params, n_values):
        self.params = params
        self.n_values = np.asarray(n_values, dtype=np.int64)
        self.n = int(self.n_values.size)
        self.max_m = int(self.n_values.max())

    def aux(self, x):
        return type(self)._scratch(self.params, np.asarray(x, dtype=np.int64))

    def conditional(self, x, i) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        out = np.empty(self.max_m)
        m = type(self)._cond(self.params, x, self.aux(x), int(i), out)
        return out[:m].copy()

    def functions(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        out = np.empty(len(self.function_names))
        type(self)._funcs(self.params, x, self.aux(x), out)
        return out

    def log_joint(self, x) -> float:
        return float(type(self)._logjoint(self.params, np.asarray(x, dtype=np.int64)))

    def describe(self) -> dict:
        return {"name": self.name}


# ----------------------------------------------------------------- Potts


@njit(cache=True)
def _potts_neighbors(P, i):
    R, C = P[0], P[1]
    r = i // C
    c = i - r * C
    return (((r + R - 1) % R) * C + c, ((r + 1) % R) * C + c,
            r * C + (c + C - 1) % C, r * C + (c + 1) % C)


@njit(cache=True)
def _potts_cond(P, x, A, i, out):
    m, b = P[2], P[3]
    for v in range(m):
        out[v] = 0.0
    for j in _potts_neighbors(P, i):
        out[x[j]] += b
    _normalize_log(out, m)
    return m


@njit(cache=True)
def _potts_change(P, x, A, i, old, new):
    counts, eq = A
    counts[old] -= 1
    counts[new] += 1
    for j in _potts_neighbors(P, i):
        if j == i:
            continue
        if x[j] == old:
            eq[0] -= 1
        if x[j] == new:
            eq[0] += 1


@njit(cache=True)
def _potts_funcs(P, x, A, out):
    counts, eq = A
    ss = 0
    for v in range(counts.shape[0]):
        ss += counts[v] * counts[v]
    out[0] = counts[0]
    out[1] = ss
    out[2] = eq[0]


@njit(cache=True)
def _potts_scratch(P, x):
    R, C, m = P[0], P[1], P[2]
    counts = np.zeros(m, np.int64)
    eq = np.zeros(1, np.int64)
    for i in range(R * C):
        counts[x[i]] += 1
        nb = _potts_neighbors(P, i)
        # each site owns the pair to its lower and right neighbor
        if x[nb[1]] == x[i]:
            eq[0] += 1
        if x[nb[3]] == x[i]:
            eq[0] += 1
    return counts, eq


@njit(cache=True)
def _potts_logjoint(P, x):
    return P[3] * _potts_scratch(P, x)[1][0]


class Potts(Model):
    """m-value Potts model on an R x C torus, pi(x) ~ exp(b * #equal neighbor pairs)."""

    name = "potts"
    function_names = ("count_of_1s", "sum_sq_counts", "equal_neighbor_pairs")
    _cond = staticmethod(_potts_cond)
    _change = staticmethod(_potts_change)
    _funcs = staticmethod(_potts_funcs)
    _scratch = staticmethod(_potts_scratch)
    _logjoint = staticmethod(_potts_logjoint)

    def __init__(self, R: int = 8, C: int = 8, m: int = 4, b: float = 0.85):
        if R < 2 or C < 2 or m < 2:
            raise ValueError("Potts model needs R, C >= 2 and m >= 2")
        self.R, self.C, self.m, self.b = int(R), int(C), int(m), float(b)
        super().__init__((self.R, self.C, self.m, self.b), np.full(self.R * self.C, self.m))
        self.lattice_shape = (self.R, self.C)

    def describe(self):
        return {"name": self.name, "R": self.R, "C": self.C, "m": self.m, "b": self.b}


# --------------------------------------------------------------- mixture


def load_mixture_data() -> np.ndarray:
    """The 30 x 10 binary data set, one observation per row, in original order."""
    text = resources.files("antigibbs").joinpath("data/mixture_data.txt").read_text()
    return np.array([[int(t) for t in line.split()] for line in text.splitlines() if line.strip()],
                    dtype=np.int64)


@njit(cache=True)
def _mix_cond(P, x, A, i, out):
    Y, m, targets, logtab = P
    Cn, S = A
    H = Y.shape[1]
    xi = x[i]
    for v in range(m):
        own = 1 if v == xi else 0
        c = Cn[v] - own
        lw = logtab[c + 1] - H * logtab[c + 2]
        for h in range(H):
            s = S[v, h] - own * Y[i, h]
            if Y[i, h] == 1:
                lw += logtab[s + 1]
            else:
                lw += logtab[c - s + 1]
        out[v] = lw
    _normalize_log(out, m)
    return m


@njit(cache=True)
def _mix_change(P, x, A, i, old, new):
    Y = P[0]
    Cn, S = A
    Cn[old] -= 1
    Cn[new] += 1
    for h in range(Y.shape[1]):
        S[old, h] -= Y[i, h]
        S[new, h] += Y[i, h]


@njit(cache=True)
def _mix_funcs(P, x, A, out):
    targets = P[2]
    Cn = A[0]
    out[0] = 1.0 if x[targets[0]] == 0 else 0.0
    out[1] = Cn[x[targets[1]]]
    out[2] = Cn[x[targets[2]]]


@njit(cache=True)
def _mix_scratch(P, x):
    Y, m = P[0], P[1]
    Cn = np.zeros(m, np.int64)
    S = np.zeros((m, Y.shape[1]), np.int64)
    for i in range(Y.shape[0]):
        Cn[x[i]] += 1
        for h in range(Y.shape[1]):
            S[x[i], h] += Y[i, h]
    return Cn, S


@njit(cache=True)
def _mix_logjoint(P, x):
    Y, m = P[0], P[1]
    Cn, S = _mix_scratch(P, x)
    lj = 0.0
    for v in range(m):
        lj += math.lgamma(Cn[v] + 1)
        for h in range(Y.shape[1]):
            lj += (math.lgamma(S[v, h] + 1) + math.lgamma(Cn[v] - S[v, h] + 1)
                   - math.lgamma(Cn[v] + 2))
    return lj


class Mixture(Model):
    """Collapsed Bayesian mixture of independent-Bernoulli components.

    Variable j holds the component indicator of observation ``order[j]``;
    the observation order is shuffled once from ``obs_order_seed``.
    """

    name = "mixture"
    function_names = ("obs1_in_cluster1", "obs10_cluster_size", "obs30_cluster_size")
    allows_sequential = False
    _cond = staticmethod(_mix_cond)
    _change = staticmethod(_mix_change)
    _funcs = staticmethod(_mix_funcs)
    _scratch = staticmethod(_mix_scratch)
    _logjoint = staticmethod(_mix_logjoint)

    def __init__(self, m: int = 9, obs_order_seed: int | None = 0, data=None):
        data = load_mixture_data() if data is None else np.asarray(data, dtype=np.int64)
        if data.ndim != 2 or not np.isin(data, (0, 1)).all():
            raise ValueError("mixture data must be a binary matrix")
        n = data.shape[0]
        if obs_order_seed is None:
            order = np.arange(n)
        else:
            order = np.random.default_rng(obs_order_seed).permutation(n)
        self.order = order
        self.m = int(m)
        self.obs_order_seed = obs_order_seed
        where = np.argsort(order)          # where[o] = variable holding observation o
        targets = np.array([where[min(t, n - 1)] for t in (0, 9, 29)], dtype=np.int64)
        logtab = np.log(np.arange(n + 3, dtype=np.float64).clip(1e-300))
        logtab[0] = -np.inf
        super().__init__((data[order].copy(), self.m, targets, logtab), np.full(n, self.m))

    def describe(self):
        return {"name": self.name, "m": self.m, "obs_order_seed": self.obs_order_seed}


# ----------------------------------------------------------- belief net


LAYERS = (2, 5, 3)
LAYER_VALUES = (5, 4, 3)


@njit(cache=True)
def _bn_child_logp(W, parents, x, j, v, linear):
    """log P(child j = v | parent values): softmax of s = sum exp(W), or of
    s = sum W when ``linear``."""
    nv = W.shape[3]
    s = np.zeros(nv)
    for a in range(parents.shape[0]):
        xa = x[parents[a]]
        for w in range(nv):
            s[w] += W[a, j, xa, w] if linear else math.exp(W[a, j, xa, w])
    top = s.max()
    z = 0.0
    for w in range(nv):
        z += math.exp(s[w] - top)
    return s[v] - top - math.log(z)


@njit(cache=True)
def _bn_cond(P, x, A, i, out):
    alpha, beta, gamma, top, mid, bot, lin = P
    if i < top.shape[0]:
        m = alpha.shape[1]
        old = x[i]
        for u in range(m):
            x[i] = u
            lw = alpha[i, u]
            for j in range(mid.shape[0]):
                lw += _bn_child_logp(beta, top, x, j, x[mid[j]], lin)
            out[u] = lw
        x[i] = old
    elif i < top.shape[0] + mid.shape[0]:
        j = i - top.shape[0]
        m = beta.shape[3]
        old = x[i]
        for v in range(m):
            x[i] = v
            lw = _bn_child_logp(beta, top, x, j, v, lin)
            for k in range(bot.shape[0]):
                lw += _bn_child_logp(gamma, mid, x, k, x[bot[k]], lin)
            out[v] = lw
        x[i] = old
    else:
        k = i - top.shape[0] - mid.shape[0]
        m = gamma.shape[3]
        for w in range(m):
            out[w] = _bn_child_logp(gamma, mid, x, k, w, lin)
    _normalize_log(out, m)
    return m


@njit(cache=True)
def _bn_change(P, x, A, i, old, new):
    pass


@njit(cache=True)
def _bn_funcs(P, x, A, out):
    top, mid, bot = P[3], P[4], P[5]
    out[0] = 1.0 if x[mid[0]] == 0 else 0.0
    out[1] = 1.0 if x[bot[0]] == 0 else 0.0
    out[2] = 1.0 if (x[top[0]] == 0 and x[bot[0]] == 0) else 0.0


@njit(cache=True)
def _bn_scratch(P, x):
    return (np.zeros(1, np.int64),)


@njit(cache=True)
def _bn_logjoint(P, x):
    alpha, beta, gamma, top, mid, bot, lin = P
    lj = 0.0
    for i in range(top.shape[0]):
        a = alpha[i]
        mx = a.max()
        lj += a[x[top[i]]] - mx - math.log(np.exp(a - mx).sum())
    for j in range(mid.shape[0]):
        lj += _bn_child_logp(beta, top, x, j, x[mid[j]], lin)
    for k in range(bot.shape[0]):
        lj += _bn_child_logp(gamma, mid, x, k, x[bot[k]], lin)
    return lj


def student_t4(rng, size):
    """t draws with 4 degrees of freedom as normal / sqrt(chi-square(4) / 4)."""
    z = rng.standard_normal(size)
    c = rng.chisquare(4, size)
    return z / np.sqrt(c / 4)


class BeliefNet(Model):
    """Three-layer softmax belief network (2 x 5 values, 5 x 4, 3 x 3).

    The summed input to a child value is s = sum over parents of
    exp(weight), and the child's distribution is softmax(s).  With
    ``summed_input="linear"`` the input is the plain sum of weights, the
    usual multinomial-logit form.
    """

    name = "beliefnet"
    function_names = ("mid1_is_1", "bot1_is_1", "top1_and_bot1_are_1")
    _cond = staticmethod(_bn_cond)
    _change = staticmethod(_bn_change)
    _funcs = staticmethod(_bn_funcs)
    _scratch = staticmethod(_bn_scratch)
    _logjoint = staticmethod(_bn_logjoint)

    def __init__(self, param_seed: int = 1, alpha=None, beta=None, gamma=None,
                 summed_input: str = "exp"):
        if summed_input not in ("exp", "linear"):
            raise ValueError("summed_input must be 'exp' or 'linear'")
        nt, nm, nb = LAYERS
        vt, vm, vb = LAYER_VALUES
        rng = np.random.default_rng(param_seed)
        self.alpha = np.asarray(student_t4(rng, (nt, vt)) if alpha is None else alpha, np.float64)
        self.beta = np.asarray(student_t4(rng, (nt, nm, vt, vm)) if beta is None else beta, np.float64)
        self.gamma = np.asarray(student_t4(rng, (nm, nb, vm, vb)) if gamma is None else gamma, np.float64)
        if (self.alpha.shape != (nt, vt) or self.beta.shape != (nt, nm, vt, vm)
                or self.gamma.shape != (nm, nb, vm, vb)):
            raise ValueError("belief-net parameter shapes do not match the layers")
        self.param_seed = param_seed
        self.summed_input = summed_input
        top = np.arange(nt)
        mid = np.arange(nt, nt + nm)
        bot = np.arange(nt + nm, nt + nm + nb)
        super().__init__((self.alpha, self.beta, self.gamma, top, mid, bot,
                          summed_input == "linear"),
                         [vt] * nt + [vm] * nm + [vb] * nb)

    def describe(self):
        return {"name": self.name, "param_seed": self.param_seed,
                "summed_input": self.summed_input}


# ------------------------------------------------------------ enumeration


@njit(cache=True)
def _enumerate(logjoint, scratch, funcs, P, nvals, nf):
    n = nvals.shape[0]
    x = np.zeros(n, np.int64)
    total = 1
    for i in range(n):
        total *= nvals[i]
    lj = np.empty(total)
    fv = np.empty((total, nf))
    out = np.empty(nf)
    for t in range(total):
        lj[t] = logjoint(P, x)
        funcs(P, x, scratch(P, x), out)
        fv[t] = out
        # odometer increment, last variable fastest
        i = n - 1
        while i >= 0:
            x[i] += 1
            if x[i] < nvals[i]:
                break
            x[i] = 0
            i -= 1
    return lj, fv


def state_space_size(model: Model) -> int:
    return int(np.prod([int(v) for v in model.n_values], dtype=object))


def brute_force_expectations(model: Model):
    """Exact (mean, variance) of each monitored function by full enumeration."""
    if state_space_size(model) > ENUM_LIMIT:
        raise ValueError("enumeration infeasible")
    cls = type(model)
    lj, fv = _enumerate(cls._logjoint, cls._scratch, cls._funcs, model.params,
                        model.n_values, len(model.function_names))
    w = np.exp(lj - lj.max())
    w /= w.sum()
    mean = w @ fv
    var = w @ (fv - mean) ** 2
    return [(float(a), float(b)) for a, b in zip(mean, var)]


MODELS = {"potts": Potts, "mixture": Mixture, "beliefnet": BeliefNet}


def make_model(name: str, **kw) -> Model:
    try:
        cls = MODELS[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}") from None
    return cls(**kw)
