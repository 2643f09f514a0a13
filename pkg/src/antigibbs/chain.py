"""Run a Markov chain of single-variable updates over a model.

RNG contract (one PCG64 Generator per chain, seeded from ``seed``): first
the initial state, one uniform integer per variable in index order; then,
for every scan, the schedule draws (n indices for Random, one permutation
for RandomOrder and every fourth RandomOrderX4 scan, none otherwise);
then, for each update in the scan, exactly one uniform in [0, 1) that
drives the kernel.
"""

from dataclasses import dataclass, field
import time

import numpy as np
from numba import njit

from .kernels import Method, _kernel_draw, parse_method
from .models import Model
from .scans import ScanOrder, fill_schedule, fixed_order, parse_scan


@dataclass
class RunResult:
    thinned: np.ndarray                 # (K, n_functions), values after each scan
    unthinned: np.ndarray | None        # (n*K, n_functions), values after each update
    self_transition_count: int
    max_cond_ge_half_count: int
    wall_time: float
    n: int
    K: int
    function_names: tuple = field(default=())

    @property
    def updates(self) -> int:
        return self.n * self.K

    @property
    def self_freq(self) -> float:
        return self.self_transition_count / self.updates

    @property
    def max_ge_half_freq(self) -> float:
        return self.max_cond_ge_half_count / self.updates


@njit
def _run(cond, change, funcs, P, A, x, method, direct, kind, fixed, K, rng,
         nf, record_unthinned, max_m):
    n = x.shape[0]
    thin = np.empty((K, nf))
    unthin = np.empty((n * K if record_unthinned else 0, nf))
    pi = np.empty(max_m)
    fv = np.empty(nf)
    sched = fixed.copy()
    n_self = 0
    n_half = 0
    for s in range(K):
        fill_schedule(kind, n, s, rng, fixed, sched)
        for t in range(n):
            i = sched[t]
            m = cond(P, x, A, i, pi)
            p = pi[:m]
            for v in range(m):
                if p[v] >= 0.5:
                    n_half += 1
                    break
            u = rng.random()
            k = x[i]
            new = _kernel_draw(method, p, k, u, direct)
            if new == k:
                n_self += 1
            else:
                x[i] = new
                change(P, x, A, i, k, new)
            if record_unthinned:
                funcs(P, x, A, fv)
                unthin[s * n + t] = fv
        funcs(P, x, A, fv)
        thin[s] = fv
    return thin, unthin, n_self, n_half


def run_chain(model: Model, method, scan, K: int, seed: int, *, fixed=None,
              shuffle_seed=None, record_unthinned: bool = True,
              direct: bool = True, x0=None) -> RunResult:
    """Run K scans of ``method`` under ``scan`` order, starting from a uniform random state.

    ``fixed`` overrides the scan's fixed order; otherwise it is built from
    the model's lattice shape and ``shuffle_seed``.  ``direct`` selects the
    direct samplers for the shifted-tower and slice families.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    meth = parse_method(method)
    order = parse_scan(scan)
    if order == ScanOrder.SEQUENTIAL and not model.allows_sequential:
        raise ValueError(f"{model.name} model has no sequential order")
    if fixed is None:
        fixed = fixed_order(order, model.n, model.lattice_shape, shuffle_seed)
    fixed = np.ascontiguousarray(fixed, dtype=np.int64)
    rng = np.random.default_rng(seed)
    if x0 is None:
        x = np.array([rng.integers(0, v) for v in model.n_values], dtype=np.int64)
    else:
        x = np.array(x0, dtype=np.int64)
    A = model.aux(x)
    cls = type(model)
    t0 = time.perf_counter()
    thin, unthin, n_self, n_half = _run(
        cls._cond, cls._change, cls._funcs, model.params, A, x, int(meth), bool(direct),
        int(order), fixed, int(K), rng, len(model.function_names),
        bool(record_unthinned), model.max_m)
    wall = time.perf_counter() - t0
    return RunResult(thin, unthin if record_unthinned else None, int(n_self), int(n_half),
                     wall, model.n, int(K), tuple(model.function_names))


__all__ = ["RunResult", "run_chain", "Method", "ScanOrder"]
