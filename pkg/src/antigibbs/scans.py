"""Orders in which a scan of n single-variable updates visits the variables."""

from enum import IntEnum

import numpy as np
from numba import njit


class ScanOrder(IntEnum):
    RANDOM = 0
    SEQUENTIAL = 1
    SHUFFLED_SEQUENTIAL = 2
    CHECKERBOARD = 3
    RANDOM_ORDER = 4
    RANDOM_ORDER_X4 = 5


SCAN_NAMES = {
    ScanOrder.RANDOM: "Random",
    ScanOrder.SEQUENTIAL: "Sequential",
    ScanOrder.SHUFFLED_SEQUENTIAL: "ShuffledSequential",
    ScanOrder.CHECKERBOARD: "Checkerboard",
    ScanOrder.RANDOM_ORDER: "RandomOrder",
    ScanOrder.RANDOM_ORDER_X4: "RandomOrderX4",
}
_BY_NAME = {v.lower(): k for k, v in SCAN_NAMES.items()}


def parse_scan(name) -> ScanOrder:
    if isinstance(name, (ScanOrder, int, np.integer)):
        try:
            return ScanOrder(int(name))
        except ValueError:
            raise ValueError(f"unknown scan order {name!r}") from None
    key = str(name).replace("-", "").replace("_", "").lower()
    try:
        return _BY_NAME[key]
    except KeyError:
        raise ValueError(f"unknown scan order {name!r}") from None


def scan_name(order) -> str:
    return SCAN_NAMES[parse_scan(order)]


def checkerboard_order(R: int, C: int) -> np.ndarray:
    """Row-major site indices with row+col even ("black") first, then odd."""
    idx = np.arange(R * C)
    par = (idx // C + idx % C) % 2
    return np.concatenate([idx[par == 0], idx[par == 1]]).astype(np.int64)


def fixed_order(order, n: int, lattice_shape=None, shuffle_seed=None) -> np.ndarray:
    """The order reused by every scan, for scan kinds that have one.

    ShuffledSequential draws its single shuffle from ``shuffle_seed`` so all
    methods in an experiment share it.  Kinds without a fixed order get the
    identity (it is ignored or overwritten each scan).
    """
    order = parse_scan(order)
    if order == ScanOrder.CHECKERBOARD:
        if lattice_shape is None:
            raise ValueError("checkerboard scan needs a lattice model")
        R, C = lattice_shape
        if R * C != n:
            raise ValueError("lattice shape does not match number of variables")
        return checkerboard_order(R, C)
    if order == ScanOrder.SHUFFLED_SEQUENTIAL:
        return np.random.default_rng(shuffle_seed).permutation(n).astype(np.int64)
    return np.arange(n, dtype=np.int64)


@njit(cache=True)
def fill_schedule(kind, n, scan_index, rng, fixed, out):
    """Write the variable indices for scan ``scan_index`` into ``out``.

    Random draws n indices; RandomOrder draws a fresh permutation; the x4
    variant draws one on every fourth scan and keeps ``out`` otherwise.
    """
    if kind == 0:
        for t in range(n):
            out[t] = rng.integers(0, n)
    elif kind == 4 or (kind == 5 and scan_index % 4 == 0):
        p = rng.permutation(n)
        for t in range(n):
            out[t] = p[t]
    elif kind != 5:
        for t in range(n):
            out[t] = fixed[t]


def schedule_for_scan(order, n: int, scan_index: int, rng, fixed=None, previous=None):
    """Variable indices for one scan (see ``fill_schedule``).

    ``previous`` is the schedule of the preceding scan, needed by
    RandomOrderX4 between redraws.
    """
    order = parse_scan(order)
    if order in (ScanOrder.CHECKERBOARD, ScanOrder.SHUFFLED_SEQUENTIAL) and fixed is None:
        raise ValueError("this scan order needs its fixed order (see fixed_order)")
    fx = np.arange(n, dtype=np.int64) if fixed is None else np.asarray(fixed, dtype=np.int64)
    out = np.arange(n, dtype=np.int64) if previous is None else np.array(previous, dtype=np.int64)
    if order == ScanOrder.RANDOM_ORDER_X4 and previous is None and scan_index % 4 != 0:
        raise ValueError("RandomOrderX4 needs the previous schedule between redraws")
    fill_schedule(int(order), n, int(scan_index), rng, fx, out)
    return out
