"""Partition sequences: b-adic grids and value-crossing (Lebesgue) partitions.

A partition is a strictly increasing time grid starting at 0; refinement is
always understood along a whole sequence of partitions, with the oscillation
``osc`` (not the mesh) being the quantity that has to vanish for variation
limits to make sense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .paths import LN2_OVER_LN3, SampledPath, cantor_gap_lefts

__all__ = [
    "Partition",
    "badic",
    "value_grid_partition",
    "cantor_value_grid",
    "osc",
]


@dataclass(frozen=True)
class Partition:
    """Strictly increasing time grid on [0, horizon], first point 0."""

    times: np.ndarray

    def __post_init__(self) -> None:
        times = np.ascontiguousarray(self.times, dtype=float)
        if times.ndim != 1 or times.size < 2:
            raise InvalidParameterError("a partition needs at least two points")
        if times[0] != 0.0:
            raise InvalidParameterError("partitions start at time 0")
        if np.any(np.diff(times) <= 0.0):
            raise InvalidParameterError("partition times must be strictly increasing")
        object.__setattr__(self, "times", times)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def n_intervals(self) -> int:
        return self.times.size - 1

    @property
    def mesh(self) -> float:
        return float(np.max(np.diff(self.times)))


def badic(horizon: float, n: int, base: int = 2) -> Partition:
    """Uniform b-adic partition of [0, horizon] with base**n intervals."""
    if base < 2 or int(base) != base:
        raise InvalidParameterError(f"base must be an integer >= 2, got {base}")
    if n < 0:
        raise InvalidParameterError("n must be >= 0")
    if horizon <= 0.0:
        raise InvalidParameterError("horizon must be positive")
    k = int(base) ** n
    return Partition(np.linspace(0.0, horizon, k + 1))


# --------------------------------------------------------------------------- #
# value-crossing partitions
# --------------------------------------------------------------------------- #


def value_grid_partition(
    path: SampledPath,
    delta: float,
    mode: str = "increment",
) -> Partition:
    """Times at which a piecewise-linear path crosses a value grid of
    spacing ``delta``.

    mode="increment": successive hitting times of ``last recorded value
    +- delta`` (the recorded values form a +-delta random walk started at
    S(0)). mode="grid": crossings of the absolute levels ``k * delta``.

    0 and the horizon are always included. Exact hits at segment endpoints
    count once; a crossing is only recorded strictly after the previous one.
    """
    if delta <= 0.0:
        raise InvalidParameterError("delta must be positive")
    if mode not in ("increment", "grid"):
        raise InvalidParameterError(f"unknown mode {mode!r}")
    t = path.times
    v = path.values
    guard = 1e-9
    chunks = [np.array([0.0])]
    if mode == "increment":
        ref = v[0]
        for j in range(t.size - 1):
            v0, v1 = v[j], v[j + 1]
            if v1 == v0:
                continue
            sgn = 1.0 if v1 > v0 else -1.0
            count = int(math.floor((v1 - ref) * sgn / delta + guard))
            if count <= 0:
                continue
            ks = np.arange(1, count + 1, dtype=float)
            cross_vals = ref + sgn * delta * ks
            slope = (v1 - v0) / (t[j + 1] - t[j])
            times = t[j] + (cross_vals - v0) / slope
            np.clip(times, t[j], t[j + 1], out=times)
            chunks.append(times)
            ref = float(cross_vals[-1])
    else:
        for j in range(t.size - 1):
            v0, v1 = v[j], v[j + 1]
            if v1 == v0:
                continue
            if v1 > v0:
                k_lo = math.floor(v0 / delta + guard) + 1
                k_hi = math.floor(v1 / delta + guard)
            else:
                k_hi = math.ceil(v0 / delta - guard) - 1
                k_lo = math.ceil(v1 / delta - guard)
            if k_hi < k_lo:
                continue
            ks = np.arange(k_lo, k_hi + 1, dtype=float)
            if v1 < v0:
                ks = ks[::-1]
            slope = (v1 - v0) / (t[j + 1] - t[j])
            times = t[j] + (ks * delta - v0) / slope
            np.clip(times, t[j], t[j + 1], out=times)
            chunks.append(times)
    body = np.concatenate(chunks)
    # drop accidental duplicates from exact endpoint hits, keep strict order
    keep = np.concatenate([[True], np.diff(body) > 0.0])
    body = body[keep]
    if body[-1] < path.horizon:
        body = np.append(body, path.horizon)
    return Partition(body)


# --------------------------------------------------------------------------- #
# exact crossing grid for the Cantor-distance path
# --------------------------------------------------------------------------- #


def cantor_value_grid(
    p: float,
    n: int,
    rounding: str = "floor",
) -> tuple[SampledPath, Partition, int]:
    """Stage-n value-crossing construction for the Cantor-distance path with
    exponent ``p``, in closed form.

    Each interval removed at level ``i <= n`` carries a uniform value grid of
    ``k_n`` levels between 0 and its peak ``2**(-i/p)``; the returned path
    stores the crossing times together with the exactly quantized values
    ``k * 2**(-i/p) / k_n``, so increment magnitudes are exact and the p-th
    power sum of level i is ``k_n**(1-p)`` to rounding error.

    ``k_n`` is ``n**(1/(p-1))`` rounded down (rounding="floor") or to the
    nearest integer (rounding="nearest").

    Returns (path, partition, k_n); the partition times are the path knots.
    """
    if p <= 1.0:
        raise InvalidParameterError(f"p must exceed 1, got {p}")
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    raw = n ** (1.0 / (p - 1.0))
    if rounding == "floor":
        k_n = int(math.floor(raw + 1e-9))
    elif rounding == "nearest":
        k_n = int(round(raw))
    else:
        raise InvalidParameterError(f"unknown rounding {rounding!r}")
    k_n = max(k_n, 1)

    q = LN2_OVER_LN3 / p
    ks = np.arange(k_n + 1, dtype=float)
    s_frac = (ks / k_n) ** (1.0 / q) / 2.0  # crossing offsets on the rising half
    frac_all = np.concatenate([s_frac, 1.0 - s_frac[:-1][::-1]])
    val_pattern = np.concatenate(
        [np.arange(k_n + 1, dtype=float), np.arange(k_n - 1, -1, -1, dtype=float)]
    )

    all_t = [np.array([0.0]), np.array([1.0])]
    all_v = [np.array([0.0]), np.array([0.0])]
    for i in range(1, n + 1):
        lefts = cantor_gap_lefts(i)
        glen = 3.0 ** (-i)
        delta = 2.0 ** (-i / p) / k_n
        times_i = (lefts[:, None] + glen * frac_all[None, :]).ravel()
        vals_i = np.tile(delta * val_pattern, lefts.size)
        all_t.append(times_i)
        all_v.append(vals_i)
    t = np.concatenate(all_t)
    v = np.concatenate(all_v)
    order = np.argsort(t, kind="stable")
    t = t[order]
    v = v[order]
    path = SampledPath(t, v)
    return path, Partition(t.copy()), k_n


# --------------------------------------------------------------------------- #
# oscillation
# --------------------------------------------------------------------------- #


def osc(path: SampledPath, partition: Partition) -> float:
    """Largest oscillation (max minus min of the path) over any single
    partition interval; the quantity that must vanish along a partition
    sequence for variation limits to be meaningful."""
    if partition.horizon > path.horizon + 1e-12:
        raise InvalidParameterError("partition extends past the path horizon")
    grid = np.union1d(path.times, partition.times)
    vals = path.value_at(grid)
    starts = np.searchsorted(grid, partition.times)
    mx = np.maximum.reduceat(vals, starts[:-1])
    mn = np.minimum.reduceat(vals, starts[:-1])
    # reduceat slices exclude each interval's right endpoint; fold it in
    right = vals[starts[1:]]
    mx = np.maximum(mx, right)
    mn = np.minimum(mn, right)
    return float(np.max(mx - mn))
