"""Variation sums along partition sequences.

Everything here is a finite-stage quantity: p-th (or phi-) power sums of
increments along one partition, optionally stopped at an intermediate time t
(increments are evaluated at clipped times ``min(t, t_i)``). Limit statements
live in the tests and experiments, which drive these sums along refining
partition sequences and check Cauchy behaviour.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import InvalidParameterError, InvalidPhiError
from .partitions import Partition
from .paths import SampledPath

__all__ = [
    "pth_variation_partial",
    "phi_variation_partial",
    "variation_table",
    "max_increment_share",
    "cantor_function",
    "multidim_variation",
    "occupation_mass",
]


def _clipped_values(path: SampledPath, partition: Partition, t: float | None) -> np.ndarray:
    times = partition.times
    if t is not None:
        if t < 0.0:
            raise InvalidParameterError("t must be nonnegative")
        times = np.minimum(times, t)
    return path.value_at(times)


def phi_variation_partial(
    path: SampledPath,
    partition: Partition,
    phi: Callable[[np.ndarray], np.ndarray],
    t: float | None = None,
) -> float:
    """sum_i phi(|S(min(t, t_{i+1})) - S(min(t, t_i))|) along the partition."""
    vals = _clipped_values(path, partition, t)
    inc = np.abs(np.diff(vals))
    out = phi(inc)
    if np.any(out < 0.0) or not np.all(np.isfinite(out)):
        raise InvalidPhiError("phi must be finite and nonnegative on increment magnitudes")
    return float(np.sum(out))


def pth_variation_partial(
    path: SampledPath,
    partition: Partition,
    p: float,
    t: float | None = None,
) -> float:
    """p-th power increment sum; the phi-sum with phi(x) = x**p."""
    if p <= 0.0:
        raise InvalidParameterError(f"p must be positive, got {p}")
    return phi_variation_partial(path, partition, lambda a: a**p, t)


def variation_table(
    path: SampledPath,
    partition: Partition,
    p: float,
    ts: np.ndarray,
) -> np.ndarray:
    """Partial p-th variation evaluated at many times t in one pass.

    Equivalent to ``[pth_variation_partial(path, partition, p, t) for t in ts]``
    but uses one cumulative sum plus a boundary fragment per query.
    """
    if p <= 0.0:
        raise InvalidParameterError(f"p must be positive, got {p}")
    ts = np.asarray(ts, dtype=float)
    grid = partition.times
    vals = path.value_at(grid)
    c = np.abs(np.diff(vals)) ** p
    csum = np.concatenate([[0.0], np.cumsum(c)])
    idx = np.searchsorted(grid, ts, side="right") - 1
    idx = np.clip(idx, 0, grid.size - 1)
    frag_base = path.value_at(grid[idx])
    frag = np.abs(path.value_at(np.minimum(ts, grid[-1])) - frag_base) ** p
    frag[idx == grid.size - 1] = 0.0
    return csum[idx] + frag


def max_increment_share(path: SampledPath, partition: Partition, p: float) -> float:
    """Largest single increment's share of the total p-th power sum.

    A sanity diagnostic: along an adequate partition sequence this must go to
    zero, otherwise one jump dominates and the 'limit' is an artifact.
    """
    vals = path.value_at(partition.times)
    c = np.abs(np.diff(vals)) ** p
    total = float(np.sum(c))
    if total == 0.0:
        return 0.0
    return float(np.max(c) / total)


# --------------------------------------------------------------------------- #
# reference values
# --------------------------------------------------------------------------- #


def cantor_function(ts) -> np.ndarray:
    """Cantor (devil's staircase) function on [0, 1], by the ternary digit
    expansion: halve digits 0/2 until the first digit 1, which contributes its
    binary weight and stops the expansion."""
    ts = np.asarray(ts, dtype=float)
    scalar = ts.ndim == 0
    x = np.atleast_1d(ts).astype(float).copy()
    out = np.zeros_like(x)
    done = x <= 0.0
    hi = x >= 1.0
    out[hi] = 1.0
    done |= hi
    x = np.clip(x, 0.0, 1.0)
    half = 0.5
    for _ in range(54):
        if np.all(done):
            break
        x *= 3.0
        d = np.minimum(np.floor(x), 2.0)
        x -= d
        first_one = ~done & (d == 1.0)
        out[first_one] += half
        done |= first_one
        out[~done & (d == 2.0)] += half
        half *= 0.5
    return out[0] if scalar else out


# --------------------------------------------------------------------------- #
# vector paths and occupation diagnostics
# --------------------------------------------------------------------------- #


def multidim_variation(
    paths: Sequence[SampledPath],
    weights: Sequence[float],
    partition: Partition,
    p: float,
    t: float | None = None,
) -> float:
    """p-th variation of the scalar combination ``sum_j w_j S_j`` of
    components sharing one time grid."""
    if len(paths) == 0 or len(paths) != len(weights):
        raise InvalidParameterError("need one weight per component path")
    base = paths[0].times
    for other in paths[1:]:
        if other.times.size != base.size or not np.array_equal(other.times, base):
            raise InvalidParameterError("component paths must share their time grid")
    combo = np.zeros_like(paths[0].values)
    for w, comp in zip(weights, paths):
        combo = combo + float(w) * comp.values
    return pth_variation_partial(SampledPath(base, combo), partition, p, t)


def occupation_mass(
    path: SampledPath,
    partition: Partition,
    p: float,
    level: float,
    eps: float,
) -> dict[float, float]:
    """p-th power mass carried by increments starting within a value band.

    For each band half-width in (eps, eps/2, eps/4), sums |increment|**p over
    the partition intervals whose left-endpoint value lies within that
    distance of ``level``. Comparing the three probes how the mass scales
    with the band width.
    """
    if eps <= 0.0:
        raise InvalidParameterError("eps must be positive")
    vals = path.value_at(partition.times)
    left = vals[:-1]
    c = np.abs(np.diff(vals)) ** p
    out: dict[float, float] = {}
    for e in (eps, eps / 2.0, eps / 4.0):
        mask = np.abs(left - level) <= e
        out[e] = float(np.sum(c[mask]))
    return out
