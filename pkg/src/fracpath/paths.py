"""Path constructions: analytic rough-path families and sampled paths.

Three analytic families are provided:

* ``cantor_distance_path`` -- a power of the distance to the middle-third
  Cantor set; vanishes exactly on the Cantor set and has one smooth arch per
  removed interval.
* ``cantor_bump_path`` -- triangular bumps packed into the removed intervals,
  with a level-dependent bump count that grows geometrically.
* ``takagi_path`` -- Takagi-van der Waerden type series over a b-adic wave.

Gaussian paths (fractional Brownian motion) are sampled by circulant
embedding (Davies-Harte) with a dense Cholesky fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from .errors import InvalidParameterError, SamplingInfeasibleError

__all__ = [
    "AnalyticPath",
    "SampledPath",
    "GaussianPathSpec",
    "cantor_distance_path",
    "cantor_bump_path",
    "takagi_path",
    "fbm_path",
    "sample",
    "cantor_gap_lefts",
    "bump_count",
    "cantor_bump_knots",
]

LN2_OVER_LN3 = math.log(2.0) / math.log(3.0)


# --------------------------------------------------------------------------- #
# path containers
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class SampledPath:
    """A path known at finitely many times, linearly interpolated in between.

    ``times`` must be strictly increasing with ``times[0] == 0``; the horizon
    is ``times[-1]``.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = np.ascontiguousarray(self.times, dtype=float)
        values = np.ascontiguousarray(self.values, dtype=float)
        if times.ndim != 1 or values.ndim != 1 or times.size != values.size:
            raise InvalidParameterError("times and values must be 1-d arrays of equal length")
        if times.size < 2:
            raise InvalidParameterError("a sampled path needs at least two points")
        if times[0] != 0.0:
            raise InvalidParameterError("sampled paths start at time 0")
        if np.any(np.diff(times) <= 0.0):
            raise InvalidParameterError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def value_at(self, ts) -> np.ndarray:
        """Evaluate the interpolant; exact (no arithmetic) at stored knots."""
        ts = np.asarray(ts, dtype=float)
        out = np.interp(ts, self.times, self.values)
        idx = np.searchsorted(self.times, ts)
        idx = np.minimum(idx, self.times.size - 1)
        hit = self.times[idx] == ts
        if np.any(hit):
            out = np.where(hit, self.values[idx], out)
        return out


@dataclass(frozen=True)
class AnalyticPath:
    """A deterministic path given by a closed-form, vectorized evaluator."""

    kind: str
    horizon: float
    params: dict = field(default_factory=dict)
    fn: Callable[[np.ndarray], np.ndarray] = None  # type: ignore[assignment]

    def __call__(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return self.fn(ts)

    @classmethod
    def custom(cls, fn: Callable[[np.ndarray], np.ndarray], horizon: float = 1.0) -> "AnalyticPath":
        return cls(kind="custom", horizon=horizon, params={}, fn=fn)


@dataclass(frozen=True)
class GaussianPathSpec:
    """Parameters of a fractional Brownian motion sample.

    ``n`` is the number of increments; a power of two enables the circulant
    embedding, otherwise a dense factorization is used (``n <= 4096`` only).
    """

    hurst: float
    n: int
    horizon: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.hurst < 1.0:
            raise InvalidParameterError(f"hurst must lie in (0, 1), got {self.hurst}")
        if self.n < 2:
            raise InvalidParameterError("need at least 2 increments")
        if self.horizon <= 0.0:
            raise InvalidParameterError("horizon must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidParameterError("seed must be a 64-bit unsigned integer")


# --------------------------------------------------------------------------- #
# Cantor-set machinery
# --------------------------------------------------------------------------- #


def cantor_gap_lefts(level: int) -> np.ndarray:
    """Left endpoints (sorted) of the 2**(level-1) intervals removed at
    ``level`` in the middle-third Cantor construction on [0, 1]."""
    if level < 1:
        raise InvalidParameterError("level must be >= 1")
    d = level - 1
    idx = np.arange(1 << d, dtype=np.uint64)
    lefts = np.zeros(1 << d)
    for j in range(d):
        bit = ((idx >> np.uint64(d - 1 - j)) & np.uint64(1)).astype(float)
        lefts += bit * (2.0 * 3.0 ** (-(j + 1)))
    return lefts + 3.0 ** (-level)


def _cantor_gap_info(ts: np.ndarray, depth: int):
    """For each t: (level i of the removed interval containing it, or 0 if none
    up to ``depth``; left endpoint of that interval; its length)."""
    ts = np.asarray(ts, dtype=float)
    lo = np.zeros_like(ts)
    level = np.zeros(ts.shape, dtype=np.int64)
    gap_lo = np.zeros_like(ts)
    active = (ts >= 0.0) & (ts <= 1.0)
    size = 1.0
    for i in range(1, depth + 1):
        third = size / 3.0
        gl = lo + third
        gr = lo + 2.0 * third
        in_left = ts < gl
        in_right = ts > gr
        in_gap = active & ~in_left & ~in_right
        level[in_gap] = i
        gap_lo[in_gap] = gl[in_gap]
        active &= ~in_gap
        move = active & in_right
        lo = np.where(move, gr, lo)
        size = third
    return level, gap_lo


def _cantor_distance(ts: np.ndarray, depth: int) -> np.ndarray:
    """Distance from each t in [0, 1] to the depth-``depth`` Cantor set
    approximation (points inside a retained depth-d interval get 0)."""
    level, gap_lo = _cantor_gap_info(ts, depth)
    in_gap = level > 0
    out = np.zeros_like(np.asarray(ts, dtype=float))
    if np.any(in_gap):
        glen = 3.0 ** (-level[in_gap].astype(float))
        t = np.asarray(ts, dtype=float)[in_gap]
        a = gap_lo[in_gap]
        out[in_gap] = np.minimum(t - a, a + glen - t)
    return out


def cantor_distance_path(p: float, depth: int = 30) -> AnalyticPath:
    """Path ``S(t) = (2 * dist(t, C))**(log_3(2) / p)`` on [0, 1], where C is
    the depth-``depth`` Cantor set approximation.

    On the interval removed at level i the path rises from 0 to ``2**(-i/p)``
    at the midpoint and falls back to 0.

    Parameters
    ----------
    p : float
        Scaling exponent, must exceed 1.
    depth : int
        Construction depth; points closer to the Cantor set than ``3**-depth``
        evaluate to 0.
    """
    if p <= 1.0:
        raise InvalidParameterError(f"p must exceed 1, got {p}")
    if depth < 1:
        raise InvalidParameterError("depth must be >= 1")
    q = LN2_OVER_LN3 / p

    def fn(ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        d = _cantor_distance(ts, depth)
        return (2.0 * d) ** q

    return AnalyticPath(kind="cantor-distance", horizon=1.0, params={"p": p, "depth": depth}, fn=fn)


def bump_count(p: float, level: int) -> int:
    """Number of equal sub-intervals (one triangular bump each) that the
    bump path places in every interval removed at ``level``."""
    return int(math.floor(2.0 ** ((level - 1) * (p - 1.0)) * (2.0 ** (p - 1.0) - 1.0)))


def cantor_bump_path(p: float, depth: int = 14) -> AnalyticPath:
    """Piecewise-linear path of triangular bumps supported on the removed
    intervals of the Cantor construction.

    The interval removed at level i is split into ``bump_count(p, i)``
    contiguous equal sub-intervals, each carrying one triangular bump of
    height ``2**-i``. Levels beyond ``depth`` are dropped.

    Requires ``2 < p < 3`` (this keeps the bump counts nonzero and the total
    p-th power mass of each level summable to a finite nonzero limit).
    """
    if not 2.0 < p < 3.0:
        raise InvalidParameterError(f"p must lie in (2, 3), got {p}")
    if depth < 1:
        raise InvalidParameterError("depth must be >= 1")
    counts = np.array([bump_count(p, i) for i in range(depth + 1)], dtype=float)

    def fn(ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        level, gap_lo = _cantor_gap_info(ts, depth)
        out = np.zeros_like(ts)
        in_gap = level > 0
        if np.any(in_gap):
            i = level[in_gap]
            glen = 3.0 ** (-i.astype(float))
            r = counts[i]
            pos = (ts[in_gap] - gap_lo[in_gap]) / glen * r
            k = np.clip(np.floor(pos), 0.0, r - 1.0)
            frac = pos - k
            out[in_gap] = 2.0 ** (-i.astype(float)) * (1.0 - np.abs(2.0 * frac - 1.0))
        return out

    return AnalyticPath(kind="cantor-bump", horizon=1.0, params={"p": p, "depth": depth}, fn=fn)


def cantor_bump_knots(p: float, depth: int) -> SampledPath:
    """Exact piecewise-linear representation of ``cantor_bump_path`` truncated
    at ``depth``: every bump foot and peak is a knot, so linear interpolation
    reproduces the path with no error.

    Knot count grows like ``2**(p * depth)``; keep ``depth`` moderate.
    """
    if not 2.0 < p < 3.0:
        raise InvalidParameterError(f"p must lie in (2, 3), got {p}")
    all_t = [np.array([0.0, 1.0])]
    all_v = [np.array([0.0, 0.0])]
    for i in range(1, depth + 1):
        lefts = cantor_gap_lefts(i)
        r = bump_count(p, i)
        glen = 3.0 ** (-i)
        offs = np.arange(2 * r + 1) * (glen / (2.0 * r))
        t = (lefts[:, None] + offs[None, :]).ravel()
        pattern = np.zeros(2 * r + 1)
        pattern[1::2] = 2.0 ** (-i)
        v = np.tile(pattern, lefts.size)
        all_t.append(t)
        all_v.append(v)
    t = np.concatenate(all_t)
    v = np.concatenate(all_v)
    order = np.argsort(t, kind="stable")
    t = t[order]
    v = v[order]
    keep = np.concatenate([[True], np.diff(t) > 0.0])
    return SampledPath(t[keep], v[keep])


# --------------------------------------------------------------------------- #
# Takagi-type series
# --------------------------------------------------------------------------- #


def takagi_path(
    b: int = 2,
    alpha: float = 0.5,
    wave: Literal["triangle", "sinusoid"] = "triangle",
    depth: int = 24,
    nu: float = 1.0,
    rho: float = 0.0,
) -> AnalyticPath:
    """Series path ``S(t) = sum_k alpha**k * w(b**k t)`` truncated at ``depth``
    terms, with ``w`` either the distance to the nearest integer (triangle)
    or ``nu*sin(2 pi t) + rho*cos(2 pi t)``.

    Requires integer ``b >= 2`` and ``|alpha| == 1/b`` (within 1e-12); that
    scaling balances the series so increments at scale ``b**-n`` stay of
    order ``b**-n`` times a slowly growing factor.
    """
    if int(b) != b or b < 2:
        raise InvalidParameterError(f"b must be an integer >= 2, got {b}")
    b = int(b)
    if abs(abs(alpha) * b - 1.0) > 1e-12:
        raise InvalidParameterError(f"|alpha| must equal 1/b = {1.0 / b!r}, got {alpha!r}")
    if depth < 1:
        raise InvalidParameterError("depth must be >= 1")
    if wave not in ("triangle", "sinusoid"):
        raise InvalidParameterError(f"unknown wave {wave!r}")

    def fn(ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        out = np.zeros_like(ts)
        coeff = 1.0
        for k in range(depth):
            x = (b**k) * ts
            if wave == "triangle":
                w = np.abs(x - np.rint(x))
            else:
                w = nu * np.sin(2.0 * np.pi * x) + rho * np.cos(2.0 * np.pi * x)
            out += coeff * w
            coeff *= alpha
        return out

    params = {"b": b, "alpha": alpha, "wave": wave, "depth": depth, "nu": nu, "rho": rho}
    return AnalyticPath(kind="takagi", horizon=1.0, params=params, fn=fn)


# --------------------------------------------------------------------------- #
# fractional Brownian motion
# --------------------------------------------------------------------------- #


def _fgn_autocov(n: int, hurst: float) -> np.ndarray:
    """Autocovariance gamma(0..n) of unit-spacing fractional Gaussian noise."""
    k = np.arange(n + 1, dtype=float)
    h2 = 2.0 * hurst
    return 0.5 * (np.abs(k + 1.0) ** h2 - 2.0 * np.abs(k) ** h2 + np.abs(k - 1.0) ** h2)


def _fgn_circulant(n: int, hurst: float, rng: np.random.Generator) -> np.ndarray:
    """Unit-spacing fGn of length n via Davies-Harte circulant embedding.

    Returns None-like failure by raising; caller decides on fallback."""
    g = _fgn_autocov(n, hurst)
    row = np.concatenate([g, g[-2:0:-1]])  # length 2n
    lam = np.fft.fft(row).real
    if lam.min() < -1e-8 * lam.max():
        raise SamplingInfeasibleError("circulant embedding is not nonnegative definite")
    lam = np.clip(lam, 0.0, None)
    z = np.empty(2 * n, dtype=complex)
    z[0] = rng.standard_normal()
    z[n] = rng.standard_normal()
    a = rng.standard_normal(n - 1)
    b = rng.standard_normal(n - 1)
    z[1:n] = (a + 1j * b) / math.sqrt(2.0)
    z[n + 1 :] = np.conj(z[n - 1 : 0 : -1])
    x = np.fft.ifft(np.sqrt(lam) * z) * math.sqrt(2.0 * n)
    return x[:n].real


def _fgn_dense(n: int, hurst: float, rng: np.random.Generator) -> np.ndarray:
    """Unit-spacing fGn of length n via dense Cholesky factorization."""
    g = _fgn_autocov(n - 1, hurst)
    idx = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    cov = g[idx]
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        cov = cov + 1e-12 * np.eye(n)
        chol = np.linalg.cholesky(cov)
    return chol @ rng.standard_normal(n)


def fbm_path(spec: GaussianPathSpec) -> SampledPath:
    """Sample fractional Brownian motion on the uniform grid with ``spec.n``
    increments over [0, horizon]; deterministic per seed.

    Power-of-two ``n`` uses the circulant embedding; otherwise (or if the
    embedding fails) a dense factorization is used for ``n <= 4096``.
    """
    n, hurst = spec.n, spec.hurst
    rng = np.random.default_rng(spec.seed)
    power_of_two = n & (n - 1) == 0
    if power_of_two:
        try:
            fgn = _fgn_circulant(n, hurst, rng)
        except SamplingInfeasibleError:
            if n > 4096:
                raise
            fgn = _fgn_dense(n, hurst, np.random.default_rng(spec.seed))
    elif n <= 4096:
        fgn = _fgn_dense(n, hurst, rng)
    else:
        raise SamplingInfeasibleError(
            f"n={n} is not a power of two and exceeds the dense-factorization cap 4096"
        )
    fgn = fgn * (spec.horizon / n) ** hurst
    values = np.concatenate([[0.0], np.cumsum(fgn)])
    times = np.linspace(0.0, spec.horizon, n + 1)
    return SampledPath(times, values)


# --------------------------------------------------------------------------- #
# sampling
# --------------------------------------------------------------------------- #


def sample(path: AnalyticPath, grid: np.ndarray) -> SampledPath:
    """Evaluate an analytic path on ``grid`` and wrap as a SampledPath.

    ``grid`` must be strictly increasing, start at 0 and stay within the
    path's domain [0, horizon].
    """
    grid = np.ascontiguousarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise InvalidParameterError("grid must be a 1-d array with at least two points")
    if grid[0] != 0.0:
        raise InvalidParameterError("grid must start at 0")
    if grid[-1] > path.horizon + 1e-15:
        raise InvalidParameterError(
            f"grid exceeds the path horizon {path.horizon!r}"
        )
    if np.any(np.diff(grid) <= 0.0):
        raise InvalidParameterError("grid must be strictly increasing")
    return SampledPath(grid, path(grid))
