"""Reproducible end-to-end experiments shared by the CLI and the tests.

Each driver assembles paths, partitions and check routines from the other
modules and reports plain dataclasses of numbers; nothing here draws or
caches state, so identical inputs give identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .fracops import SmoothFn
from .follmer import (
    ItoReport,
    bump_atom_weights,
    compensated_sum,
    ito_check,
    kernel_profile,
    quotient_measure,
)
from .partitions import Partition, badic, cantor_value_grid
from .paths import GaussianPathSpec, SampledPath, bump_count, fbm_path
from .registry import abs_power
from .variation import cantor_function, pth_variation_partial, variation_table

__all__ = [
    "CantorStage",
    "cantor_stage",
    "cantor_sweep",
    "cantor_compensated_formula",
    "cantor_function_gap",
    "BumpReport",
    "bump_decomposition",
    "bump_limit_value",
    "FbmVariationReport",
    "fbm_variation_experiment",
    "gaussian_abs_moment",
    "FbmItoReport",
    "fbm_ito_experiment",
]


# --------------------------------------------------------------------------- #
# Cantor-distance path along its exact crossing grids
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class CantorStage:
    """All stage-n quantities for the Cantor-distance path, exponent p."""

    n: int
    k_n: int
    total_variation: float
    lower_bound: float
    upper_bound: float
    compensated: float
    compensated_formula: float
    kernel_sum: float
    identity_residual: float
    n_increments: int


def cantor_compensated_formula(p: float, n: int, k_n: int) -> float:
    """Closed form of the order-2 compensated sum for f(x) = |x|^p along the
    stage-n crossing grid: every removed interval contributes a first-order
    telescope plus an arithmetic second-order ladder, and levels add up to

        -n p / (2 k_n)
        + (n p (p-1) / 4) (2 sum_{k<=k_n} k^(p-2) - k_n^(p-2)) / k_n^p.
    """
    ks = np.arange(1, k_n + 1, dtype=float)
    ladder = 2.0 * float(np.sum(ks ** (p - 2.0))) - float(k_n) ** (p - 2.0)
    first = -n * p / (2.0 * k_n)
    second = n * p * (p - 1.0) / 4.0 * ladder / float(k_n) ** p
    return first + second


def cantor_stage(p: float, n: int, rounding: str = "floor") -> CantorStage:
    path, part, k_n = cantor_value_grid(p, n, rounding)
    fn = abs_power(p)
    report = ito_check(fn, path, part, p)
    total = pth_variation_partial(path, part, p)
    lower = 1.0
    upper = (1.0 - n ** (1.0 / (1.0 - p))) ** (1.0 - p) if k_n > 1 else math.inf
    return CantorStage(
        n=n,
        k_n=k_n,
        total_variation=total,
        lower_bound=lower,
        upper_bound=upper,
        compensated=report.compensated,
        compensated_formula=cantor_compensated_formula(p, n, k_n),
        kernel_sum=report.kernel_sum,
        identity_residual=report.identity_residual,
        n_increments=report.n_increments,
    )


def cantor_sweep(p: float, ns, rounding: str = "floor") -> list[CantorStage]:
    return [cantor_stage(p, int(n), rounding) for n in ns]


def cantor_function_gap(p: float, n: int, ts, rounding: str = "floor") -> float:
    """Largest gap between the stage-n partial p-th variation profile of the
    Cantor-distance path and the Cantor function, over the query times."""
    path, part, _k_n = cantor_value_grid(p, n, rounding)
    ts = np.asarray(ts, dtype=float)
    table = variation_table(path, part, p, ts)
    return float(np.max(np.abs(table - cantor_function(ts))))


# --------------------------------------------------------------------------- #
# bump path via its per-bump decomposition
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class BumpReport:
    """Stage-n numbers for the bump path with f(x) = |x|^p along value-step
    partitions of spacing 2^-n, aggregated over the self-similar bump
    classes (level i has 2^(i-1) * bump_count(p, i) identical bumps of
    height 2^-i, each crossing 2^(n-i) value steps up and down)."""

    p: float
    n: int
    delta: float
    compensated: float
    kernel_sum: float
    n_increments: int
    atom_ks: np.ndarray = field(repr=False)
    atom_weights: np.ndarray = field(repr=False)
    atom_weights_limit: np.ndarray = field(repr=False)
    kernel_from_atoms: float = 0.0
    kernel_from_limit: float = 0.0

    @property
    def mass(self) -> float:
        return 2.0 * float(np.sum(self.atom_weights))


def bump_decomposition(p: float, n: int) -> BumpReport:
    """Exact stage-n sums for the bump path without materializing the
    partition (the full grid at depth 14 has billions of points; the
    decomposition needs about 2^n arithmetic terms)."""
    if not 2.0 < p < 3.0:
        raise InvalidParameterError(f"p must lie in (2, 3), got {p}")
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    delta = 2.0**-n
    counts = np.array([0] + [bump_count(p, i) for i in range(1, n + 1)], dtype=float)
    total_l = 0.0
    n_inc = 0
    k_top = 2 ** (n - 1)
    # finite-stage atom weights on the value ladder, both directions sharing w
    w_fin = np.zeros(k_top)
    for i in range(1, n + 1):
        big_k = 2 ** (n - i)
        mult = 2.0 ** (i - 1) * counts[i]
        if mult == 0.0:
            continue
        ks = np.arange(1, big_k + 1, dtype=float)
        ladder = 2.0 * float(np.sum(ks ** (p - 2.0))) - float(big_k) ** (p - 2.0)
        first = -delta * p * (big_k * delta) ** (p - 1.0)
        second = p * (p - 1.0) / 2.0 * delta**p * ladder
        total_l += mult * (first + second)
        n_inc += int(mult) * 2 * big_k
        w_fin[:big_k] += mult * delta**p
    limit_table = bump_atom_weights(p, k_top - 1)
    fn = abs_power(p)
    up = np.arctan2(np.arange(1, k_top + 1, dtype=float), np.arange(k_top, dtype=float))
    down = np.arctan2(np.arange(k_top, dtype=float), np.arange(1, k_top + 1, dtype=float))
    g_up = kernel_profile(fn, p, up)
    g_down = kernel_profile(fn, p, down)
    kernel_from_atoms = float(np.sum((g_up + g_down) * w_fin))
    kernel_from_limit = float(np.sum((g_up + g_down) * limit_table.weights))
    return BumpReport(
        p=p,
        n=n,
        delta=delta,
        compensated=total_l,
        kernel_sum=-total_l,
        n_increments=n_inc,
        atom_ks=np.arange(k_top),
        atom_weights=w_fin,
        atom_weights_limit=limit_table.weights.copy(),
        kernel_from_atoms=kernel_from_atoms,
        kernel_from_limit=kernel_from_limit,
    )


def bump_limit_value(p: float) -> float:
    """Closed reference level p 2^-p (2^(p-1) - 1) (2(p-1)/3 - 1) for the
    limiting compensated sum of the bump path with f(x) = |x|^p; negative
    throughout 2 < p < (3 + ...), which is the point of the construction."""
    return p * 2.0**-p * (2.0 ** (p - 1.0) - 1.0) * (2.0 * (p - 1.0) / 3.0 - 1.0)


# --------------------------------------------------------------------------- #
# fractional Brownian motion experiments
# --------------------------------------------------------------------------- #


def gaussian_abs_moment(q: float) -> float:
    """E|Z|^q for standard normal Z: 2^(q/2) Gamma((q+1)/2) / sqrt(pi)."""
    if q <= -1.0:
        raise InvalidParameterError("moment order must exceed -1")
    return 2.0 ** (q / 2.0) * math.gamma((q + 1.0) / 2.0) / math.sqrt(math.pi)


@dataclass(frozen=True)
class FbmVariationReport:
    hurst: float
    n: int
    horizon: float
    seeds: tuple[int, ...]
    per_seed: tuple[float, ...]
    empirical_mean: float
    expected: float

    @property
    def relative_error(self) -> float:
        return abs(self.empirical_mean - self.expected) / abs(self.expected)


def fbm_variation_experiment(
    hurst: float,
    n: int,
    seeds,
    horizon: float = 1.0,
) -> FbmVariationReport:
    """Full-grid (1/H)-th power sums across seeds against the exact mean
    horizon * E|Z|^(1/H), which holds at every resolution by self-similarity."""
    p = 1.0 / hurst
    sums = []
    seeds = tuple(int(s) for s in seeds)
    for seed in seeds:
        path = fbm_path(GaussianPathSpec(hurst=hurst, n=n, horizon=horizon, seed=seed))
        part = Partition(path.times)
        sums.append(pth_variation_partial(path, part, p))
    expected = horizon * gaussian_abs_moment(p)
    return FbmVariationReport(
        hurst=hurst,
        n=n,
        horizon=horizon,
        seeds=seeds,
        per_seed=tuple(sums),
        empirical_mean=float(np.mean(sums)),
        expected=expected,
    )


@dataclass(frozen=True)
class FbmItoReport:
    hurst: float
    seed: int
    levels: tuple[int, ...]
    residuals: tuple[float, ...]
    reports: tuple[ItoReport, ...] = field(repr=False, default=())


def fbm_ito_experiment(
    hurst: float,
    fn: SmoothFn,
    seed: int,
    j_levels,
    p: float | None = None,
    horizon: float = 1.0,
) -> FbmItoReport:
    """Compensated-sum residuals for f along one fBm sample, evaluated on a
    nested ladder of dyadic partitions (the path is sampled once at the
    finest level)."""
    j_levels = sorted(int(j) for j in j_levels)
    if p is None:
        p = 1.0 / hurst
    n_fine = 2 ** j_levels[-1]
    path = fbm_path(GaussianPathSpec(hurst=hurst, n=n_fine, horizon=horizon, seed=seed))
    residuals = []
    reports = []
    for j in j_levels:
        part = badic(horizon, j)
        rep = ito_check(fn, path, part, p)
        reports.append(rep)
        residuals.append(rep.follmer_residual)
    return FbmItoReport(
        hurst=hurst,
        seed=seed,
        levels=tuple(j_levels),
        residuals=tuple(residuals),
        reports=tuple(reports),
    )


# --------------------------------------------------------------------------- #
# direct (materialized) bump-path stage, for cross-checking the decomposition
# --------------------------------------------------------------------------- #


def bump_direct_stage(p: float, n: int, knots: SampledPath, partition: Partition):
    """Kernel/compensated/measure numbers for a materialized bump path along
    a concrete value-step partition; small n only. Returns the ito report
    and the quotient measure."""
    fn = abs_power(p)
    report = ito_check(fn, knots, partition, p)
    atoms = quotient_measure(knots, partition, p)
    return report, atoms
