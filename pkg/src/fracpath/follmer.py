"""Pathwise change-of-variable checks of Taylor order m = floor(p).

The central identity is finite-stage and exact: along any partition,

    f(S(t)) - f(S(0)) = L^n + sum_i G(S(t_i), S(t_{i+1})) |dS_i|^p

where L^n compensates increments with Taylor terms of orders 1..m and G is
the normalized order-m remainder kernel. What converges (or fails to) as the
partition sequence refines is the split between the two right-hand terms,
and that is what the check routines report.

Variants cover time dependence f(t, x), several driving components, and
functionals of the whole path prefix (with vertical bumps and horizontal
flat extensions of a piecewise-constant prefix).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _sci_integrate

from .errors import (
    InsufficientDerivativesError,
    InvalidBundleError,
    InvalidParameterError,
    KernelSingularError,
)
from .fracops import SmoothFn
from .partitions import Partition, osc
from .paths import SampledPath

__all__ = [
    "compensated_sum",
    "remainder_kernel",
    "kernel_profile",
    "ito_check",
    "ItoReport",
    "TimeFunctionBundle",
    "ito_check_time",
    "TensorFunctionBundle",
    "ito_check_multi",
    "quotient_measure",
    "MeasureAtoms",
    "remainder_integral",
    "bump_atom_weights",
    "BumpAtomTable",
    "PrefixFamily",
    "PathPrefix",
    "FunctionalBundle",
    "ito_check_functional",
    "young_bound_check",
    "YoungReport",
]


def _clipped_values(path: SampledPath, partition: Partition, t: float | None) -> np.ndarray:
    times = partition.times
    if t is not None:
        times = np.minimum(times, t)
    return path.value_at(times)


def _require_derivs(fn: SmoothFn, m: int) -> None:
    if len(fn.derivs) < m:
        raise InsufficientDerivativesError(
            f"need {m} derivatives for Taylor order {m}, got {len(fn.derivs)}"
        )


# --------------------------------------------------------------------------- #
# compensated sums and the scalar check
# --------------------------------------------------------------------------- #


def compensated_sum(
    fn: SmoothFn,
    path: SampledPath,
    partition: Partition,
    m: int,
    t: float | None = None,
) -> float:
    """L^n = sum_i sum_{j=1}^m f^(j)(S(t_i)) / j! * (S(t_{i+1}) - S(t_i))^j,
    with all times clipped at t when given."""
    if m < 1:
        raise InvalidParameterError("Taylor order m must be >= 1")
    _require_derivs(fn, m)
    vals = _clipped_values(path, partition, t)
    left = vals[:-1]
    inc = np.diff(vals)
    total = 0.0
    fact = 1.0
    power = np.ones_like(inc)
    for j in range(1, m + 1):
        fact *= j
        power = power * inc
        total += float(np.sum(fn.derivs[j - 1](left) * power)) / fact
    return total


def _taylor_gap(fn: SmoothFn, left: np.ndarray, right: np.ndarray, m: int) -> np.ndarray:
    """f(right) - sum_{k=0..m} f^(k)(left) (right-left)^k / k!, vectorized."""
    inc = right - left
    gap = fn.fn(right) - fn.fn(left)
    fact = 1.0
    power = np.ones_like(inc)
    for j in range(1, m + 1):
        fact *= j
        power = power * inc
        gap = gap - fn.derivs[j - 1](left) * power / fact
    return gap


def remainder_kernel(fn: SmoothFn, p: float, a: float, b: float) -> float:
    """Normalized Taylor remainder kernel of order m = floor(p):

        G(a, b) = (1 / ((m-1)! |b-a|^p)) *
                  integral_a^b (f^(m)(x) - f^(m)(a)) (b-x)^(m-1) dx.

    Computed through the integral form (declared kinks become quadrature
    break points); the Taylor-difference form of the same quantity is what
    the vectorized check routines use, so the two can be cross-validated.

    At a == b the kernel is 0 when f is smoother than order p there, and has
    no finite value when a sits on a kink of exponent <= p.
    """
    if p <= 1.0:
        raise InvalidParameterError(f"p must exceed 1, got {p}")
    m = int(math.floor(p))
    _require_derivs(fn, m)
    if a == b:
        for loc, expo in fn.kinks:
            if loc == a and expo <= p:
                raise KernelSingularError(
                    f"kernel diverges on the diagonal at {a!r} (kink exponent {expo})"
                )
        return 0.0
    fm = fn.derivs[m - 1] if m >= 1 else fn.fn
    fma = float(fm(np.asarray(a, dtype=float)))

    def integrand(x):
        return (float(fm(np.asarray(x, dtype=float))) - fma) * (b - x) ** (m - 1)

    lo, hi = (a, b) if a < b else (b, a)
    pts = sorted({k for k, _ in fn.kinks if lo < k < hi})
    val, _err = _sci_integrate.quad(
        integrand, lo, hi, points=pts or None, limit=200, epsabs=1e-14, epsrel=1e-11
    )
    if a > b:
        val = -val
    return val / (math.factorial(m - 1) * abs(b - a) ** p)


def kernel_profile(
    fn: SmoothFn,
    p: float,
    thetas: np.ndarray,
    method: str = "taylor",
) -> np.ndarray:
    """Kernel restricted to the unit circle, G(cos theta, sin theta).

    method="taylor" uses the Taylor-difference form (fast, vectorized);
    method="integral" calls remainder_kernel per angle.
    """
    thetas = np.asarray(thetas, dtype=float)
    m = int(math.floor(p))
    _require_derivs(fn, m)
    a = np.cos(thetas)
    b = np.sin(thetas)
    # snap the axis angles: cos(pi/2) rounds to 6.1e-17, and a derivative
    # with a fractional-power singularity at 0 (|x|**(p-2) and friends)
    # amplifies that residue to ~1e-4, visibly polluting the kernel there
    a = np.where(np.abs(a) < 4e-16, 0.0, a)
    b = np.where(np.abs(b) < 4e-16, 0.0, b)
    if method == "integral":
        return np.array([remainder_kernel(fn, p, ai, bi) for ai, bi in zip(a, b)])
    if method != "taylor":
        raise InvalidParameterError(f"unknown method {method!r}")
    gap = _taylor_gap(fn, a, b, m)
    return gap / np.abs(b - a) ** p


@dataclass(frozen=True)
class ItoReport:
    """Terms of one finite-stage change-of-variable identity."""

    value_change: float
    compensated: float
    kernel_sum: float
    n_increments: int
    n_zero_increments: int = 0
    time_integral: float = 0.0
    time_quadrature_gap: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def identity_residual(self) -> float:
        """value change minus every reconstructed term; rounding-level by
        construction, anything larger flags an implementation bug."""
        return self.value_change - self.time_integral - self.compensated - self.kernel_sum

    @property
    def follmer_residual(self) -> float:
        """value change minus the compensated (and time) parts; the quantity
        whose limit behaviour along partition sequences is of interest."""
        return self.value_change - self.time_integral - self.compensated


def ito_check(
    fn: SmoothFn,
    path: SampledPath,
    partition: Partition,
    p: float,
    t: float | None = None,
) -> ItoReport:
    """Evaluate the order-m identity for f(S) along one partition.

    The kernel sum goes through the normalized kernel G (divide by |dS|^p,
    multiply back), so the reported identity residual honestly measures the
    rounding accumulated over all increments instead of being zero by
    algebra.
    """
    if p <= 1.0:
        raise InvalidParameterError(f"p must exceed 1, got {p}")
    m = int(math.floor(p))
    _require_derivs(fn, m)
    vals = _clipped_values(path, partition, t)
    left, right = vals[:-1], vals[1:]
    inc = right - left
    nonzero = inc != 0.0
    lhs = float(fn.fn(vals[-1:]).item() - fn.fn(vals[:1]).item())
    comp = 0.0
    fact = 1.0
    power = np.ones_like(inc)
    for j in range(1, m + 1):
        fact *= j
        power = power * inc
        comp += float(np.sum(fn.derivs[j - 1](left) * power)) / fact
    gap = _taylor_gap(fn, left[nonzero], right[nonzero], m)
    mag = np.abs(inc[nonzero]) ** p
    g_vals = gap / mag
    kernel_sum = float(np.sum(g_vals * mag))
    return ItoReport(
        value_change=lhs,
        compensated=comp,
        kernel_sum=kernel_sum,
        n_increments=int(inc.size),
        n_zero_increments=int(inc.size - np.count_nonzero(nonzero)),
    )


# --------------------------------------------------------------------------- #
# time-dependent and multi-component variants
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class TimeFunctionBundle:
    """f(t, x) with its time derivative and space derivatives, all callables
    vectorized over numpy arrays in both arguments."""

    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dt: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dx: tuple[Callable[[np.ndarray, np.ndarray], np.ndarray], ...]
    name: str = ""


_GL4_NODES, _GL4_WEIGHTS = np.polynomial.legendre.leggauss(4)


def ito_check_time(
    bundle: TimeFunctionBundle,
    path: SampledPath,
    partition: Partition,
    p: float,
    t: float | None = None,
) -> ItoReport:
    """Identity for f(t, S(t)): per interval the change splits into a time
    difference at the right-endpoint value and a space difference at the
    left-endpoint time. The time part is also integrated (fixed 4-point
    Gauss rule on each interval) and the gap between the exact differences
    and the quadrature is reported separately.
    """
    if p <= 1.0:
        raise InvalidParameterError(f"p must exceed 1, got {p}")
    m = int(math.floor(p))
    if len(bundle.dx) < m:
        raise InsufficientDerivativesError(f"need {m} space derivatives, got {len(bundle.dx)}")
    times = partition.times if t is None else np.minimum(partition.times, t)
    vals = path.value_at(times)
    t_l, t_r = times[:-1], times[1:]
    s_l, s_r = vals[:-1], vals[1:]
    inc = s_r - s_l

    lhs = float(bundle.fn(times[-1:], vals[-1:]).item() - bundle.fn(times[:1], vals[:1]).item())

    # time part: exact differences, frozen at the right-endpoint value
    time_exact = float(np.sum(bundle.fn(t_r, s_r) - bundle.fn(t_l, s_r)))
    half = 0.5 * (t_r - t_l)
    mid = 0.5 * (t_r + t_l)
    time_gl = 0.0
    for node, weight in zip(_GL4_NODES, _GL4_WEIGHTS):
        time_gl += float(np.sum(weight * half * bundle.dt(mid + node * half, s_r)))

    # space part at the left-endpoint time
    comp = 0.0
    fact = 1.0
    power = np.ones_like(inc)
    for j in range(1, m + 1):
        fact *= j
        power = power * inc
        comp += float(np.sum(bundle.dx[j - 1](t_l, s_l) * power)) / fact
    space_gap = bundle.fn(t_l, s_r) - bundle.fn(t_l, s_l)
    fact = 1.0
    power = np.ones_like(inc)
    for j in range(1, m + 1):
        fact *= j
        power = power * inc
        space_gap = space_gap - bundle.dx[j - 1](t_l, s_l) * power / fact
    nonzero = inc != 0.0
    mag = np.abs(inc[nonzero]) ** p
    kernel_sum = float(np.sum((space_gap[nonzero] / mag) * mag))
    return ItoReport(
        value_change=lhs,
        compensated=comp,
        kernel_sum=kernel_sum,
        n_increments=int(inc.size),
        n_zero_increments=int(inc.size - np.count_nonzero(nonzero)),
        time_integral=time_exact,
        time_quadrature_gap=abs(time_exact - time_gl),
    )


@dataclass(frozen=True)
class TensorFunctionBundle:
    """f on R^d with gradient and (optionally) Hessian; ``fn`` maps (..., d)
    arrays to (...,), ``grad`` to (..., d), ``hess`` to (..., d, d)."""

    fn: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = ""


def ito_check_multi(
    bundle: TensorFunctionBundle,
    paths: Sequence[SampledPath],
    partition: Partition,
    p: float,
    t: float | None = None,
) -> ItoReport:
    """Identity for f(S^1, ..., S^d) along a shared partition; increment
    magnitudes use the euclidean norm. Taylor order m = floor(p) must be 1
    or 2 (a Hessian is required for m = 2)."""
    if p <= 1.0:
        raise InvalidParameterError(f"p must exceed 1, got {p}")
    m = int(math.floor(p))
    if m > 2:
        raise InsufficientDerivativesError("multi-component checks support m in {1, 2}")
    if m == 2 and bundle.hess is None:
        raise InsufficientDerivativesError("m = 2 requires a Hessian")
    base = paths[0].times
    for other in paths[1:]:
        if not np.array_equal(other.times, base):
            raise InvalidParameterError("component paths must share their time grid")
    vals = np.stack([_clipped_values(q, partition, t) for q in paths], axis=1)  # (N+1, d)
    left = vals[:-1]
    inc = np.diff(vals, axis=0)  # (N, d)
    lhs = float(bundle.fn(vals[-1:]).item() - bundle.fn(vals[:1]).item())
    g = bundle.grad(left)
    first = np.einsum("nd,nd->n", g, inc)
    comp_terms = first
    if m == 2:
        h = bundle.hess(left)
        second = 0.5 * np.einsum("nd,nde,ne->n", inc, h, inc)
        comp_terms = comp_terms + second
    comp = float(np.sum(comp_terms))
    gap = bundle.fn(vals[1:]) - bundle.fn(left) - comp_terms
    norms = np.sqrt(np.einsum("nd,nd->n", inc, inc))
    nonzero = norms != 0.0
    mag = norms[nonzero] ** p
    kernel_sum = float(np.sum((gap[nonzero] / mag) * mag))
    return ItoReport(
        value_change=lhs,
        compensated=comp,
        kernel_sum=kernel_sum,
        n_increments=int(norms.size),
        n_zero_increments=int(norms.size - np.count_nonzero(nonzero)),
    )


# --------------------------------------------------------------------------- #
# quotient measures on (time, direction) with p-th power weights
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class MeasureAtoms:
    """Finite-stage quotient measure: one atom per nonzero increment, at the
    direction angle atan2(right value, left value), weighted |increment|^p."""

    times: np.ndarray
    angles: np.ndarray
    weights: np.ndarray
    dropped_zero: int = 0

    @property
    def mass(self) -> float:
        return float(np.sum(self.weights))


def quotient_measure(
    path: SampledPath,
    partition: Partition,
    p: float,
    t: float | None = None,
) -> MeasureAtoms:
    """Atoms (t_i, atan2(S(t_{i+1}), S(t_i)), |dS_i|^p) of one partition
    stage. Zero increments carry no mass and are dropped (their count is
    kept); the total mass equals the p-th power sum exactly.

    Because the angle is atan2 of the raw value pair, rescaling the path by
    a power of two leaves every angle bitwise unchanged.
    """
    if p <= 0.0:
        raise InvalidParameterError(f"p must be positive, got {p}")
    times = partition.times if t is None else np.minimum(partition.times, t)
    vals = path.value_at(times)
    left, right = vals[:-1], vals[1:]
    inc = right - left
    nonzero = inc != 0.0
    angles = np.arctan2(right[nonzero], left[nonzero])
    weights = np.abs(inc[nonzero]) ** p
    return MeasureAtoms(
        times=times[:-1][nonzero],
        angles=angles,
        weights=weights,
        dropped_zero=int(inc.size - np.count_nonzero(nonzero)),
    )


def remainder_integral(
    fn: SmoothFn,
    p: float,
    angles: np.ndarray,
    weights: np.ndarray,
    method: str = "taylor",
) -> float:
    """Integral of the circle-restricted kernel against an angle measure:
    sum_k G(cos theta_k, sin theta_k) * w_k.

    For p-homogeneous f this equals the kernel sum of any stage whose
    quotient measure projects to these atoms, which is what makes limit
    measures usable in place of deep partitions.
    """
    profile = kernel_profile(fn, p, np.asarray(angles, dtype=float), method=method)
    return float(np.sum(profile * np.asarray(weights, dtype=float)))


@dataclass(frozen=True)
class BumpAtomTable:
    """Closed-form limit atoms of the bump path's quotient measure under
    value-step partitions: for each ladder rung k the rising atom sits at
    atan2(k+1, k) and the falling atom at atan2(k, k+1), both of weight
    2^(-ceil(log2(k+1)) p) (2^(p-1) - 1) / (2^p - 1). Total mass over all
    k >= 0 is exactly 1."""

    ks: np.ndarray
    weights: np.ndarray
    up_angles: np.ndarray
    down_angles: np.ndarray

    @property
    def mass(self) -> float:
        return 2.0 * float(np.sum(self.weights))

    def flat(self) -> tuple[np.ndarray, np.ndarray]:
        """All atoms as (angles, weights) arrays."""
        return (
            np.concatenate([self.up_angles, self.down_angles]),
            np.concatenate([self.weights, self.weights]),
        )


def bump_atom_weights(p: float, k_max: int) -> BumpAtomTable:
    if not 2.0 < p < 3.0:
        raise InvalidParameterError(f"p must lie in (2, 3), got {p}")
    if k_max < 0:
        raise InvalidParameterError("k_max must be >= 0")
    ks = np.arange(k_max + 1)
    levels = np.ceil(np.log2(ks + 1.0))
    levels[0] = 0.0
    c = (2.0 ** (p - 1.0) - 1.0) / (2.0**p - 1.0)
    weights = 2.0 ** (-levels * p) * c
    up = np.arctan2(ks + 1.0, ks.astype(float))
    down = np.arctan2(ks.astype(float), ks + 1.0)
    return BumpAtomTable(ks=ks, weights=weights, up_angles=up, down_angles=down)


# --------------------------------------------------------------------------- #
# functionals of path prefixes
# --------------------------------------------------------------------------- #


class PrefixFamily:
    """Shared storage for all prefixes of one discretized path.

    mode="step" freezes the path right of each sample (the piecewise-constant
    approximation the functional calculus expands along); mode="linear"
    interpolates, which is the right reading for integral targets. Cumulative
    integrals are precomputed so every prefix exposes O(1) evaluations.
    """

    def __init__(self, path: SampledPath, partition: Partition, mode: str = "step"):
        if mode not in ("step", "linear"):
            raise InvalidParameterError(f"unknown mode {mode!r}")
        self.mode = mode
        self.times = partition.times
        self.values = path.value_at(self.times)
        dt = np.diff(self.times)
        if mode == "step":
            seg = self.values[:-1] * dt
        else:
            seg = 0.5 * (self.values[:-1] + self.values[1:]) * dt
        self.cum = np.concatenate([[0.0], np.cumsum(seg)])

    def prefix(self, j: int, bump: float = 0.0, extend_to: float | None = None) -> "PathPrefix":
        if not 0 <= j < self.times.size:
            raise InvalidParameterError(f"prefix index {j} out of range")
        if extend_to is not None and extend_to < self.times[j]:
            raise InvalidParameterError("extension must not go backwards")
        return PathPrefix(self, j, bump, extend_to)


@dataclass(frozen=True)
class PathPrefix:
    """The path seen up to sample j, optionally with its endpoint value
    bumped and/or extended flat to a later time."""

    family: PrefixFamily
    j: int
    bump: float = 0.0
    extend_to: float | None = None

    @property
    def end_time(self) -> float:
        if self.extend_to is not None:
            return self.extend_to
        return float(self.family.times[self.j])

    @property
    def current(self) -> float:
        return float(self.family.values[self.j]) + self.bump

    def integral(self) -> float:
        """integral of the prefix over [0, end_time]; the flat extension
        carries the (possibly bumped) endpoint value."""
        base = float(self.family.cum[self.j])
        if self.extend_to is not None:
            base += (self.extend_to - float(self.family.times[self.j])) * self.current
        return base

    def past_values(self) -> np.ndarray:
        """Samples strictly before the endpoint (bump not applied)."""
        return self.family.values[: self.j]


@dataclass(frozen=True)
class FunctionalBundle:
    """A path functional with optional analytic vertical derivatives.

    ``evaluate`` maps a PathPrefix to a float. ``vertical`` holds the first
    and (optionally) second derivative with respect to a bump of the endpoint
    value; missing entries fall back to centered differences with a step tied
    to the partition's oscillation.
    """

    evaluate: Callable[[PathPrefix], float]
    vertical: tuple[Callable[[PathPrefix], float], ...] = ()
    name: str = ""


def ito_check_functional(
    bundle: FunctionalBundle,
    path: SampledPath,
    partition: Partition,
    p: float,
    fd_step: float | None = None,
) -> ItoReport:
    """Identity for a functional of the path prefix along one partition.

    Per interval the prefix first extends flat (horizontal difference, taken
    exactly as a difference of evaluations) and then jumps at the right
    endpoint (vertical difference, expanded to Taylor order m = floor(p) in
    the bump size). Missing vertical derivatives are replaced by centered
    differences with step ``fd_step`` (default: half the oscillation of the
    path along the partition).
    """
    if p <= 1.0:
        raise InvalidParameterError(f"p must exceed 1, got {p}")
    m = int(math.floor(p))
    if m > 2:
        raise InvalidBundleError("functional checks support m in {1, 2}")
    fam = PrefixFamily(path, partition, mode="step")
    n = fam.times.size - 1
    if fd_step is None:
        fd_step = 0.5 * osc(path, partition)
        if fd_step == 0.0:
            fd_step = 1e-6
    F = bundle.evaluate

    def vert1(prefix: PathPrefix) -> float:
        if len(bundle.vertical) >= 1:
            return bundle.vertical[0](prefix)
        up = F(fam.prefix(prefix.j, prefix.bump + fd_step, prefix.extend_to))
        dn = F(fam.prefix(prefix.j, prefix.bump - fd_step, prefix.extend_to))
        return (up - dn) / (2.0 * fd_step)

    def vert2(prefix: PathPrefix) -> float:
        if len(bundle.vertical) >= 2:
            return bundle.vertical[1](prefix)
        up = F(fam.prefix(prefix.j, prefix.bump + fd_step, prefix.extend_to))
        mid = F(prefix)
        dn = F(fam.prefix(prefix.j, prefix.bump - fd_step, prefix.extend_to))
        return (up - 2.0 * mid + dn) / fd_step**2

    lhs = F(fam.prefix(n)) - F(fam.prefix(0))
    horizontal = 0.0
    vertical_taylor = 0.0
    vertical_exact = 0.0
    for i in range(n):
        plain = fam.prefix(i)
        extended = fam.prefix(i, 0.0, float(fam.times[i + 1]))
        f_plain = F(plain)
        f_ext = F(extended)
        horizontal += f_ext - f_plain
        ds = float(fam.values[i + 1] - fam.values[i])
        jumped = F(fam.prefix(i + 1))
        vertical_exact += jumped - f_ext
        term = vert1(extended) * ds
        if m >= 2:
            term += 0.5 * vert2(extended) * ds * ds
        vertical_taylor += term
    kernel_sum = vertical_exact - vertical_taylor
    return ItoReport(
        value_change=lhs,
        compensated=vertical_taylor,
        kernel_sum=kernel_sum,
        n_increments=n,
        time_integral=horizontal,
        details={"vertical_exact": vertical_exact, "fd_step": fd_step},
    )


# --------------------------------------------------------------------------- #
# Young product bound for mixed-variation sums
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class YoungReport:
    p: float
    alphas: tuple[float, ...]
    levels: tuple[int, ...]
    lhs: tuple[float, ...]
    rhs: tuple[float, ...]
    all_ok: bool

    @property
    def margins(self) -> tuple[float, ...]:
        return tuple(r - l for l, r in zip(self.lhs, self.rhs))


def young_bound_check(
    paths: Sequence[SampledPath],
    alphas: Sequence[float],
    partitions: Sequence[Partition],
) -> YoungReport:
    """Check, level by level, the Young product bound on mixed increments:

        sum_j prod_i |dS^i_j|^(alpha_i)
            <= sum_j sum_eps |sum_i eps_i (alpha_i / p) dS^i_j|^p

    with p = sum(alphas) and eps running over the sign patterns in
    {-1,+1}^d modulo a global flip (so d=1 is an exact equality). Each side
    is a finite sum, so the report is pure arithmetic per level.
    """
    alphas = tuple(float(a) for a in alphas)
    if not alphas or len(alphas) != len(paths):
        raise InvalidParameterError("need one exponent per path component")
    if any(a <= 0.0 for a in alphas):
        raise InvalidParameterError("exponents must be positive")
    p = float(sum(alphas))
    d = len(paths)
    # fix the first sign to +1: a pattern and its negation give the same term
    patterns = [
        np.array((1.0,) + tuple(b * 2.0 - 1.0 for b in bits), dtype=float)
        for bits in np.ndindex(*(2,) * (d - 1))
    ]
    weights = np.array(alphas, dtype=float) / p
    levels: list[int] = []
    lhs_list: list[float] = []
    rhs_list: list[float] = []
    all_ok = True
    for part in partitions:
        times = part.times
        dv = np.stack([np.diff(sp.value_at(times)) for sp in paths], axis=1)
        lhs = float(np.sum(np.prod(np.abs(dv) ** np.array(alphas), axis=1)))
        rhs = 0.0
        for eps in patterns:
            rhs += float(np.sum(np.abs(dv @ (eps * weights)) ** p))
        if lhs > rhs * (1.0 + 1e-12) + 1e-15:
            all_ok = False
        levels.append(part.n_intervals)
        lhs_list.append(lhs)
        rhs_list.append(rhs)
    return YoungReport(
        p=p,
        alphas=alphas,
        levels=tuple(levels),
        lhs=tuple(lhs_list),
        rhs=tuple(rhs_list),
        all_ok=all_ok,
    )
