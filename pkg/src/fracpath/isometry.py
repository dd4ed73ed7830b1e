"""phi-variation gauges, their conjugate weights and the transform isometry.

A gauge phi generalizes x -> x**p; its index p_phi is the power of regular
variation at 0 and its conjugate weight is phi_hat(a) = lim phi(a b)/phi(b)
as b -> 0+. For a C^1 transform F = f(S) of a path with nonzero
phi-variation, the stage sums

    LHS_n = sum phi(|dF_i|)    vs    RHS_n = sum phi_hat(|f'(S_i)|) phi(|dS_i|)

approach each other; the check reports their ratio along a partition
sequence, guarded by an admissibility gate on the path's Holder exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize as _sci_optimize

from .errors import AdmissibilityError, InvalidParameterError, InvalidPhiError, NoLimitError
from .fracops import SmoothFn, _ratio_limit
from .partitions import Partition, badic
from .paths import SampledPath

__all__ = [
    "PhiSpec",
    "phi_hat",
    "phi_hat_numeric",
    "p_phi_estimate",
    "admissibility_threshold",
    "isometry_check",
    "IsometryReport",
    "generalized_minkowski_check",
    "MinkowskiReport",
    "phi_inverse",
    "holder_exponent",
]


@dataclass(frozen=True)
class PhiSpec:
    """Increasing gauge on [0, domain_hi) with phi(0) = 0.

    kind="power":          phi(x) = x**p_phi, valid everywhere.
    kind="log-modulated":  phi(x) = x**p_phi * (-log x)**(-log_power),
                           increasing up to exp(-log_power / p_phi), which
                           becomes the domain cap.
    kind="custom":         any callable; p_phi is the caller's claim about
                           its index and can be cross-checked by
                           p_phi_estimate.
    """

    kind: str = "power"
    p_phi: float = 2.0
    log_power: float = 0.0
    custom_fn: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("power", "log-modulated", "custom"):
            raise InvalidPhiError(f"unknown gauge kind {self.kind!r}")
        if self.p_phi <= 0.0:
            raise InvalidPhiError(f"p_phi must be positive, got {self.p_phi}")
        if self.kind == "log-modulated" and self.log_power <= 0.0:
            raise InvalidPhiError("log-modulated gauges need log_power > 0")
        if self.kind == "custom" and self.custom_fn is None:
            raise InvalidPhiError("custom gauges need a callable")

    @property
    def domain_hi(self) -> float:
        if self.kind == "log-modulated":
            return math.exp(-self.log_power / self.p_phi)
        return math.inf

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if np.any(x < 0.0):
            raise InvalidPhiError("gauges act on magnitudes; negative input")
        if np.any(x >= self.domain_hi):
            raise InvalidPhiError(
                f"input exceeds the gauge domain cap {self.domain_hi!r}; rescale first"
            )
        if self.kind == "power":
            return x**self.p_phi
        if self.kind == "custom":
            out = np.asarray(self.custom_fn(x), dtype=float)
            if np.any(out < 0.0) or not np.all(np.isfinite(out)):
                raise InvalidPhiError("custom gauge must be finite and nonnegative")
            return out
        out = np.zeros_like(x)
        pos = x > 0.0
        out[pos] = x[pos] ** self.p_phi * (-np.log(x[pos])) ** (-self.log_power)
        return out


def phi_hat(spec: PhiSpec) -> Callable[[np.ndarray], np.ndarray]:
    """Conjugate weight phi_hat(a) = lim_{b->0+} phi(a b) / phi(b).

    For the power and log-modulated kinds the slowly varying factor drops out
    and the limit is |a|**p_phi in closed form; custom gauges get the numeric
    limit pointwise.
    """
    if spec.kind in ("power", "log-modulated"):
        p = spec.p_phi

        def closed(a):
            return np.abs(np.asarray(a, dtype=float)) ** p

        return closed

    def numeric(a):
        a = np.asarray(a, dtype=float)
        flat = np.atleast_1d(a).ravel()
        vals = np.array([phi_hat_numeric(spec, float(ai)) for ai in flat])
        return vals.reshape(np.atleast_1d(a).shape) if a.ndim else float(vals[0])

    return numeric


def phi_hat_numeric(spec: PhiSpec, a: float, j_lo: int = 8, j_hi: int = 26) -> float:
    """Numeric conjugate weight at one point, by the dyadic ratio ladder
    phi(a * 2^-j) / phi(2^-j) with the usual stabilize/decay/no-limit rules."""
    if a < 0.0:
        raise InvalidPhiError("conjugate weights act on magnitudes")
    if a == 0.0:
        return 0.0
    bs = 2.0 ** -np.arange(j_lo, j_hi + 1, dtype=float)
    # keep both arguments inside the gauge domain
    cap = spec.domain_hi
    usable = (bs < cap) & (a * bs < cap)
    bs = bs[usable]
    if bs.size < 5:
        raise InvalidPhiError("not enough usable ladder points inside the gauge domain")
    ratios = spec(a * bs) / spec(bs)
    status, value = _ratio_limit(ratios)
    if status == "no-limit":
        raise NoLimitError(f"conjugate weight ratio does not settle at a = {a!r}")
    return value


def p_phi_estimate(spec: PhiSpec, j_lo: int = 6, j_hi: int = 20) -> float:
    """Regular-variation index of the gauge, by local log-log slopes on the
    dyadic ladder extrapolated linearly in 1/j (slowly varying corrections
    enter at exactly that order)."""
    js = np.arange(j_lo, j_hi + 1, dtype=float)
    xs = 2.0**-js
    cap = spec.domain_hi
    usable = xs < cap
    js, xs = js[usable], xs[usable]
    if xs.size < 4:
        raise InvalidPhiError("not enough ladder points inside the gauge domain")
    ln_phi = np.log(spec(xs))
    slopes = (ln_phi[1:] - ln_phi[:-1]) / (-math.log(2.0))
    inv_j = 1.0 / js[:-1]
    coeffs = np.polyfit(inv_j, slopes, 1)
    return float(coeffs[1])


def admissibility_threshold(p_phi: float) -> float:
    """Smallest Holder exponent of the driving path for which the transform
    isometry is meaningful: (sqrt(1 + 4/p_phi) - 1) / 2."""
    if p_phi <= 0.0:
        raise InvalidParameterError("p_phi must be positive")
    return (math.sqrt(1.0 + 4.0 / p_phi) - 1.0) / 2.0


@dataclass(frozen=True)
class IsometryReport:
    levels: tuple[int, ...]
    lhs: tuple[float, ...]
    rhs: tuple[float, ...]
    ratios: tuple[float, ...]

    @property
    def final_gap(self) -> float:
        return abs(self.ratios[-1] - 1.0)


def isometry_check(
    spec: PhiSpec,
    fn: SmoothFn,
    path: SampledPath,
    partitions: Sequence[Partition],
    holder_alpha: float,
) -> IsometryReport:
    """Compare stage sums of phi(|dF|) for F = f(S) against the weighted sums
    phi_hat(|f'(S)|) phi(|dS|) along a partition sequence.

    ``holder_alpha`` is the (estimated or known) Holder exponent of the path;
    it must clear admissibility_threshold(p_phi), otherwise the comparison
    has no limit to converge to and the check refuses to run.
    """
    if len(fn.derivs) < 1:
        raise InvalidParameterError("the transform needs a first derivative")
    gate = admissibility_threshold(spec.p_phi)
    if holder_alpha <= gate:
        raise AdmissibilityError(
            f"holder exponent {holder_alpha:.4f} does not exceed the gate {gate:.4f} "
            f"for p_phi = {spec.p_phi}"
        )
    hat = phi_hat(spec)
    levels: list[int] = []
    lhs_list: list[float] = []
    rhs_list: list[float] = []
    ratios: list[float] = []
    for part in partitions:
        s_vals = path.value_at(part.times)
        f_vals = fn.fn(s_vals)
        ds = np.abs(np.diff(s_vals))
        dfv = np.abs(np.diff(f_vals))
        lhs = float(np.sum(spec(dfv)))
        rhs = float(np.sum(hat(np.abs(fn.derivs[0](s_vals[:-1]))) * spec(ds)))
        levels.append(part.n_intervals)
        lhs_list.append(lhs)
        rhs_list.append(rhs)
        ratios.append(lhs / rhs if rhs != 0.0 else math.inf)
    return IsometryReport(
        levels=tuple(levels),
        lhs=tuple(lhs_list),
        rhs=tuple(rhs_list),
        ratios=tuple(ratios),
    )


# --------------------------------------------------------------------------- #
# generalized triangle inequality
# --------------------------------------------------------------------------- #


def phi_inverse(spec: PhiSpec, y: float) -> float:
    """Inverse of the gauge on its increasing branch, by bracketed root
    finding; raises when y exceeds the gauge's reachable range."""
    if y < 0.0:
        raise InvalidPhiError("gauge values are nonnegative")
    if y == 0.0:
        return 0.0
    cap = spec.domain_hi
    if math.isfinite(cap):
        hi = cap * (1.0 - 1e-12)
        if y > float(spec(np.asarray(hi))):
            raise InvalidPhiError(
                f"value {y!r} is outside the gauge range (cap {cap!r}); rescale inputs"
            )
    else:
        hi = 1.0
        while float(spec(np.asarray(hi))) < y:
            hi *= 2.0
            if hi > 1e300:
                raise InvalidPhiError("failed to bracket the gauge inverse")
    root = _sci_optimize.brentq(
        lambda x: float(spec(np.asarray(x))) - y, 0.0, hi, xtol=1e-15, rtol=8.9e-16
    )
    return float(root)


@dataclass(frozen=True)
class MinkowskiReport:
    lhs: float
    rhs: float

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + 1e-12)


def generalized_minkowski_check(spec: PhiSpec, a: np.ndarray, b: np.ndarray) -> MinkowskiReport:
    """Triangle inequality in the gauge's variation scale:

        phi^-1(sum phi(a_k + b_k)) <= phi^-1(sum phi(a_k)) + phi^-1(sum phi(b_k))

    for componentwise nonnegative vectors. Returns both sides; the report's
    ``ok`` allows rounding slack only.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise InvalidParameterError("need two 1-d vectors of equal length")
    if np.any(a < 0.0) or np.any(b < 0.0):
        raise InvalidParameterError("vectors must be componentwise nonnegative")
    lhs = phi_inverse(spec, float(np.sum(spec(a + b))))
    rhs = phi_inverse(spec, float(np.sum(spec(a)))) + phi_inverse(spec, float(np.sum(spec(b))))
    return MinkowskiReport(lhs=lhs, rhs=rhs)


# --------------------------------------------------------------------------- #
# Holder exponent estimate
# --------------------------------------------------------------------------- #


def holder_exponent(path: SampledPath, j_lo: int = 4, j_hi: int = 10, base: int = 2) -> float:
    """Slope estimate of the path's Holder exponent: largest increments over
    b-adic grids shrink like base**(-alpha j); fit log(max increment)
    against j."""
    if j_hi <= j_lo:
        raise InvalidParameterError("need j_hi > j_lo")
    js = np.arange(j_lo, j_hi + 1, dtype=float)
    logs = []
    for j in js:
        part = badic(path.horizon, int(j), base)
        vals = path.value_at(part.times)
        m = float(np.max(np.abs(np.diff(vals))))
        if m <= 0.0:
            raise InvalidParameterError("path is flat at this resolution")
        logs.append(math.log(m) / math.log(base))
    slope = float(np.polyfit(js, np.array(logs), 1)[0])
    return -slope
