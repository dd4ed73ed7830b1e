"""Fractional-order integrals, derivatives and Taylor-type diagnostics.

Orders are written p = m + alpha with integer part m and fractional part
alpha in (0, 1). Integral operators are computed by Gauss-Legendre panels
after a power substitution that absorbs the endpoint singularity of the
kernel; known algebraic kinks of the integrand are declared on the function
object and handled by splitting plus one-sided substitutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._quad import gl_adaptive, left_power_substitution, right_power_substitution
from .errors import (
    InsufficientDerivativesError,
    InvalidParameterError,
    NoLimitError,
)

__all__ = [
    "FracOrder",
    "SmoothFn",
    "rl_integral",
    "caputo",
    "caputo_power",
    "power_rule",
    "local_frac_derivative",
    "frac_taylor_check",
    "FracTaylorReport",
]

_FD_REL_STEP = 1e-5


@dataclass(frozen=True)
class FracOrder:
    """Non-integer order p > 0, split as p = m + alpha, alpha in (0, 1)."""

    p: float

    def __post_init__(self) -> None:
        if self.p <= 0.0:
            raise InvalidParameterError(f"order must be positive, got {self.p}")
        if abs(self.p - round(self.p)) < 1e-12:
            raise InvalidParameterError(f"order must be non-integer, got {self.p}")

    @property
    def m(self) -> int:
        return int(math.floor(self.p))

    @property
    def alpha(self) -> float:
        return self.p - self.m


@dataclass(frozen=True)
class SmoothFn:
    """A scalar function with explicitly supplied derivatives.

    ``derivs[k]`` is the (k+1)-th derivative. ``kinks`` lists points where the
    function behaves like c * |x - loc|**exponent plus something smoother;
    integral operators split there. Derivatives beyond the supplied ones fall
    back to central differences (one level of which is usable, more is not).
    """

    fn: Callable[[np.ndarray], np.ndarray]
    derivs: tuple[Callable[[np.ndarray], np.ndarray], ...] = ()
    kinks: tuple[tuple[float, float], ...] = ()
    name: str = ""

    def deriv(self, k: int) -> Callable[[np.ndarray], np.ndarray]:
        if k < 0:
            raise InvalidParameterError("derivative order must be >= 0")
        if k == 0:
            return self.fn
        if k <= len(self.derivs):
            return self.derivs[k - 1]
        lower = self.deriv(k - 1)

        def fd(x):
            x = np.asarray(x, dtype=float)
            h = _FD_REL_STEP * np.maximum(1.0, np.abs(x))
            return (lower(x + h) - lower(x - h)) / (2.0 * h)

        return fd

    def kinks_in(self, lo: float, hi: float) -> list[tuple[float, float]]:
        return [(k, b) for (k, b) in self.kinks if lo < k < hi]


def _as_smooth(fn) -> SmoothFn:
    return fn if isinstance(fn, SmoothFn) else SmoothFn(fn=fn)


# --------------------------------------------------------------------------- #
# piecewise integration with one-sided power substitutions
# --------------------------------------------------------------------------- #


def _integrate_piece(
    g: Callable,
    lo: float,
    hi: float,
    left_beta: float | None,
    right_beta: float | None,
    rtol: float,
) -> float:
    """Integrate g over [lo, hi] where g ~ (t-lo)**(left_beta-1) at lo and/or
    ~ (hi-t)**(right_beta-1) at hi (None means the end is regular)."""
    if hi <= lo:
        return 0.0
    if left_beta is not None and right_beta is not None:
        mid = 0.5 * (lo + hi)
        return _integrate_piece(g, lo, mid, left_beta, None, rtol) + _integrate_piece(
            g, mid, hi, None, right_beta, rtol
        )
    if left_beta is not None:
        gg, u0, u1 = left_power_substitution(g, lo, hi, left_beta)
        return gl_adaptive(gg, u0, u1, rtol=rtol)
    if right_beta is not None:
        gg, u0, u1 = right_power_substitution(g, lo, hi, right_beta)
        return gl_adaptive(gg, u0, u1, rtol=rtol)
    return gl_adaptive(g, lo, hi, rtol=rtol)


# --------------------------------------------------------------------------- #
# Riemann-Liouville integral
# --------------------------------------------------------------------------- #


def rl_integral(fn, alpha: float, a: float, x: float, rtol: float = 1e-9) -> float:
    """Fractional integral of order alpha in (0, 1):

        (1 / Gamma(alpha)) * integral_a^x (x - t)**(alpha - 1) f(t) dt.

    The kernel singularity at t = x is absorbed by the substitution
    u = (x - t)**alpha, after which Gauss-Legendre panels apply; declared
    kinks of f become interior break points of the u-integral.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha}")
    if x < a:
        raise InvalidParameterError("need x >= a")
    if x == a:
        return 0.0
    sm = _as_smooth(fn)
    f = sm.fn
    inv_alpha = 1.0 / alpha

    def g(u):
        u = np.asarray(u, dtype=float)
        return f(x - np.maximum(u, 0.0) ** inv_alpha)

    upper = (x - a) ** alpha
    breaks = sorted((x - k) ** alpha for k, _ in sm.kinks_in(a, x))
    edges = [0.0] + breaks + [upper]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += gl_adaptive(g, lo, hi, rtol=rtol)
    return total / math.gamma(alpha + 1.0)


# --------------------------------------------------------------------------- #
# Caputo derivative
# --------------------------------------------------------------------------- #


def _caputo_density_route(sm: SmoothFn, order: FracOrder, a: float, x: float, rtol: float) -> float:
    """Caputo via the (m+1)-th derivative:

        (1 / Gamma(2 - alpha)) * integral_0^{(x-a)^{1-alpha}}
            f^(m+1)(x - u**(1/(1-alpha))) du
    """
    alpha = order.alpha
    g_t = sm.deriv(order.m + 1)
    one_minus = 1.0 - alpha
    inv = 1.0 / one_minus

    def g(u):
        u = np.asarray(u, dtype=float)
        return g_t(x - np.maximum(u, 0.0) ** inv)

    upper = (x - a) ** one_minus
    # map algebraic kinks of f into u-space with the strength of f^(m+1) there
    marks: list[tuple[float, float]] = []  # (u position, local exponent of f^(m+1))
    for loc, expo in sm.kinks:
        if a <= loc < x:
            marks.append(((x - loc) ** one_minus, expo - order.m - 1.0))
    marks.sort()
    edges = [0.0] + [u for u, _ in marks] + [upper]
    strengths = {u: s for u, s in marks}
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        s_lo = strengths.get(lo)
        s_hi = strengths.get(hi)
        left_beta = None if s_lo is None or s_lo >= 1.0 else s_lo + 1.0
        right_beta = None if s_hi is None or s_hi >= 1.0 else s_hi + 1.0
        total += _integrate_piece(g, lo, hi, left_beta, right_beta, rtol)
    return total / math.gamma(2.0 - alpha)


def _caputo_fd_route(sm: SmoothFn, order: FracOrder, a: float, x: float, rtol: float) -> float:
    """Caputo via a centered difference of the (1-alpha)-integral of the
    centered m-th derivative; used when no (m+1)-th derivative is supplied."""
    alpha = order.alpha
    fm = sm.deriv(order.m)
    fma = float(fm(np.asarray(a, dtype=float)))
    centered = SmoothFn(
        fn=lambda t: fm(t) - fma,
        kinks=tuple((k, b - order.m) for k, b in sm.kinks),
    )
    h = _FD_REL_STEP * max(1.0, abs(x))
    lo_x, hi_x = x - h, x + h
    if lo_x <= a:
        lo_x = a + (hi_x - a) * 0.5
    up = rl_integral(centered, 1.0 - alpha, a, hi_x, rtol=min(rtol, 1e-11))
    dn = rl_integral(centered, 1.0 - alpha, a, lo_x, rtol=min(rtol, 1e-11))
    return (up - dn) / (hi_x - lo_x)


def caputo(fn, order: FracOrder, a: float, x: float, rtol: float = 1e-9) -> float:
    """Caputo derivative of non-integer order p = m + alpha on [a, x]:

        (1 / Gamma(1 - alpha)) * integral_a^x (x - t)**(-alpha) f^(m+1)(t) dt

    when an (m+1)-th derivative is available; otherwise the equivalent
    derivative-of-fractional-integral form of the m-th derivative, by finite
    differences. Requires at least m supplied derivatives.
    """
    if x < a:
        raise InvalidParameterError("need x >= a")
    if x == a:
        return 0.0
    sm = _as_smooth(fn)
    if len(sm.derivs) < order.m:
        raise InsufficientDerivativesError(
            f"order {order.p} needs {order.m} derivatives, got {len(sm.derivs)}"
        )
    if len(sm.derivs) >= order.m + 1:
        return _caputo_density_route(sm, order, a, x, rtol)
    return _caputo_fd_route(sm, order, a, x, rtol)


def power_rule(q: float, order: FracOrder, k: float, x: float) -> float:
    """Reference value Gamma(q+1)/Gamma(q+1-p) * (x-k)**(q-p) for the Caputo
    derivative (base point k) of (t - k)**q, valid for q > m."""
    if q <= order.m:
        raise InvalidParameterError(f"power rule needs q > m = {order.m}, got q = {q}")
    if x <= k:
        raise InvalidParameterError("need x > k")
    return math.gamma(q + 1.0) / math.gamma(q + 1.0 - order.p) * (x - k) ** (q - order.p)


def caputo_power(
    q: float,
    order: FracOrder,
    a: float,
    k: float,
    x: float,
    kind: str = "plus",
    rtol: float = 1e-9,
) -> float:
    """Caputo derivative, base point a, of a power function with kink at k.

    kind="plus": f(t) = (t - k)_+**q. The part left of k contributes nothing,
    and the [k, x] part reduces to a Beta integral, giving exactly the power
    rule value regardless of a.

    kind="abs": f(t) = |t - k|**q. The plus part as above; the [a, k] part is
    a one-dimensional integral made regular by the substitution v = (k-t)**(q-m)
    and evaluated by Gauss-Legendre panels.

    Requires q > m and a <= k < x.
    """
    if q <= order.m:
        raise InvalidParameterError(f"need q > m = {order.m}, got q = {q}")
    if not a <= k < x:
        raise InvalidParameterError("need a <= k < x")
    if kind not in ("plus", "abs"):
        raise InvalidParameterError(f"unknown kind {kind!r}")
    plus_part = power_rule(q, order, k, x)
    if kind == "plus" or a == k:
        return plus_part
    m, alpha = order.m, order.alpha
    coeff = math.gamma(q + 1.0) / math.gamma(q - m)
    sgn = (-1.0) ** (m + 1)

    # integral_a^k (x-t)^(-alpha) (k-t)^(q-m-1) dt, with s = k - t
    def g(s):
        s = np.asarray(s, dtype=float)
        return (x - k + s) ** (-alpha) * s ** (q - m - 1.0)

    left_integral = _integrate_piece(g, 0.0, k - a, q - m, None, rtol)
    left_part = sgn * coeff / math.gamma(1.0 - alpha) * left_integral
    return plus_part + left_part


# --------------------------------------------------------------------------- #
# pointwise (local) fractional derivative and Taylor diagnostics
# --------------------------------------------------------------------------- #


def _ratio_limit(ratios: np.ndarray) -> tuple[str, float]:
    """Classify a sequence of ratio estimates r_j (computed at h_j = 2**-j):
    'converged' with the tail mean, 'zero' when the sequence decays
    geometrically, or 'no-limit'."""
    r = np.asarray(ratios, dtype=float)
    tail = r[-3:]
    med = float(np.median(tail))
    spread = float(np.max(tail) - np.min(tail))
    if spread <= 0.2 * abs(med):
        return "converged", float(np.mean(tail))
    y = np.abs(r)
    floor_val = 1e-300
    y = np.maximum(y, floor_val)
    nonincreasing = bool(np.all(y[1:] <= y[:-1] * 1.05))
    total_drop = math.log2(y[0] / y[-1]) / (y.size - 1) if y.size > 1 else 0.0
    if nonincreasing and total_drop >= 0.1:
        return "zero", 0.0
    return "no-limit", math.nan


def local_frac_derivative(
    fn: Callable,
    alpha: float,
    at: float,
    side: int = 1,
    j_lo: int = 4,
    j_hi: int = 20,
) -> float:
    """Pointwise fractional derivative of non-integer order alpha:

        lim_{h -> 0+} Gamma(1 + alpha) * (f(at + side*h) - f(at)) / h**alpha

    evaluated on the dyadic ladder h = 2**-j. Returns the limit when the tail
    stabilizes, exactly 0.0 when the ratios decay geometrically (the function
    is too smooth at the point to see order alpha), and raises NoLimitError
    otherwise (for instance under log-periodic oscillation).

    For alpha > 1 the plain increment ratio is used without subtracting lower
    Taylor terms, so the limit exists only where the derivatives of integer
    order below alpha vanish at the point (e.g. |x|**alpha at 0); anywhere
    else the ratios diverge and NoLimitError reports that honestly.
    """
    if not alpha > 0.0 or alpha == math.floor(alpha):
        raise InvalidParameterError(
            f"alpha must be positive and non-integer, got {alpha}"
        )
    if side not in (1, -1):
        raise InvalidParameterError("side must be +1 or -1")
    hs = 2.0 ** -np.arange(j_lo, j_hi + 1, dtype=float)
    f0 = float(fn(np.asarray(at, dtype=float)))
    vals = np.array([float(fn(np.asarray(at + side * h, dtype=float))) for h in hs])
    ratios = math.gamma(1.0 + alpha) * (vals - f0) / hs**alpha
    status, value = _ratio_limit(ratios)
    if status == "no-limit":
        raise NoLimitError(
            f"ratio sequence at {at!r} neither stabilizes nor decays (order {alpha})"
        )
    return value


@dataclass(frozen=True)
class FracTaylorReport:
    """Outcome of the fractional Taylor diagnostic at a point."""

    coeff: float
    slope: float
    max_resid: float
    pure_power: bool
    fit_points: int = 0
    details: dict = field(default_factory=dict)


def frac_taylor_check(
    fn,
    order: FracOrder,
    a: float,
    j_lo: int = 4,
    j_hi: int = 20,
) -> FracTaylorReport:
    """Expand f at a to integer order m, extract the order-p coefficient, and
    measure how fast the remainder after removing it vanishes.

    Steps: (1) r_j = Gamma(p+1) * (f(a+h_j) - T_m(h_j)) / h_j**p on the dyadic
    ladder; the ratio-limit rules give the coefficient (exactly 0.0 for
    functions smoother than order p). (2) the residual after subtracting
    coeff * h**p / Gamma(p+1) is fit in log-log over the reliable window; its
    slope must exceed p for the expansion to be meaningful. A residual at
    rounding level reports pure_power=True with infinite slope.
    """
    sm = _as_smooth(fn)
    if len(sm.derivs) < order.m:
        raise InsufficientDerivativesError(
            f"order {order.p} needs {order.m} derivatives at the base point"
        )
    m, p = order.m, order.p
    hs = 2.0 ** -np.arange(j_lo, j_hi + 1, dtype=float)
    xs = a + hs
    fa = float(sm.fn(np.asarray(a, dtype=float)))
    taylor = np.full_like(hs, fa)
    fact = 1.0
    for k in range(1, m + 1):
        fact *= k
        dk = float(sm.deriv(k)(np.asarray(a, dtype=float)))
        taylor += dk * hs**k / fact
    fvals = np.array([float(sm.fn(np.asarray(x, dtype=float))) for x in xs])
    gp1 = math.gamma(p + 1.0)
    diffs = fvals - taylor
    # pointwise cancellation floor: f(a+h) - T_m(h) is a difference of
    # quantities of this magnitude, so below ~100 eps of it the ratios are
    # rounding noise and must not enter the limit classification
    cancel_scale = np.abs(fvals) + np.abs(taylor) + abs(fa)
    noise = 1e2 * np.finfo(float).eps * cancel_scale
    reliable = np.abs(diffs) > noise
    ratios = gp1 * diffs / hs**p
    status, coeff = _ratio_limit(ratios[reliable] if reliable.sum() >= 4 else ratios)
    if status == "no-limit":
        raise NoLimitError(f"no order-{p} coefficient at {a!r}")

    resid = diffs - coeff * hs**p / gp1
    scale = max(1.0, abs(fa), float(np.max(np.abs(fvals))))
    max_resid = float(np.max(np.abs(resid)) / scale)
    if max_resid <= 1e-12:
        return FracTaylorReport(
            coeff=coeff, slope=math.inf, max_resid=max_resid, pure_power=True
        )
    # fit |resid| ~ h^slope over points safely above rounding noise,
    # preferring the smallest usable h (nearest the base point)
    usable = reliable & (np.abs(resid) > noise)
    idx = np.nonzero(usable)[0]
    if idx.size < 3:
        return FracTaylorReport(
            coeff=coeff, slope=math.nan, max_resid=max_resid, pure_power=False
        )
    pick = idx[-min(8, idx.size):]
    lx = np.log2(hs[pick])
    ly = np.log2(np.abs(resid[pick]))
    slope = float(np.polyfit(lx, ly, 1)[0])
    return FracTaylorReport(
        coeff=coeff,
        slope=slope,
        max_resid=max_resid,
        pure_power=False,
        fit_points=int(pick.size),
    )
