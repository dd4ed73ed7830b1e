"""Named constructors for test functions, gauges and paths.

Every constructor returns plain bundle objects from the sibling modules; the
``make_*`` helpers map JSON-style config dicts onto them and are what the
command line uses. Derivatives of kinked powers follow the symmetric
convention at the kink itself: where the one-sided limits disagree or
diverge, the value 0 is returned (increments that sit exactly on a kink have
zero length in every construction used here, so the convention never leaks
into sums).
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import InvalidConfigError, InvalidParameterError
from .follmer import TensorFunctionBundle, TimeFunctionBundle
from .fracops import SmoothFn
from .isometry import PhiSpec
from .paths import (
    AnalyticPath,
    GaussianPathSpec,
    SampledPath,
    cantor_bump_knots,
    cantor_bump_path,
    cantor_distance_path,
    fbm_path,
    takagi_path,
)

__all__ = [
    "abs_power",
    "plus_power",
    "sin_affine",
    "exp_fn",
    "polynomial",
    "abs_power_series",
    "moving_abs_power",
    "product_bundle",
    "sum_of_squares_bundle",
    "FN_REGISTRY",
    "TIME_FN_REGISTRY",
    "make_fn",
    "make_time_fn",
    "make_phi",
    "make_path",
]


def _abs_pow(y: np.ndarray, e: float) -> np.ndarray:
    out = np.zeros_like(y)
    nz = y != 0.0
    out[nz] = np.abs(y[nz]) ** e
    return out


def _signed_pow(y: np.ndarray, e: float) -> np.ndarray:
    out = np.zeros_like(y)
    nz = y != 0.0
    out[nz] = np.sign(y[nz]) * np.abs(y[nz]) ** e
    return out


def abs_power(q: float, k: float = 0.0) -> SmoothFn:
    """f(x) = |x - k|^q with three derivatives and the kink declared."""
    if q <= 0.0:
        raise InvalidParameterError(f"q must be positive, got {q}")

    def f(x):
        return _abs_pow(np.asarray(x, dtype=float) - k, q)

    def d1(x):
        return q * _signed_pow(np.asarray(x, dtype=float) - k, q - 1.0)

    def d2(x):
        return q * (q - 1.0) * _abs_pow(np.asarray(x, dtype=float) - k, q - 2.0)

    def d3(x):
        return q * (q - 1.0) * (q - 2.0) * _signed_pow(np.asarray(x, dtype=float) - k, q - 3.0)

    return SmoothFn(fn=f, derivs=(d1, d2, d3), kinks=((k, q),), name=f"abs-power({q})")


def plus_power(q: float, k: float = 0.0) -> SmoothFn:
    """f(x) = (x - k)_+^q, zero left of the kink."""
    if q <= 0.0:
        raise InvalidParameterError(f"q must be positive, got {q}")

    def make(j: int) -> Callable:
        coeff = 1.0
        for i in range(j):
            coeff *= q - i

        def dj(x, coeff=coeff, e=q - j):
            y = np.asarray(x, dtype=float) - k
            out = np.zeros_like(y)
            pos = y > 0.0
            out[pos] = coeff * y[pos] ** e
            return out

        return dj

    return SmoothFn(fn=make(0), derivs=(make(1), make(2), make(3)), kinks=((k, q),), name=f"plus-power({q})")


def sin_affine(amp: float = 1.0, freq: float = 1.0, shift: float = 0.0) -> SmoothFn:
    def f(x):
        return amp * np.sin(freq * np.asarray(x, dtype=float) + shift)

    def d1(x):
        return amp * freq * np.cos(freq * np.asarray(x, dtype=float) + shift)

    def d2(x):
        return -amp * freq**2 * np.sin(freq * np.asarray(x, dtype=float) + shift)

    def d3(x):
        return -amp * freq**3 * np.cos(freq * np.asarray(x, dtype=float) + shift)

    return SmoothFn(fn=f, derivs=(d1, d2, d3), name="sin-affine")


def exp_fn(rate: float = 1.0) -> SmoothFn:
    def make(j: int) -> Callable:
        c = rate**j

        def dj(x, c=c):
            return c * np.exp(rate * np.asarray(x, dtype=float))

        return dj

    return SmoothFn(fn=make(0), derivs=(make(1), make(2), make(3)), name="exp")


def polynomial(coeffs) -> SmoothFn:
    """Polynomial with ascending coefficients (constant first)."""
    poly = np.polynomial.Polynomial(list(coeffs))
    ds = tuple(poly.deriv(j) for j in (1, 2, 3))

    def wrap(g):
        return lambda x: g(np.asarray(x, dtype=float))

    return SmoothFn(fn=wrap(poly), derivs=tuple(wrap(g) for g in ds), name="poly")


def _canonical_rationals(count: int) -> np.ndarray:
    """First ``count`` reduced fractions in (0, 1), denominators ascending,
    numerators ascending within each denominator."""
    out: list[float] = []
    den = 2
    while len(out) < count:
        for num in range(1, den):
            if math.gcd(num, den) == 1:
                out.append(num / den)
                if len(out) == count:
                    break
        den += 1
    return np.array(out)


def abs_power_series(q: float, count: int = 12) -> SmoothFn:
    """f(x) = sum_j (j+1)^-2 |x - r_j|^q over the first ``count`` canonical
    rationals r_j in (0, 1); a function kinked on a spreading set while still
    summable enough for order-q behaviour at each kink."""
    if q <= 0.0:
        raise InvalidParameterError(f"q must be positive, got {q}")
    if count < 1:
        raise InvalidParameterError("count must be >= 1")
    locs = _canonical_rationals(count)
    w = (np.arange(1, count + 1, dtype=float)) ** -2.0

    def spread(x):
        return np.asarray(x, dtype=float)[..., None] - locs

    def f(x):
        return np.sum(w * _abs_pow(spread(x), q), axis=-1)

    def d1(x):
        return q * np.sum(w * _signed_pow(spread(x), q - 1.0), axis=-1)

    def d2(x):
        return q * (q - 1.0) * np.sum(w * _abs_pow(spread(x), q - 2.0), axis=-1)

    def d3(x):
        return q * (q - 1.0) * (q - 2.0) * np.sum(w * _signed_pow(spread(x), q - 3.0), axis=-1)

    kinks = tuple((float(loc), q) for loc in locs)
    return SmoothFn(fn=f, derivs=(d1, d2, d3), kinks=kinks, name=f"abs-power-series({q},{count})")


# --------------------------------------------------------------------------- #
# time-dependent and multi-component bundles
# --------------------------------------------------------------------------- #


def moving_abs_power(q: float, speed: float = 1.0) -> TimeFunctionBundle:
    """f(t, x) = |x - speed * t|^q, a kink sliding through the value range."""
    if q <= 0.0:
        raise InvalidParameterError(f"q must be positive, got {q}")

    def y(t, x):
        return np.asarray(x, dtype=float) - speed * np.asarray(t, dtype=float)

    return TimeFunctionBundle(
        fn=lambda t, x: _abs_pow(y(t, x), q),
        dt=lambda t, x: -speed * q * _signed_pow(y(t, x), q - 1.0),
        dx=(
            lambda t, x: q * _signed_pow(y(t, x), q - 1.0),
            lambda t, x: q * (q - 1.0) * _abs_pow(y(t, x), q - 2.0),
        ),
        name=f"moving-abs-power({q})",
    )


def product_bundle() -> TensorFunctionBundle:
    """f(x, y) = x * y on R^2."""

    def f(v):
        v = np.asarray(v, dtype=float)
        return v[..., 0] * v[..., 1]

    def grad(v):
        v = np.asarray(v, dtype=float)
        return np.stack([v[..., 1], v[..., 0]], axis=-1)

    def hess(v):
        v = np.asarray(v, dtype=float)
        h = np.zeros(v.shape[:-1] + (2, 2))
        h[..., 0, 1] = 1.0
        h[..., 1, 0] = 1.0
        return h

    return TensorFunctionBundle(fn=f, grad=grad, hess=hess, name="product")


def sum_of_squares_bundle(d: int = 2) -> TensorFunctionBundle:
    def f(v):
        v = np.asarray(v, dtype=float)
        return np.sum(v * v, axis=-1)

    def grad(v):
        return 2.0 * np.asarray(v, dtype=float)

    def hess(v):
        v = np.asarray(v, dtype=float)
        eye = np.zeros(v.shape[:-1] + (d, d))
        idx = np.arange(d)
        eye[..., idx, idx] = 2.0
        return eye

    return TensorFunctionBundle(fn=f, grad=grad, hess=hess, name="sum-of-squares")


# --------------------------------------------------------------------------- #
# config-dict entry points
# --------------------------------------------------------------------------- #


FN_REGISTRY: dict[str, Callable[..., SmoothFn]] = {
    "abs-power": abs_power,
    "plus-power": plus_power,
    "sin": sin_affine,
    "exp": exp_fn,
    "polynomial": polynomial,
    "poly": polynomial,
    "abs-power-series": abs_power_series,
}

TIME_FN_REGISTRY: dict[str, Callable[..., TimeFunctionBundle]] = {
    "abs-power-moving": moving_abs_power,
}


def make_fn(cfg: dict) -> SmoothFn:
    if not isinstance(cfg, dict) or "name" not in cfg:
        raise InvalidConfigError("function config needs a 'name' key")
    cfg = dict(cfg)
    name = cfg.pop("name")
    ctor = FN_REGISTRY.get(name)
    if ctor is None:
        if name in TIME_FN_REGISTRY:
            raise InvalidConfigError(
                f"{name!r} is a time-dependent bundle; it only fits the"
                " time-aware checks, not a plain function slot"
            )
        raise InvalidConfigError(
            f"unknown function {name!r}; known: {', '.join(sorted(FN_REGISTRY))}"
        )
    try:
        return ctor(**cfg)
    except TypeError as exc:
        raise InvalidConfigError(f"bad arguments for function {name!r}: {exc}") from None


def make_time_fn(cfg: dict) -> TimeFunctionBundle:
    if not isinstance(cfg, dict) or "name" not in cfg:
        raise InvalidConfigError("function config needs a 'name' key")
    cfg = dict(cfg)
    name = cfg.pop("name")
    ctor = TIME_FN_REGISTRY.get(name)
    if ctor is None:
        raise InvalidConfigError(
            f"unknown time-dependent function {name!r}; known:"
            f" {', '.join(sorted(TIME_FN_REGISTRY))}"
        )
    try:
        return ctor(**cfg)
    except TypeError as exc:
        raise InvalidConfigError(f"bad arguments for function {name!r}: {exc}") from None


def make_phi(cfg: dict) -> PhiSpec:
    if not isinstance(cfg, dict):
        raise InvalidConfigError("gauge config must be an object")
    cfg = dict(cfg)
    kind = cfg.pop("kind", "power")
    try:
        return PhiSpec(kind=kind, **cfg)
    except TypeError as exc:
        raise InvalidConfigError(f"bad gauge config: {exc}") from None


def make_path(cfg: dict) -> AnalyticPath | SampledPath:
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise InvalidConfigError("path config needs a 'kind' key")
    cfg = dict(cfg)
    kind = cfg.pop("kind")
    try:
        if kind == "cantor-distance":
            return cantor_distance_path(**cfg)
        if kind == "cantor-bump":
            return cantor_bump_path(**cfg)
        if kind == "cantor-bump-knots":
            return cantor_bump_knots(**cfg)
        if kind == "takagi":
            return takagi_path(**cfg)
        if kind == "fbm":
            return fbm_path(GaussianPathSpec(**cfg))
    except TypeError as exc:
        raise InvalidConfigError(f"bad arguments for path {kind!r}: {exc}") from None
    raise InvalidConfigError(
        f"unknown path kind {kind!r}; known: cantor-distance, cantor-bump, "
        "cantor-bump-knots, takagi, fbm"
    )
