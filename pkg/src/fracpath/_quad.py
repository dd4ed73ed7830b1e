"""Fixed-order Gauss-Legendre panels with doubling until relative stabilization.

All weakly singular integrals in this package are first transformed so the
integrand is bounded (power substitutions at the singular endpoint), then fed
to :func:`gl_adaptive`.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import QuadratureError

__all__ = ["gl_adaptive", "left_power_substitution", "right_power_substitution"]

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(32)


def gl_adaptive(
    g: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    rtol: float = 1e-9,
    max_doublings: int = 14,
) -> float:
    """Integrate ``g`` on [lo, hi] with 32-point panels, doubling the panel
    count until successive values agree to ``rtol`` (relative).

    ``g`` must accept ndarray input. Raises QuadratureError if the doubling
    cap is hit without stabilizing.
    """
    if hi == lo:
        return 0.0
    prev = None
    panels = 1
    for _ in range(max_doublings + 1):
        edges = np.linspace(lo, hi, panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1] - edges[0])
        pts = mid[:, None] + half * _NODES[None, :]
        val = half * float(np.sum(_WEIGHTS[None, :] * g(pts)))
        if prev is not None:
            if abs(val - prev) <= rtol * max(abs(val), 1e-300) + 1e-15 * rtol:
                return val
        prev = val
        panels *= 2
    raise QuadratureError(
        f"Gauss-Legendre panels did not stabilize to rtol={rtol:g} "
        f"after {panels // 2} panels on [{lo:g}, {hi:g}]"
    )


def right_power_substitution(
    f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, beta: float
) -> tuple[Callable[[np.ndarray], np.ndarray], float, float]:
    """Transform ``\\int_lo^hi f(t) dt`` where ``f ~ (hi - t)**(beta - 1)``
    near ``hi`` (0 < beta <= 1 integrable, beta may exceed 1 for mere kinks).

    Substitutes ``u = (hi - t)**beta`` so the image integrand is bounded.
    Returns (g, 0, (hi - lo)**beta) with ``\\int g du`` equal to the original.
    """
    inv = 1.0 / beta

    def g(u: np.ndarray) -> np.ndarray:
        u = np.maximum(u, 1e-300)
        t = hi - u**inv
        return f(t) * (inv * u ** (inv - 1.0))

    return g, 0.0, (hi - lo) ** beta


def left_power_substitution(
    f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, beta: float
) -> tuple[Callable[[np.ndarray], np.ndarray], float, float]:
    """Same as :func:`right_power_substitution` for ``f ~ (t - lo)**(beta-1)``
    near ``lo``: substitutes ``u = (t - lo)**beta``."""
    inv = 1.0 / beta

    def g(u: np.ndarray) -> np.ndarray:
        u = np.maximum(u, 1e-300)
        t = lo + u**inv
        return f(t) * (inv * u ** (inv - 1.0))

    return g, 0.0, (hi - lo) ** beta
