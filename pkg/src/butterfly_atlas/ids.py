"""Integrated density of states of the free operator and spectral-projection traces."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy import integrate, optimize

from .moebius import Rational
from .spectrum import SNAP_TOL, band_edges, signed_charpoly

__all__ = ["IDSEvaluator", "ids_F", "trace_below", "DEFAULT_EVALUATOR"]


def _integrand(t: float, x: float) -> float:
    y = min(max((x - 2.0 * math.cos(t)) / 2.0, -1.0), 1.0)
    return math.pi - math.acos(y)


@dataclass(frozen=True)
class IDSEvaluator:
    """``F(x)``: normalized area of ``{(s, t) in [0, pi]^2 : 2 cos s + 2 cos t < x}``.

    For fixed ``t`` the admissible ``s`` form an interval of length
    ``pi - arccos((x - 2 cos t) / 2)``, so ``F`` is a one-dimensional
    integral whose integrand has square-root kinks where the clamp engages.
    """

    abs_tol: float = 1e-10
    table_size: int = 513
    _table: Tuple[np.ndarray, np.ndarray] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        xs = np.linspace(-4.0, 4.0, self.table_size)
        ys = np.array([self(x) for x in xs])
        object.__setattr__(self, "_table", (xs, ys))

    def __call__(self, x: float) -> float:
        x = float(x)
        if x <= -4.0:
            return 0.0
        if x >= 4.0:
            return 1.0
        kinks = sorted(
            math.acos(c) for c in ((x - 2.0) / 2.0, (x + 2.0) / 2.0) if -1.0 < c < 1.0
        )
        pts = [0.0, *kinks, math.pi]
        total = 0.0
        for lo, hi in zip(pts[:-1], pts[1:]):
            val, _ = integrate.quad(_integrand, lo, hi, args=(x,), epsabs=self.abs_tol, epsrel=0.0, limit=200)
            total += val
        return min(max(total / math.pi**2, 0.0), 1.0)

    def inverse(self, u: float) -> float:
        """The ``x`` in [-4, 4] with ``F(x) = u``."""
        u = float(u)
        if u <= 0.0:
            return -4.0
        if u >= 1.0:
            return 4.0
        xs, ys = self._table
        i = int(np.searchsorted(ys, u))
        lo, hi = xs[max(i - 1, 0)], xs[min(i, len(xs) - 1)]
        if lo == hi:
            return float(lo)
        return float(optimize.brentq(lambda x: self(x) - u, lo, hi, xtol=1e-13, rtol=1e-15))


DEFAULT_EVALUATOR = IDSEvaluator()


def ids_F(x: float) -> float:
    """Integrated density of states of ``2 cos s + 2 cos t``; clamped to [0, 1] outside [-4, 4]."""
    return DEFAULT_EVALUATOR(x)


def trace_below(theta: Rational, x: float, evaluator: IDSEvaluator = DEFAULT_EVALUATOR) -> float:
    """Trace of the spectral projection onto ``(-inf, x)`` at rational flux ``theta``.

    Equals ``k/q`` in the gap after band ``k`` and
    ``(k - 1)/q + F((-1)^(q+k) P_theta(x)) / q`` inside band ``I_k``.
    """
    spec = band_edges(theta)
    q = theta.q
    edges = spec.edges
    x = float(x)
    if x <= edges[0]:
        return 0.0
    if x >= edges[-1]:
        return 1.0
    for k in range(1, q + 1):
        lo, hi = spec.band(k)
        if x < lo:
            return (k - 1) / q
        if x <= hi:
            if abs(x - hi) <= SNAP_TOL * 1e-3:
                return k / q
            v = float(np.clip(signed_charpoly(theta, k, x), -4.0, 4.0))
            return (k - 1 + evaluator(v)) / q
    return 1.0
