"""Butterfly self-similarity maps ``S_{M,r,+-}`` and the generators H, V, S.

A similarity moves level ``theta = p/q`` to ``theta' = M.theta`` and sends
band ``I_k`` onto band ``I'_{k'}`` with

    k' = r p' + k          (sign "+")
    k' = r (q' - p') + k   (sign "-")

where ``(p', q') = M (p, q)``.  Inside the band the point ``x`` goes to the
unique ``x'`` with ``(-1)^(q+k) P_theta(x) = (-1)^(q'+k') P_theta'(x')``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from .errors import InvalidInput, NotInSemigroup
from .moebius import B, IDENTITY, ProjMat, Rational, in_semigroup, lft_apply_raw, reduce
from .spectrum import EDGE_TOL, SNAP_TOL, band_edges, signed_charpoly

__all__ = [
    "Similarity",
    "HorizontalFlip",
    "MappedPoint",
    "H",
    "V",
    "S",
    "r_max",
    "map_band_index",
    "map_band_point",
    "map_point",
    "inverse_map_point",
    "apply_pointwise",
    "compose",
    "generator",
]

SIGNS = ("+", "-")
BandPoint = Tuple[float, int]


def _ratio_at(num: Tuple[int, int], den: Tuple[int, int], theta: int) -> Optional[Fraction]:
    n = num[0] * theta + num[1]
    d = den[0] * theta + den[1]
    return None if d == 0 else Fraction(n, d)


def r_max(m: ProjMat, sign: str = "+") -> int:
    """Largest ``r`` keeping every image band index inside ``1..q'`` for all theta.

    The bound ``r <= (c theta + d - 1) / (a theta + b)`` (or with denominator
    ``(c - a) theta + d - b`` for "-") is a Moebius function of theta without
    a pole inside [0, 1], so its minimum sits at an endpoint.  A vanishing
    denominator there imposes no constraint.
    """
    if sign not in SIGNS:
        raise InvalidInput(f"sign must be '+' or '-', got {sign!r}")
    if not in_semigroup(m):
        raise NotInSemigroup(f"matrix {m} does not map [0, 1] into itself")
    a, b, c, d = m.oriented()
    num = (c, d - 1)
    den = (a, b) if sign == "+" else (c - a, d - b)
    values = [v for v in (_ratio_at(num, den, 0), _ratio_at(num, den, 1)) if v is not None]
    return math.floor(min(values))


@dataclass(frozen=True)
class Similarity:
    """Descriptor ``(M, r, sign)`` of a similarity map."""

    matrix: ProjMat
    r: int = 0
    sign: str = "+"

    def __post_init__(self) -> None:
        if self.sign not in SIGNS:
            raise InvalidInput(f"sign must be '+' or '-', got {self.sign!r}")
        if self.r < 0:
            raise InvalidInput("r must be non-negative")
        bound = r_max(self.matrix, self.sign)
        if self.r > bound:
            raise InvalidInput(f"r={self.r} exceeds r_max={bound} for {self.matrix} ({self.sign})")

    def theta_out(self, theta: Rational) -> Rational:
        return reduce(*lft_apply_raw(self.matrix, theta))

    def offset(self, theta: Rational) -> int:
        p_out, q_out = lft_apply_raw(self.matrix, theta)
        return self.r * p_out if self.sign == "+" else self.r * (q_out - p_out)

    def apply(self, theta: Rational, x: float, k: int) -> Tuple[Rational, BandPoint]:
        return map_band_point(self, theta, x, k)

    def __str__(self) -> str:
        return f"S[{self.matrix};r={self.r};{self.sign}]"


@dataclass(frozen=True)
class HorizontalFlip:
    """``(x, theta) -> (-x, theta)``; band ``k`` becomes band ``q + 1 - k``."""

    def apply(self, theta: Rational, x: float, k: int) -> Tuple[Rational, BandPoint]:
        return theta, (-x, theta.q + 1 - k)

    def __str__(self) -> str:
        return "H"


@dataclass(frozen=True)
class MappedPoint:
    """Image of one spectral point; two points only at a split of the touching point."""

    theta_out: Rational
    points: Tuple[float, ...]
    band_index_out: Tuple[int, ...]


H = HorizontalFlip()
V = Similarity(B, 0, "+")
S = Similarity(ProjMat(1, 0, 1, 1), 0, "+")
AnyMap = Union[Similarity, HorizontalFlip]


def generator(name: str) -> AnyMap:
    """One of the three generating maps ``H``, ``V`` or ``S``."""
    try:
        return {"H": H, "V": V, "S": S}[name]
    except KeyError:
        raise InvalidInput(f"unknown generator {name!r}") from None


def map_band_index(sim: Similarity, theta: Rational, k: int) -> int:
    """Index ``k'`` of the band receiving ``I_k``."""
    if not 1 <= k <= theta.q:
        raise InvalidInput(f"band index {k} outside 1..{theta.q}")
    _, q_out = lft_apply_raw(sim.matrix, theta)
    k_out = sim.offset(theta) + k
    if not 1 <= k_out <= q_out:
        raise InvalidInput(f"image band {k_out} outside 1..{q_out}")
    return k_out


def _solve_in_band(theta: Rational, k: int, level: float) -> float:
    lo, hi = band_edges(theta).band(k)
    if level >= 4.0:
        return hi
    if level <= -4.0:
        return lo
    f = lambda y: signed_charpoly(theta, k, y) - level  # noqa: E731
    f_lo, f_hi = f(lo), f(hi)
    if f_lo >= 0.0:
        return lo
    if f_hi <= 0.0:
        return hi
    return float(optimize.brentq(f, lo, hi, xtol=EDGE_TOL / 4, rtol=4 * np.finfo(float).eps))


def _band_level(theta: Rational, k: int, x: float) -> float:
    lo, hi = band_edges(theta).band(k)
    # band edges are fixed points of the correspondence's endpoint matching
    if abs(x - lo) <= EDGE_TOL:
        return -4.0
    if abs(x - hi) <= EDGE_TOL:
        return 4.0
    return float(np.clip(signed_charpoly(theta, k, x), -4.0, 4.0))


def map_band_point(sim: Similarity, theta: Rational, x: float, k: int) -> Tuple[Rational, BandPoint]:
    """Image of ``x`` regarded as a point of band ``I_k``; returns ``(theta', (x', k'))``."""
    k_out = map_band_index(sim, theta, k)
    theta_out = sim.theta_out(theta)
    x_out = _solve_in_band(theta_out, k_out, _band_level(theta, k, x))
    return theta_out, (x_out, k_out)


def map_point(sim: Similarity, theta: Rational, x: float) -> MappedPoint:
    """Image of a spectral point, double valued when the touching point 0 splits."""
    ks = band_edges(theta).locate(x, SNAP_TOL)
    if not ks:
        raise InvalidInput(f"x={x} is not in the spectrum at theta={theta}")
    theta_out = sim.theta_out(theta)
    images = [map_band_point(sim, theta, x, k)[1] for k in ks]
    if len(images) == 2:
        t = band_edges(theta_out).touching_index()
        if t and images[0][1] == t and images[1][1] == t + 1:
            images = images[:1]
    return MappedPoint(
        theta_out,
        tuple(p for p, _ in images),
        tuple(k for _, k in images),
    )


def inverse_map_point(sim: Similarity, theta_out: Rational, x_out: float, k_out: int) -> Tuple[Rational, BandPoint]:
    """Preimage of ``x'`` in band ``I'_{k'}`` at level ``theta'``."""
    a, b, c, d = sim.matrix.oriented()
    det = a * d - b * c
    p_out, q_out = theta_out.p, theta_out.q
    p, q = det * (d * p_out - b * q_out), det * (-c * p_out + a * q_out)
    theta = reduce(p, q)
    k = k_out - sim.offset(theta)
    if not 1 <= k <= theta.q:
        raise InvalidInput(f"band {k_out} at {theta_out} is not in the image of {sim}")
    return theta, (_solve_in_band(theta, k, _band_level(theta_out, k_out, x_out)), k)


def apply_pointwise(maps: Sequence[AnyMap], theta: Rational, x: float) -> Tuple[Rational, List[BandPoint]]:
    """Apply a composition ``maps[0] o maps[1] o ...`` (rightmost first) to a spectral point.

    Band memberships are carried through the chain, so the touching point
    is tracked as two band points from the start.
    """
    ks = band_edges(theta).locate(x, SNAP_TOL)
    if not ks:
        raise InvalidInput(f"x={x} is not in the spectrum at theta={theta}")
    pts: List[BandPoint] = [(x, k) for k in ks]
    for m in reversed(list(maps)):
        new_theta = theta
        out = []
        for xx, kk in pts:
            new_theta, bp = m.apply(theta, xx, kk)
            out.append(bp)
        theta, pts = new_theta, out
    return theta, pts


# -- composition -------------------------------------------------------------


def _a_power(m: ProjMat) -> Optional[int]:
    a, b, c, d = m.entries()
    if (a, b, d) == (1, 0, 1) and c >= 0:
        return c
    return None


def _flip_conj_power(m: ProjMat) -> Optional[int]:
    # B A^n B = [[1 - n, n], [-n, n + 1]]
    return _a_power(B @ m @ B)


def _kind(m: AnyMap) -> Optional[Tuple[str, int]]:
    if isinstance(m, HorizontalFlip):
        return ("H", 0)
    if m == V:
        return ("V", 0)
    if m.sign == "+" and _a_power(m.matrix) is not None:
        return ("A+", _a_power(m.matrix))
    if m.sign == "-" and _flip_conj_power(m.matrix) is not None:
        return ("BAB-", _flip_conj_power(m.matrix))
    return None


def _a_sim(n: int, r: int, sign: str) -> Similarity:
    mat = ProjMat(1, 0, n, 1)
    return Similarity(mat if sign == "+" else B @ mat @ B, r, sign)


def _reduce_once(seq: List[AnyMap]) -> bool:
    for i, m in enumerate(seq):
        if isinstance(m, Similarity) and m.matrix == IDENTITY:
            del seq[i]
            return True
    for i in range(len(seq) - 1):
        k1, k2 = _kind(seq[i]), _kind(seq[i + 1])
        if k1 and k2 and k1[0] == k2[0] and k1[0] in ("H", "V"):
            del seq[i : i + 2]
            return True
        if k1 and k2 and k1[0] == k2[0] and k1[0] in ("A+", "BAB-"):
            sign = "+" if k1[0] == "A+" else "-"
            seq[i : i + 2] = [_a_sim(k1[1] + k2[1], seq[i].r + seq[i + 1].r, sign)]
            return True
    for i in range(len(seq) - 2):
        outer, inner = _kind(seq[i]), _kind(seq[i + 1])
        if not (outer and inner and _kind(seq[i + 2]) == outer and inner[0] in ("A+", "BAB-")):
            continue
        n, r = inner[1], seq[i + 1].r
        if outer[0] == "V":
            seq[i : i + 3] = [_a_sim(n, r, "-" if inner[0] == "A+" else "+")]
            return True
        if outer[0] == "H":
            seq[i : i + 3] = [_a_sim(n, n - r, seq[i + 1].sign)]
            return True
    return False


def compose(*maps: AnyMap) -> AnyMap:
    """Descriptor of ``maps[0] o maps[1] o ...`` for the closed cases of the generator algebra.

    Supported rewrites: identities drop out, ``H H = V V = id``,
    ``S_{A^m,r,+} S_{A^n,s,+} = S_{A^(m+n),r+s,+}`` (and the conjugated "-"
    family), ``V S_{A^n,r,+} V = S_{BA^nB,r,-}`` and
    ``H S_{A^n,r,+} H = S_{A^n,n-r,+}``.  Anything else raises
    ``InvalidInput``; such composites can still be evaluated with
    :func:`apply_pointwise`.
    """
    seq = list(maps)
    while _reduce_once(seq):
        pass
    if not seq:
        return Similarity(IDENTITY, 0, "+")
    if len(seq) == 1:
        return seq[0]
    raise InvalidInput("composition pattern not covered by the generator algebra: " + " o ".join(map(str, seq)))
