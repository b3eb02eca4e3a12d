"""Characteristic polynomials and band spectra of the rational almost Mathieu operator.

For ``theta = p/q`` the operator reduces to the ``q x q`` matrix

    H(k1, k2) = e^{i k1} U + e^{-i k1} U* + e^{i k2} V + e^{-i k2} V*

with ``U`` the cyclic shift and ``V = diag(exp(2 pi i p j / q))``.  We use the
normalisation ``P(x) = det(x - H(0, 0)) + 4`` so that ``P_{1/1}(x) = x`` and
``Spec = {x : |P(x)| <= 4}``.  ``det(x - H(k1, k2))`` differs from ``P`` only by
``-2 cos(q k1) - 2 cos(q k2)``, so the band edges are the eigenvalues of
``H(0, 0)`` (roots of ``P - 4``) and of ``H(pi/q, pi/q)`` (roots of ``P + 4``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Sequence, Tuple, Union

import mpmath
import numpy as np

from .errors import InvalidInput, NumericalFailure
from .moebius import Rational

__all__ = [
    "CharPoly",
    "BandSpectrum",
    "hamiltonian",
    "edge_matrix",
    "charpoly_eval",
    "signed_charpoly",
    "charpoly_coeffs",
    "band_edges",
    "chambers_residual",
    "bisect_increasing",
]

ArrayLike = Union[float, np.ndarray, Sequence[float]]

# Above this size the transfer-matrix recurrence runs in double-double arithmetic.
COMPENSATED_MIN_Q = 33
EDGE_TOL = 1e-12
SNAP_TOL = 1e-9


def _phase_steps(theta: Rational) -> np.ndarray:
    # p*j mod q folded onto [0, q/2]: identical inputs for p/q and (q-p)/q
    m = (theta.p * np.arange(theta.q)) % theta.q
    return np.minimum(m, theta.q - m)


def _diagonal(theta: Rational, phase: float = 0.0) -> np.ndarray:
    if phase == 0.0:
        return 2.0 * np.cos(2.0 * np.pi * _phase_steps(theta) / theta.q)
    j = np.arange(theta.q)
    return 2.0 * np.cos(2.0 * np.pi * ((theta.p * j) % theta.q) / theta.q + phase)


def hamiltonian(theta: Rational, k1: float = 0.0, k2: float = 0.0) -> np.ndarray:
    """Dense Hermitian matrix ``H(k1, k2)`` (complex, ``q x q``)."""
    q = theta.q
    h = np.diag(_diagonal(theta, k2)).astype(complex)
    hop = np.exp(1j * k1)
    for j in range(q):
        h[(j + 1) % q, j] += hop
        h[j, (j + 1) % q] += np.conj(hop)
    return h


def edge_matrix(theta: Rational, antiperiodic: bool = False) -> np.ndarray:
    """Real symmetric matrix whose eigenvalues are the roots of ``P - 4`` (or ``P + 4``).

    ``H(pi/q, pi/q)`` is gauge equivalent to a real matrix: the per-link
    phases collect into a single corner sign of -1 and the diagonal shifts
    by ``pi/q``.
    """
    q = theta.q
    phase = math.pi / q if antiperiodic else 0.0
    corner = -1.0 if antiperiodic else 1.0
    h = np.diag(_diagonal(theta, phase))
    for j in range(q):
        s = corner if j == q - 1 else 1.0
        h[(j + 1) % q, j] += s
        h[j, (j + 1) % q] += s
    return h


# -- evaluation ------------------------------------------------------------

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _two_prod(a, b):
    p = a * b
    t = _SPLITTER * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLITTER * b
    bh = t - (t - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _dd_step(sh, sl, uh, ul, vh, vl):
    """Return ``s*u - v`` for double-double operands."""
    ph, pl = _two_prod(sh, uh)
    pl = pl + (sh * ul + sl * uh)
    rh, rl = _two_sum(ph, -vh)
    rl = rl + (pl - vl)
    return _two_sum(rh, rl)


@lru_cache(maxsize=4096)
def _diagonal_floats(theta: Rational) -> Tuple[float, ...]:
    return tuple(float(a) for a in _diagonal(theta))


# Both recurrences accept a Python float or an ndarray for ``x``.
def _trace_plain(diag, x):
    u0, u1 = 1.0, 0.0
    v0, v1 = 0.0, 1.0
    for a in diag:
        s = x - a
        u0, u1 = s * u0 - u1, u0
        v0, v1 = s * v0 - v1, v0
    return u0 + v1


def _trace_compensated(diag, x):
    u0, u1 = (1.0, 0.0), (0.0, 0.0)
    v0, v1 = (0.0, 0.0), (1.0, 0.0)
    for a in diag:
        s = _two_sum(x, -a)
        u0, u1 = _dd_step(*s, *u0, *u1), u0
        v0, v1 = _dd_step(*s, *v0, *v1), v0
    hi, lo = _two_sum(u0[0], v1[0])
    return hi + (lo + u0[1] + v1[1])


def charpoly_eval(theta: Rational, x: ArrayLike) -> Union[float, np.ndarray]:
    """Evaluate ``P_theta(x)`` by the periodic transfer-matrix recurrence, O(q) per point.

    ``det(x - H(0, 0))`` equals ``tr(T(x)) - 2`` with ``T`` the product of the
    one-step transfer matrices ``[[x - a_j, -1], [1, 0]]``.
    """
    trace = _trace_compensated if theta.q >= COMPENSATED_MIN_Q else _trace_plain
    diag = _diagonal_floats(theta)
    if np.ndim(x) == 0:
        return float(trace(diag, float(x))) + 2.0
    xs = np.asarray(x, dtype=float)
    return np.asarray(trace(diag, xs), dtype=float) + 2.0


def signed_charpoly(theta: Rational, k: int, x: ArrayLike) -> Union[float, np.ndarray]:
    """``(-1)^(q+k) P_theta(x)``, increasing from -4 to 4 across band ``k``."""
    sign = -1.0 if (theta.q + k) % 2 else 1.0
    return sign * charpoly_eval(theta, x)


@dataclass(frozen=True)
class CharPoly:
    """Monic characteristic polynomial, coefficients highest degree first.

    Coefficients lie in ``Z[2 cos(2 pi / q)]``; they are exact Python ints
    when that ring element is rational (always for ``q`` in 1, 2, 3, 4, 6)
    and correctly rounded floats otherwise.
    """

    theta: Rational
    coeffs: Tuple[Union[int, float], ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    def __call__(self, x: float) -> float:
        acc = 0.0
        for c in self.coeffs:
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        terms = []
        for power, c in zip(range(self.degree, -1, -1), self.coeffs):
            if c == 0:
                continue
            mag = abs(c)
            body = "x" if power == 1 else (f"x^{power}" if power else "")
            coef = "" if mag == 1 and power else (str(mag) if isinstance(mag, int) else f"{mag:.12g}")
            sep = "*" if coef and body else ""
            terms.append(("-" if c < 0 else "+", f"{coef}{sep}{body}"))
        if not terms:
            return "0"
        text = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


ROUNDTRIP_TOL = 1e-9


@lru_cache(maxsize=512)
def charpoly_coeffs(theta: Rational) -> CharPoly:
    """Coefficients of ``P_theta`` by symbolic expansion of the transfer-matrix recurrence.

    The expansion runs in extended precision.  A coefficient within 1e-30
    of an integer is returned as that integer.  The expansion is checked
    against a direct evaluation of the recurrence at four points and raises
    ``NumericalFailure`` on mismatch.
    """
    q = theta.q
    with mpmath.workdps(40 + 2 * q):
        steps = _phase_steps(theta)
        diag = [2 * mpmath.cos(2 * mpmath.pi * int(m) / q) for m in steps]
        # polynomials as coefficient lists, lowest degree first
        u0, u1 = [mpmath.mpf(1)], [mpmath.mpf(0)]
        v0, v1 = [mpmath.mpf(0)], [mpmath.mpf(1)]

        def step(w0, w1, a):
            out = [mpmath.mpf(0)] * (len(w0) + 1)
            for i, c in enumerate(w0):
                out[i + 1] += c
                out[i] -= a * c
            for i, c in enumerate(w1):
                out[i] -= c
            return out

        for a in diag:
            u0, u1 = step(u0, u1, a), u0
            v0, v1 = step(v0, v1, a), v0
        poly = [mpmath.mpf(0)] * (q + 1)
        for i, c in enumerate(u0):
            poly[i] += c
        for i, c in enumerate(v1):
            poly[i] += c
        poly[0] += 2
        coeffs: List[Union[int, float]] = []
        for c in reversed(poly):
            r = int(mpmath.nint(c))
            coeffs.append(r if abs(c - r) < mpmath.mpf(10) ** -30 else float(c))
        # round trip against the recurrence itself, evaluated independently
        for x in (-3.7, -1.1, 0.3, 2.9):
            xm = mpmath.mpf(x)
            a0, a1, b0, b1 = mpmath.mpf(1), mpmath.mpf(0), mpmath.mpf(0), mpmath.mpf(1)
            for a in diag:
                a0, a1 = (xm - a) * a0 - a1, a0
                b0, b1 = (xm - a) * b0 - b1, b0
            want = a0 + b1 + 2
            got = mpmath.polyval(list(reversed(poly)), xm)
            if abs(got - want) > ROUNDTRIP_TOL * max(1, abs(want)):
                raise NumericalFailure(f"coefficients of P_{theta} do not round-trip at x={x}")
    out = CharPoly(theta, tuple(coeffs))
    if out.coeffs[0] != 1:
        raise NumericalFailure(f"P_{theta} expansion is not monic")
    return out


# -- bands -----------------------------------------------------------------


@dataclass(frozen=True)
class BandSpectrum:
    """The ``2q`` sorted band edges and the ``q`` closed bands of ``Spec(h_theta)``."""

    theta: Rational
    edges: Tuple[float, ...]

    @property
    def q(self) -> int:
        return self.theta.q

    @property
    def bands(self) -> Tuple[Tuple[float, float], ...]:
        e = self.edges
        return tuple((e[2 * k], e[2 * k + 1]) for k in range(self.q))

    def band(self, k: int) -> Tuple[float, float]:
        """Band ``I_k`` with 1-based ``k``."""
        if not 1 <= k <= self.q:
            raise InvalidInput(f"band index {k} outside 1..{self.q}")
        return self.edges[2 * k - 2], self.edges[2 * k - 1]

    def gap(self, k: int) -> Tuple[float, float]:
        """Closure of the gap between ``I_k`` and ``I_{k+1}``."""
        if not 1 <= k <= self.q - 1:
            raise InvalidInput(f"gap index {k} outside 1..{self.q - 1}")
        return self.edges[2 * k - 1], self.edges[2 * k]

    def touching_index(self) -> int:
        """Band ``k`` whose right edge touches ``I_{k+1}`` at 0, or 0 for odd ``q``."""
        return self.q // 2 if self.q % 2 == 0 else 0

    def contains(self, x: float, tol: float = SNAP_TOL) -> bool:
        return bool(self.locate(x, tol))

    def locate(self, x: float, tol: float = SNAP_TOL) -> List[int]:
        """Bands containing ``x`` (within ``tol``), after tie-breaking.

        Returns two indices only at the touching point 0 for even ``q``.  Near
        a narrow gap the band containing ``x`` exactly wins; failing that the
        nearer edge wins, ties going to the right band.
        """
        hits = [k for k, (lo, hi) in enumerate(self.bands, 1) if lo - tol <= x <= hi + tol]
        if len(hits) <= 1:
            return hits
        t = self.touching_index()
        if t and hits == [t, t + 1] and abs(x) <= tol:
            return hits
        inside = [k for k in hits if self.band(k)[0] <= x <= self.band(k)[1]]
        if len(inside) == 1:
            return inside

        def dist(k: int) -> float:
            lo, hi = self.band(k)
            return max(lo - x, x - hi, 0.0)

        best = min(dist(k) for k in hits)
        return [max(k for k in hits if dist(k) == best)]


def bisect_increasing(
    f: Callable[[np.ndarray], np.ndarray],
    lo: ArrayLike,
    hi: ArrayLike,
    tol: float = EDGE_TOL,
) -> np.ndarray:
    """Vectorised bisection for roots of functions with ``f(lo) <= 0 <= f(hi)``."""
    lo = np.array(lo, dtype=float, ndmin=1)
    hi = np.array(hi, dtype=float, ndmin=1)
    width = float(np.max(hi - lo)) if lo.size else 0.0
    steps = max(0, math.ceil(math.log2(width / tol))) + 1 if width > tol else 0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        neg = f(mid) <= 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    return 0.5 * (lo + hi)


def _roots_by_bisection(theta: Rational, level: float) -> np.ndarray:
    q = theta.q
    xs = np.linspace(-4.001, 4.001, 64 * q + 1)
    vals = charpoly_eval(theta, xs) - level
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    lo, hi = xs[idx], xs[idx + 1]
    rising = vals[idx] < 0

    def f(m: np.ndarray) -> np.ndarray:
        g = charpoly_eval(theta, m) - level
        return np.where(rising, g, -g)

    roots = list(bisect_increasing(f, lo, hi)) if idx.size else []
    if q % 2 == 0 and abs(charpoly_eval(theta, 0.0) - level) < SNAP_TOL:
        # double root at the touching point; rounding noise may fake sign changes there
        roots = [r for r in roots if abs(r) > 1e-6] + [0.0, 0.0]
    if len(roots) != q:
        raise NumericalFailure(
            f"found {len(roots)} of {q} roots of P{-level:+g} for theta={theta}"
        )
    return np.array(roots)


def _roots_by_eigensolve(theta: Rational, level: float) -> np.ndarray:
    return np.linalg.eigvalsh(edge_matrix(theta, antiperiodic=level < 0))


@lru_cache(maxsize=4096)
def band_edges(theta: Rational, method: str = "eig") -> BandSpectrum:
    """Band edges of ``Spec(h_theta)``: the roots of ``P - 4`` together with those of ``P + 4``.

    ``method="eig"`` (default) takes them as eigenvalues of the two real
    symmetric edge matrices, which stays reliable when gaps shrink below
    1e-12.  ``method="bisect"`` brackets sign changes on a ``64 q`` grid and
    bisects the polynomial; it raises ``NumericalFailure`` when a narrow gap
    hides a root pair from the grid.
    """
    if method == "eig":
        finder = _roots_by_eigensolve
    elif method == "bisect":
        finder = _roots_by_bisection
    else:
        raise InvalidInput(f"unknown band-edge method {method!r}")
    e = np.sort(np.concatenate([finder(theta, 4.0), finder(theta, -4.0)]))
    if e.size != 2 * theta.q:
        raise NumericalFailure(f"expected {2 * theta.q} band edges, got {e.size}")
    e = 0.5 * (e - e[::-1])  # exact reflection symmetry
    q = theta.q
    if q % 2 == 0:
        mid = e[q - 1 : q + 1]
        if np.all(np.abs(mid) < SNAP_TOL):
            e[q - 1 : q + 1] = 0.0
    return BandSpectrum(theta, tuple(float(v) for v in e))


def chambers_residual(theta: Rational, x: float, k1: float, k2: float) -> float:
    """``det(x - H(k1, k2)) + 2 cos(q k1) + 2 cos(q k2) - P_theta(x)``; identically zero."""
    q = theta.q
    det = np.linalg.det(x * np.eye(q) - hamiltonian(theta, k1, k2))
    return float(det.real + 2 * math.cos(q * k1) + 2 * math.cos(q * k2) - charpoly_eval(theta, x))
