"""Independent reference computations used only by the tests.

Nothing here calls the library's evaluators, edge matrices or solvers.
Each oracle goes through dense linear algebra, brute-force enumeration,
exact rational arithmetic or 60-digit arithmetic instead.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from butterfly_atlas.moebius import Rational
from butterfly_atlas.spectrum import hamiltonian


def farey_bruteforce(qmax):
    fr = {Fraction(p, q) for q in range(1, qmax + 1) for p in range(0, q + 1)}
    return [Rational(f.numerator, f.denominator) for f in sorted(fr)]


def charpoly_dense(theta):
    """``det(x - H(0, 0)) + 4`` from the eigenvalues of the dense matrix, highest degree first."""
    c = np.real(np.poly(np.linalg.eigvalsh(hamiltonian(theta, 0.0, 0.0))))
    c[-1] += 4.0
    return c


def charpoly_mp(theta, x, dps=60):
    """``P_theta(x)`` with 60-digit arithmetic, diagonal entries included."""
    import mpmath

    with mpmath.workdps(dps):
        xm = mpmath.mpf(x)
        a0, a1, b0, b1 = mpmath.mpf(1), mpmath.mpf(0), mpmath.mpf(0), mpmath.mpf(1)
        for j in range(theta.q):
            a = 2 * mpmath.cos(2 * mpmath.pi * ((theta.p * j) % theta.q) / theta.q)
            a0, a1 = (xm - a) * a0 - a1, a0
            b0, b1 = (xm - a) * b0 - b1, b0
        return a0 + b1 + 2


def spectrum_samples(theta, n=24):
    """Eigenvalues of ``H(k1, k2)`` over an ``n x n`` grid of the Brillouin zone."""
    q = theta.q
    ks = np.arange(n) * 2 * np.pi / q / n
    return np.concatenate([np.linalg.eigvalsh(hamiltonian(theta, a, b)) for a in ks for b in ks])


def _triangle_fraction(a, b, c, x):
    """Fraction of a triangle on which the linear interpolant of vertex values lies below ``x``."""
    a, b, c = np.sort(np.stack([a, b, c]), axis=0)
    out = np.where(x >= c, 1.0, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        low = (x - a) ** 2 / ((b - a) * (c - a))
        high = 1.0 - (c - x) ** 2 / ((c - a) * (c - b))
    out = np.where((x > a) & (x <= b), low, out)
    out = np.where((x > b) & (x < c), high, out)
    return np.nan_to_num(out, nan=1.0)


def grid_eigen_table(theta, n=64):
    """Sorted eigenvalues of ``H(k1, k2)`` on an ``n x n`` grid over ``[0, 2 pi / q)^2``."""
    q = theta.q
    ks = np.arange(n) * 2 * np.pi / q / n
    mats = np.array([[hamiltonian(theta, a, b) for b in ks] for a in ks])
    return np.linalg.eigvalsh(mats)


def trace_below_grid(theta, xs, n=64):
    """Spectral-projection trace from a 64 x 64 grid of eigensolves.

    Each sorted eigenvalue sheet is interpolated linearly on the two
    triangles of every grid cell and the measure below ``x`` is integrated
    exactly on each triangle.  A bare count of grid eigenvalues below
    ``x`` carries a lattice error of several 1e-3 at this resolution.
    """
    E = grid_eigen_table(theta, n)
    e10 = np.roll(E, -1, axis=0)
    e01 = np.roll(E, -1, axis=1)
    e11 = np.roll(e10, -1, axis=1)
    out = []
    for x in np.atleast_1d(xs):
        frac = _triangle_fraction(E, e10, e11, x) + _triangle_fraction(E, e01, e11, x)
        out.append(frac.sum() / (2 * E.size))
    return np.array(out)


def trace_below_count(theta, xs, n=64):
    """Plain count of grid eigenvalues below ``x`` (coarser than :func:`trace_below_grid`)."""
    E = grid_eigen_table(theta, n).ravel()
    return np.array([np.mean(E < x) for x in np.atleast_1d(xs)])


def ids_grid_count(x, n=2000):
    """Fraction of an ``n x n`` midpoint grid on ``[0, pi]^2`` with ``2 cos s + 2 cos t < x``."""
    g = (np.arange(n) + 0.5) * np.pi / n
    c = 2 * np.cos(g)
    return float(np.mean((c[:, None] + c[None, :]) < x))


def gap_labels_enumerated(theta, k):
    """All ``(s, t)`` with ``k = t p - s q`` and ``|t| <= q`` obeying the sign-dependent ranges."""
    p, q = theta.p, theta.q
    out = []
    for t in range(-q, q + 1):
        if t == 0:
            continue
        num = t * p - k
        if num % q:
            continue
        s = num // q
        if (t > 0 and 0 <= s <= t - 1) or (t < 0 and t <= s <= -1):
            out.append((s, t))
    return out


def canonical_enumerated(theta, k):
    """Minimal ``|t|``, ties toward positive ``t``."""
    return min(gap_labels_enumerated(theta, k), key=lambda st: (abs(st[1]), -st[1]))


def semigroup_by_sampling(a, b, c, d, samples=64):
    """Membership of ``theta -> (a theta + b)/(c theta + d)`` by exact sampling of [0, 1]."""
    vals = []
    for i in range(samples + 1):
        th = Fraction(i, samples)
        den = c * th + d
        if den == 0:
            return False
        vals.append((a * th + b) / den)
    dens = [c * Fraction(i, samples) + d for i in range(samples + 1)]
    if any(x > 0 for x in dens) and any(x < 0 for x in dens):
        return False
    return all(0 <= v <= 1 for v in vals)
