"""Plane curves ``P_theta(x) + sign * P_theta'(y) = 0`` by marching squares.

With the default ``sign = +1`` the curve is ``P_theta(x) = -P_theta'(y)``,
the relation behind the similarity ``theta -> theta'`` when ``q' - q`` is
even and the re-indexing shift is odd.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import InvalidInput
from .moebius import Rational
from .spectrum import band_edges, charpoly_eval

__all__ = ["ImplicitCurve", "trace_curve", "classify_symmetry", "diagonal_segments", "DEFAULT_GRID"]

DEFAULT_GRID = 1024
BOX = 4.0
CONNECT_WINDOW = 8.0

# corner bits: 1 = (i, j), 2 = (i+1, j), 4 = (i+1, j+1), 8 = (i, j+1)
# cell edges:  0 = bottom, 1 = right, 2 = top, 3 = left
_CASES = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)], 6: [(0, 2)], 7: [(3, 2)],
    8: [(2, 3)], 9: [(0, 2)], 11: [(1, 2)], 12: [(3, 1)], 13: [(0, 1)], 14: [(3, 0)],
}
# saddles, keyed by (case, centre inside)
_SADDLES = {
    (5, True): [(0, 1), (2, 3)], (5, False): [(3, 0), (1, 2)],
    (10, True): [(3, 0), (1, 2)], (10, False): [(0, 1), (2, 3)],
}


@dataclass(frozen=True)
class ImplicitCurve:
    """Traced zero set; ``segments`` rows are ``(x1, y1, x2, y2)`` in row-major cell order."""

    theta: Rational
    theta_prime: Rational
    sign: int
    N: int
    restricted: bool
    segments: np.ndarray
    components: np.ndarray

    @property
    def component_count(self) -> int:
        return int(self.components.max()) + 1 if len(self.components) else 0

    def residual(self) -> float:
        """Largest ``|f|`` over all segment endpoints."""
        if not len(self.segments):
            return 0.0
        pts = self.segments.reshape(-1, 2)
        return float(np.max(np.abs(_f(self.theta, self.theta_prime, self.sign, pts[:, 0], pts[:, 1]))))


def _f(theta: Rational, theta_prime: Rational, sign: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.asarray(charpoly_eval(theta, x)) + sign * np.asarray(charpoly_eval(theta_prime, y))


def _edge_point(g: np.ndarray, fa: np.ndarray, fb: np.ndarray, idx: np.ndarray) -> np.ndarray:
    t = fa / (fa - fb)
    return g[idx] + t * (g[idx + 1] - g[idx])


def _march_rows(
    fx: np.ndarray, fy: np.ndarray, g: np.ndarray, sign: int, rows: range,
    center: Tuple[np.ndarray, np.ndarray],
) -> np.ndarray:
    """Segments ``(x1, y1, x2, y2)`` for the cell rows in ``rows``, in row-major cell order."""
    j = np.arange(rows.start, rows.stop)
    F = fx[None, :] + sign * fy[j[0] : j[-1] + 2, None]
    ins = F > 0
    code = (ins[:-1, :-1] * 1 + ins[:-1, 1:] * 2 + ins[1:, 1:] * 4 + ins[1:, :-1] * 8).astype(np.int8)
    cx, cy = center
    cells_j, cells_i = np.nonzero((code != 0) & (code != 15))
    codes = code[cells_j, cells_i]
    cin = (cx[cells_i] + sign * cy[j[cells_j]]) > 0
    seg_edges: List[Tuple[int, int, int, int]] = []
    for lj, i, c, ci in zip(cells_j.tolist(), cells_i.tolist(), codes.tolist(), cin.tolist()):
        for e1, e2 in _SADDLES[(c, ci)] if c in (5, 10) else _CASES[c]:
            seg_edges.append((lj, i, e1, e2))
    if not seg_edges:
        return np.zeros((0, 4))
    arr = np.array(seg_edges, dtype=np.int64)
    lj, i = arr[:, 0], arr[:, 1]
    coords = np.empty((len(arr), 4))
    for col, ecol in ((0, 2), (1, 3)):
        e = arr[:, ecol]
        jj = j[lj] + (e == 2)
        ii = i + (e == 1)
        horiz = (e == 0) | (e == 2)
        # every shared edge is interpolated from the same two values, so vertices coincide exactly
        xh = _edge_point(g, F[lj + (e == 2), i], F[lj + (e == 2), i + 1], i)
        yv = _edge_point(g, F[lj, ii], F[lj + 1, ii], j[lj])
        coords[:, 2 * col] = np.where(horiz, xh, g[ii])
        coords[:, 2 * col + 1] = np.where(horiz, g[jj], yv)
    return coords


def _band_clip(segs: np.ndarray, bands: Tuple[Tuple[float, float], ...]) -> Tuple[np.ndarray, np.ndarray]:
    """Cut segments to the union of x-intervals; returns pieces and the source segment index."""
    x1, y1, x2, y2 = segs.T
    lo_x, hi_x = np.minimum(x1, x2), np.maximum(x1, x2)
    pieces, src = [], []
    for lo, hi in bands:
        a = np.maximum(lo_x, lo)
        b = np.minimum(hi_x, hi)
        keep = np.nonzero(b > a)[0]
        dx = (x2 - x1)[keep]
        vert = dx == 0
        safe = np.where(vert, 1.0, dx)

        def y_at(xv):
            return np.where(vert, y1[keep], y1[keep] + (xv - x1[keep]) * (y2 - y1)[keep] / safe)

        ya, yb = y_at(a[keep]), y_at(b[keep])
        pieces.append(np.stack([a[keep], ya, b[keep], yb], axis=1))
        src.append(keep)
        # vertical segments inside the band
        vkeep = np.nonzero((lo_x == hi_x) & (lo_x >= lo) & (lo_x <= hi))[0]
        if len(vkeep):
            pieces.append(segs[vkeep])
            src.append(vkeep)
    if not pieces:
        return np.zeros((0, 4)), np.zeros(0, dtype=np.int64)
    out, idx = np.concatenate(pieces), np.concatenate(src)
    order = np.argsort(idx, kind="stable")
    return out[order], idx[order]


def _components(segs: np.ndarray) -> np.ndarray:
    """Connected components of segments sharing an endpoint (merged at 1e-9 grid units)."""
    if not len(segs):
        return np.zeros(0, dtype=np.int64)
    pts = segs.reshape(-1, 2)
    keys = np.round(pts * 1e9).astype(np.int64)
    _, inv = np.unique(keys, axis=0, return_inverse=True)
    inv = inv.reshape(-1, 2)
    m = int(inv.max()) + 1
    graph = coo_matrix((np.ones(len(inv)), (inv[:, 0], inv[:, 1])), shape=(m, m))
    _, labels = connected_components(graph, directed=False)
    seg_lab = labels[inv[:, 0]]
    # relabel in order of first appearance for determinism
    _, first = np.unique(seg_lab, return_index=True)
    remap = np.empty(labels.max() + 1, dtype=np.int64)
    remap[seg_lab[np.sort(first)]] = np.arange(len(first))
    return remap[seg_lab]


def trace_curve(
    theta: Rational,
    theta_prime: Rational,
    sign: int = 1,
    N: int = DEFAULT_GRID,
    restricted: bool = False,
    workers: Optional[int] = None,
) -> ImplicitCurve:
    """Marching-squares trace of ``P_theta(x) + sign * P_theta'(y) = 0`` on ``[-4, 4]^2``.

    Saddle cells are resolved by the value of ``f`` at the cell centre.
    With ``restricted`` the curve is clipped to ``|P_theta(x)| <= 4``.
    ``workers`` splits the cell rows over threads; the output is identical.
    """
    if N < 64:
        raise InvalidInput("grid resolution N must be at least 64")
    if sign not in (1, -1):
        raise InvalidInput("sign must be +1 or -1")
    # Connectivity is measured on a wider window with the same cell size, so arcs
    # that leave [-4, 4]^2 and come back stay one component.
    m = int(CONNECT_WINDOW / BOX)
    cells = m * N
    g = np.linspace(-CONNECT_WINDOW, CONNECT_WINDOW, cells + 1)
    mid = 0.5 * (g[:-1] + g[1:])
    fx = np.asarray(charpoly_eval(theta, g))
    fy = np.asarray(charpoly_eval(theta_prime, g))
    center = (np.asarray(charpoly_eval(theta, mid)), np.asarray(charpoly_eval(theta_prime, mid)))
    if workers and workers > 1:
        bounds = np.linspace(0, cells, workers + 1).astype(int)
        chunks = [range(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda r: _march_rows(fx, fy, g, sign, r, center), chunks))
    else:
        parts = [_march_rows(fx, fy, g, sign, range(0, cells), center)]
    segs = np.concatenate(parts)
    if restricted:
        segs, _ = _band_clip(segs, band_edges(theta).bands)
    comps = _components(segs)
    in_box = np.all(np.abs(segs) <= BOX, axis=1)
    segs = segs[in_box]
    _, comps = np.unique(comps[in_box], return_inverse=True)
    comps = comps.reshape(-1)
    return ImplicitCurve(theta, theta_prime, sign, N, restricted, segs, comps)


def classify_symmetry(curve: ImplicitCurve) -> str:
    """``"even4"`` if invariant under both axis flips, ``"odd"`` under ``(x, y) -> (-x, -y)``.

    Falls back to ``"mirror_x"``, ``"mirror_y"`` or ``"none"``.  A reflected
    sample point matches when it lies within two cell diagonals of the curve.
    """
    segs = curve.segments
    if not len(segs):
        return "none"
    pts = np.concatenate([segs[:, :2], segs[:, 2:], 0.5 * (segs[:, :2] + segs[:, 2:])])
    tree = cKDTree(pts)
    tol = 2.0 * np.sqrt(2.0) * (2.0 * BOX / curve.N)

    def invariant(sx: float, sy: float) -> bool:
        dist, _ = tree.query(pts * np.array([sx, sy]))
        return bool(np.max(dist) < tol)

    mx, my, odd = invariant(-1, 1), invariant(1, -1), invariant(-1, -1)
    if mx and my:
        return "even4"
    if odd:
        return "odd"
    if mx:
        return "mirror_x"
    if my:
        return "mirror_y"
    return "none"


def diagonal_segments(curve: ImplicitCurve, offset: Optional[int] = None) -> int:
    """Number of maximal runs of the curve inside the rectangles ``I_k x I'_{k+offset}``.

    ``offset`` defaults to ``(q' - q) / 2``, the band shift of the similarity
    carrying ``theta`` to ``theta'`` along the curve.
    """
    q, q2 = curve.theta.q, curve.theta_prime.q
    if offset is None:
        offset = (q2 - q) // 2
    spec, spec2 = band_edges(curve.theta), band_edges(curve.theta_prime)
    segs = curve.segments
    if not curve.restricted:
        segs, _ = _band_clip(segs, spec.bands)
    total = 0
    mx = 0.5 * (segs[:, 0] + segs[:, 2])
    my = 0.5 * (segs[:, 1] + segs[:, 3])
    for k in range(1, q + 1):
        k2 = k + offset
        if not 1 <= k2 <= q2:
            continue
        (xlo, xhi), (ylo, yhi) = spec.band(k), spec2.band(k2)
        pad = 2.0 * BOX / curve.N
        inside = (mx >= xlo) & (mx <= xhi) & (my >= ylo - pad) & (my <= yhi + pad)
        sub = segs[inside]
        if len(sub):
            total += int(_components(sub).max()) + 1
    return total
