import numpy as np
import pytest

from butterfly_atlas.curves import classify_symmetry, diagonal_segments, trace_curve
from butterfly_atlas.errors import InvalidInput
from butterfly_atlas.moebius import Rational
from butterfly_atlas.spectrum import band_edges, charpoly_eval
from oracles import charpoly_dense

R = Rational

PAIRS = [((1, 1), (1, 3)), ((1, 3), (1, 5)), ((1, 5), (1, 7)), ((1, 2), (1, 4)), ((1, 4), (1, 6)), ((1, 6), (1, 8))]


@pytest.fixture(scope="module")
def curves():
    return {(a, b): trace_curve(R(*a), R(*b)) for a, b in PAIRS + [((2, 3), (2, 7))]}


@pytest.mark.parametrize("a, b", PAIRS)
def test_component_counts(curves, a, b):
    q = a[1]
    want = 1 if q % 2 else q // 2
    assert curves[(a, b)].component_count == want


def test_extra_components_away_from_the_core(curves):
    # p > 1: raw count, two pieces beyond the central one
    assert curves[((2, 3), (2, 7))].component_count == 3


@pytest.mark.parametrize("a, b", PAIRS)
def test_symmetry_and_diagonals(curves, a, b):
    c = curves[(a, b)]
    assert classify_symmetry(c) == ("odd" if a[1] % 2 else "even4")
    assert diagonal_segments(c) == a[1]


def _slope_bound(theta):
    d = np.polyder(charpoly_dense(theta))
    return float(np.max(np.abs(np.polyval(d, np.linspace(-4, 4, 2001)))))


@pytest.mark.parametrize("a, b", PAIRS)
def test_residual_bound(curves, a, b):
    c = curves[(a, b)]
    h = 8.0 / c.N
    assert c.residual() < 8 * h * (_slope_bound(R(*a)) + _slope_bound(R(*b)))


def test_residual_second_order():
    coarse = trace_curve(R(1, 3), R(1, 5), N=256).residual()
    fine = trace_curve(R(1, 3), R(1, 5), N=512).residual()
    assert fine < coarse / 3


def test_cubic_curve_points():
    c = trace_curve(R(1, 1), R(1, 3), N=512)
    pts = c.segments.reshape(-1, 2)
    assert np.min(np.hypot(pts[:, 0], pts[:, 1])) < 1e-2
    # x = 6 y - y^3 along the traced curve
    assert np.max(np.abs(pts[:, 0] - (6 * pts[:, 1] - pts[:, 1] ** 3))) < 1e-2


def test_segments_stay_in_box(curves):
    for c in curves.values():
        assert np.all(np.abs(c.segments) <= 4.0)
        assert len(c.components) == len(c.segments)


def test_restricted_clips_to_spectrum():
    c = trace_curve(R(1, 3), R(1, 5), N=256, restricted=True)
    xs = c.segments[:, [0, 2]].ravel()
    assert np.all(np.abs(charpoly_eval(R(1, 3), xs)) <= 4 + 1e-6)
    full = trace_curve(R(1, 3), R(1, 5), N=256)
    assert len(c.segments) < len(full.segments)
    spec = band_edges(R(1, 3))
    assert all(spec.contains(float(x), tol=1e-9) for x in xs)


def test_parallel_matches_sequential():
    seq = trace_curve(R(1, 4), R(1, 6), N=256)
    par = trace_curve(R(1, 4), R(1, 6), N=256, workers=4)
    assert np.array_equal(seq.segments, par.segments)
    assert np.array_equal(seq.components, par.components)


def test_minus_sign_and_validation():
    c = trace_curve(R(1, 3), R(1, 3), sign=-1, N=128)
    # P(x) = P(y) contains the diagonal
    mids = 0.5 * (c.segments[:, :2] + c.segments[:, 2:])
    assert np.any(np.abs(mids[:, 0] - mids[:, 1]) < 1e-9)
    with pytest.raises(InvalidInput):
        trace_curve(R(1, 3), R(1, 5), N=32)
    with pytest.raises(InvalidInput):
        trace_curve(R(1, 3), R(1, 5), sign=0)
