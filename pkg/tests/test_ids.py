import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from butterfly_atlas.ids import DEFAULT_EVALUATOR, IDSEvaluator, ids_F, trace_below
from butterfly_atlas.moebius import A, ProjMat, Rational, farey
from butterfly_atlas.similarity import Similarity, map_band_point, r_max
from butterfly_atlas.spectrum import band_edges, signed_charpoly
from oracles import ids_grid_count, trace_below_count, trace_below_grid

R = Rational


def test_F_examples():
    assert ids_F(-4.0) == 0.0
    assert ids_F(-7.0) == 0.0
    assert ids_F(4.0) == 1.0
    assert ids_F(0.0) == pytest.approx(0.5, abs=1e-8)
    v = ids_F(2.0)
    assert 0.5 < v < 1.0
    assert v == pytest.approx(ids_grid_count(2.0), abs=1e-3)


@pytest.mark.parametrize("x", [-3.5, -2.0, -0.7, 1.3, 3.9])
def test_F_matches_grid_count(x):
    assert ids_F(x) == pytest.approx(ids_grid_count(x), abs=1e-3)


@given(st.floats(-4, 4))
@settings(max_examples=100, deadline=None)
def test_F_antisymmetry(x):
    assert ids_F(x) + ids_F(-x) == pytest.approx(1.0, abs=1e-9)


def test_F_monotone():
    vals = [ids_F(x) for x in np.linspace(-4, 4, 201)]
    assert np.all(np.diff(vals) >= -1e-12)


@given(st.floats(0.0, 1.0))
@settings(max_examples=60, deadline=None)
def test_inverse_round_trip(u):
    assert ids_F(DEFAULT_EVALUATOR.inverse(u)) == pytest.approx(u, abs=1e-9)


def test_custom_tolerance_evaluator():
    coarse = IDSEvaluator(abs_tol=1e-6, table_size=65)
    assert coarse(1.0) == pytest.approx(ids_F(1.0), abs=1e-5)


def test_trace_examples():
    assert trace_below(R(1, 1), 0.0) == pytest.approx(0.5, abs=1e-8)
    assert trace_below(R(1, 2), 0.0) == pytest.approx(0.5, abs=1e-8)
    lo, hi = band_edges(R(1, 3)).gap(1)
    assert trace_below(R(1, 3), 0.5 * (lo + hi)) == 1 / 3
    assert trace_below(R(1, 3), -4.0) == 0.0
    assert trace_below(R(1, 3), 4.0) == 1.0


@pytest.mark.parametrize("theta", [t for t in farey(8) if t.q >= 1])
def test_trace_matches_eigenvalue_grid(theta):
    xs = np.linspace(-3.9, 3.9, 20)
    got = np.array([trace_below(theta, x) for x in xs])
    assert np.max(np.abs(got - trace_below_grid(theta, xs))) < 1e-3


def test_raw_count_is_coarser_but_close():
    xs = np.linspace(-3.9, 3.9, 20)
    got = np.array([trace_below(R(2, 7), x) for x in xs])
    assert np.max(np.abs(got - trace_below_count(R(2, 7), xs))) < 1e-2


@pytest.mark.parametrize("theta", [t for t in farey(10) if t.q >= 2])
def test_trace_constant_on_gaps_and_continuous(theta):
    spec = band_edges(theta)
    q = theta.q
    for k in range(1, q):
        lo, hi = spec.gap(k)
        if hi <= lo:
            continue
        for u in (0.0, 0.3, 1.0):
            x = lo + u * (hi - lo)
            if 0 < u < 1:
                assert trace_below(theta, x) == k / q
        assert trace_below(theta, lo - 1e-9) == pytest.approx(k / q, abs=1e-6)
        assert trace_below(theta, hi + 1e-9) == pytest.approx(k / q, abs=1e-6)


@given(st.sampled_from(farey(9)), st.floats(-4.2, 4.2), st.floats(0, 0.5))
@settings(max_examples=150, deadline=None)
def test_trace_monotone_in_unit_interval(theta, x, dx):
    a, b = trace_below(theta, x), trace_below(theta, x + dx)
    assert 0.0 <= a <= b + 1e-12 <= 1.0 + 1e-12


@pytest.mark.parametrize("m", [A, A @ A, ProjMat(1, 1, 2, 3)])
def test_similarity_trace_identity(m):
    # the in-band position k - 1 + F(level) shifts by exactly the band offset
    sim = Similarity(m, r_max(m, "+"), "+")
    rng = np.random.default_rng(5)
    for theta in farey(7):
        for k, (lo, hi) in enumerate(band_edges(theta).bands, 1):
            x = lo + rng.uniform() * (hi - lo)
            th2, (x2, k2) = map_band_point(sim, theta, x, k)
            left = k2 - 1 + ids_F(np.clip(signed_charpoly(th2, k2, x2), -4, 4))
            right = sim.offset(theta) + k - 1 + ids_F(np.clip(signed_charpoly(theta, k, x), -4, 4))
            assert left == pytest.approx(right, abs=1e-6)
