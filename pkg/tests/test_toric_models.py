import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from barcode_entropy import growth as gr
from barcode_entropy import toric
from barcode_entropy.persistence import INF

from oracles import ellipsoid_count_brute, lattice_classes_brute, rational_tori_interval

SQUARE = toric.LatticeBasis((1, 0), (0, 1))


# -- rational tori ---------------------------------------------------------


@pytest.mark.parametrize("k", [1, 2, 3, 7, 20])
def test_quadratic_interval_counts(k):
    r = toric.rational_tori_count(toric.power_profile(2.0), k)
    open_, closed = rational_tori_interval(Fraction(0), Fraction(2), k)
    assert closed == 2 * k + 1
    assert r.by_dim(0) == 2
    assert r.by_dim(1) == open_ == 2 * k - 1
    # the closed slope range splits into the open edge and the two vertices
    assert r.total == closed


def test_no_integer_slope_available():
    r = toric.rational_tori_count(toric.power_profile(2.0, c=0.25), 1)
    assert r.by_dim(1) == 0


def test_fixed_point_bound_quadratic():
    # vertices count once each and every open-edge torus splits into two points
    assert toric.fixed_point_bound(toric.power_profile(2.0), 3) == 2 + 2 * 5
    for k in range(1, 10):
        assert toric.fixed_point_bound(toric.power_profile(2.0), k) == 4 * k


def test_k_must_be_positive():
    with pytest.raises(ValueError):
        toric.fixed_point_bound(toric.power_profile(2.0), 0)
    with pytest.raises(ValueError):
        toric.rational_tori_count(toric.power_profile(2.0), 0)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_triangle_profile_counts(k):
    # h = |x|^2 / 2 on the standard triangle: ∇h = x, so rational tori are the points (1/k)Z^2
    r = toric.rational_tori_count(toric.quadratic_profile(np.eye(2)), k)
    inside = sum(1 for p in range(1, k) for q in range(1, k) if p + q < k)
    assert r.by_dim(2) == inside == (k - 1) * (k - 2) // 2
    assert r.by_dim(1) == (k - 1) + (k - 1) + (2 * k - 1)
    assert r.by_dim(0) == 3


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 3.0), st.integers(1, 12))
def test_interval_counts_match_fraction_oracle(c, k):
    c = round(c, 2)
    r = toric.rational_tori_count(toric.power_profile(2.0, c=c), k)
    open_, _ = rational_tori_interval(Fraction(0), Fraction(2 * c).limit_denominator(1000), k)
    assert r.by_dim(1) == open_


def test_nonconvex_profile_rejected():
    with pytest.raises(ValueError):
        toric.rational_tori_count(toric.poly_profile([0, 0, -1]), 2)
    with pytest.raises(ValueError):
        toric.table_profile([1.0, 0.5])


@pytest.mark.parametrize("spec", [
    {"kind": "power", "p": 3},
    {"kind": "poly", "coeffs": [0, 0, 1]},
    {"kind": "table", "slopes": [0, 1, 3]},
    {"kind": "quadratic", "Q": [[1, 0], [0, 2]], "domain": [[0, 0], [1, 0], [0, 1]]},
])
def test_profile_from_spec(spec):
    assert toric.rational_tori_count(toric.profile_from_spec(spec), 2).total >= 2


# -- Reeb orbits -------------------------------------------------------------


def test_reeb_level_quadratic():
    prof = toric.semi_admissible_power(2.0, 1.0, r_max=3.0)
    r, a = toric.reeb_orbit_level(prof, 1.0)
    assert r == pytest.approx(1.5, abs=1e-10)
    assert a == pytest.approx(1.25, abs=1e-9)


def test_reeb_level_small_period():
    prof = toric.semi_admissible_power(2.0, 1.0, r_max=3.0)
    r, a = toric.reeb_orbit_level(prof, 1e-6)
    assert r == pytest.approx(1.0, abs=1e-6)
    assert a == pytest.approx(0.0, abs=1e-6)


def test_reeb_action_increasing():
    prof = toric.semi_admissible_power(2.0, 1.0, r_max=3.0)
    prof.check()
    acts = [toric.reeb_orbit_level(prof, T)[1] for T in np.linspace(0.05, 3.9, 40)]
    assert np.all(np.diff(acts) > 0)


def test_reeb_level_out_of_range():
    prof = toric.semi_admissible_power(2.0, 1.0, r_max=3.0)
    with pytest.raises(ValueError):
        toric.reeb_orbit_level(prof, 4.0)
    with pytest.raises(ValueError):
        toric.reeb_orbit_level(prof, 0.0)


# -- ellipsoids ----------------------------------------------------------------


def test_ellipsoid_count_example():
    e = toric.EllipsoidSpec([1.0, math.sqrt(2)])
    acts, n = toric.ellipsoid_spectrum(e, 10)
    assert n == 17 == len(acts) == ellipsoid_count_brute(e.a, 10)
    assert toric.ellipsoid_spectrum(e, 0.5) == ([], 0)
    assert e.rationally_independent


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.3, 5), min_size=1, max_size=3), st.floats(0, 60))
def test_ellipsoid_count_matches_brute(a, s):
    e = toric.EllipsoidSpec(a)
    assert toric.ellipsoid_spectrum(e, s)[1] == ellipsoid_count_brute(e.a, s)


def test_ellipsoid_slope():
    e = toric.EllipsoidSpec([1.0, math.sqrt(2)])
    s = np.linspace(100, 1000, 400)
    assert toric.linear_slope(toric.ellipsoid_count_series(e, s)) == pytest.approx(1 + 1 / math.sqrt(2), rel=0.01)
    bound = toric.ellipsoid_generator_bound(e, s)
    assert bound.counts == tuple(2 * c for c in toric.ellipsoid_count_series(e, s).counts)


def test_ellipsoid_validation():
    with pytest.raises(ValueError):
        toric.EllipsoidSpec([1.0, -1.0])
    assert not toric.EllipsoidSpec([1.0, 2.0]).rationally_independent


# -- flat torus ---------------------------------------------------------------


def test_square_lattice_barcode():
    b = toric.flat_torus_loop_barcode(SQUARE, 1.5)
    nontrivial = [bar for bar in b.bars if bar.start > 0]
    assert sum(bar.multiplicity for bar in nontrivial) == 8
    assert all(bar.start == 1.0 and bar.end == INF for bar in nontrivial)
    trivial = sum(bar.multiplicity for bar in b.bars if bar.start == 0)
    assert trivial == 4
    only = toric.flat_torus_loop_barcode(SQUARE, 0.5)
    assert all(bar.start == 0 for bar in only.bars) and len(only) == 4


@pytest.mark.parametrize("v1,v2", [((1, 0), (0, 1)), ((1, 0), (0.3, 1.1)), ((2, 0.5), (-0.4, 1.3))])
def test_lattice_classes_match_brute(v1, v2):
    b = toric.LatticeBasis(v1, v2)
    for s in (0.5, 3.0, 17.3):
        got = sorted((m, n) for m, n, _ in toric.lattice_energies(b, s))
        want = sorted((m, n) for m, n, _ in lattice_classes_brute(v1, v2, s))
        assert got == want


def test_flat_torus_growth_degree_one():
    s = np.linspace(10, 2000, 100)
    series = toric.flat_torus_count_series(SQUARE, s)
    assert gr.poly_degree_fit(series).degree == pytest.approx(1.0, abs=0.03)
    # Gauss count: lattice points in the disk of radius sqrt(s) ~ π s / covolume
    assert toric.lattice_count(SQUARE, 2000) == pytest.approx(math.pi * 2000, rel=0.02)


def test_series_counts_agree_with_barcode():
    b = toric.LatticeBasis((1, 0), (0.3, 1.1))
    s = [0.5, 2.0, 5.0, 9.0]
    series = toric.flat_torus_count_series(b, s)
    assert list(series.counts) == [len(toric.flat_torus_loop_barcode(b, x)) for x in s]


def test_lattice_validation():
    with pytest.raises(ValueError):
        toric.LatticeBasis((1, 2), (2, 4))


def test_toric_bound_check():
    e = toric.EllipsoidSpec([1.0, math.sqrt(2)])
    s = np.linspace(10, 1000, 100)
    assert toric.toric_bound_check(toric.ellipsoid_count_series(e, s), 1).passed
    ks = np.arange(1, 31)
    assert not toric.toric_bound_check(gr.GrowthSeries(ks, 2.0 ** ks), 2).passed
