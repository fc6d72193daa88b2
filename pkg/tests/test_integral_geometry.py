import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from barcode_entropy import integral_geometry as ig

from oracles import segment_crossings_exact

SEG = np.array([[-0.5, 0.1], [0.5, 0.1]])


# -- intersection counts ---------------------------------------------------


def test_crossing_segments():
    assert ig.curve_intersections([[0, 0], [1, 1]], [[0, 1], [1, 0]]) == 1


def test_disjoint_curves():
    assert ig.curve_intersections([[0, 0], [1, 0]], [[0, 1], [1, 1]]) == 0


def test_circle_and_line():
    line = [[-3, 0.5], [3, 0.5]]
    assert ig.curve_intersections(ig.unit_circle(), line) == 2
    assert ig.brute_force_intersections(ig.unit_circle(), line) == 2


def test_collinear_overlap_is_non_transverse():
    with pytest.raises(ig.NonTransverse):
        ig.curve_intersections([[0, 0], [2, 0]], [[1, 0], [3, 0]])


def test_torus_wraps():
    # a horizontal loop and a vertical segment crossing the seam
    assert ig.curve_intersections([[0.0, 0.5], [1.0, 0.5]], [[0.3, 0.9], [0.3, 1.6]], "torus") == 1


def test_unknown_space():
    with pytest.raises(ValueError):
        ig.curve_intersections(SEG, SEG, "sphere")


def _poly(rng, n):
    return np.round(rng.uniform(-1, 1, size=(n, 2)), 3) + rng.uniform(0, 1e-4, size=(n, 2))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 100_000), st.integers(2, 12), st.integers(2, 12))
def test_counts_match_exact_arithmetic(seed, na, nb):
    rng = np.random.default_rng(seed)
    a, b = _poly(rng, na), _poly(rng, nb)
    want = segment_crossings_exact(a, b)
    assert ig.curve_intersections(a, b) == want
    assert ig.brute_force_intersections(a, b) == want


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_torus_counts_match_brute_force(seed):
    rng = np.random.default_rng(seed)
    a = np.cumsum(rng.uniform(-0.3, 0.3, size=(8, 2)), axis=0)
    b = np.cumsum(rng.uniform(-0.3, 0.3, size=(8, 2)), axis=0)
    assert ig.curve_intersections(a, b, "torus") == ig.brute_force_intersections(a, b, "torus")


def test_polyline_validation():
    with pytest.raises(ValueError):
        ig.polyline_length([[0, 0]])
    assert ig.polyline_length([[0, 0], [3, 4]]) == 5


# -- Crofton -------------------------------------------------------------------


def test_line_tomograph_unit_segment():
    t = ig.line_tomograph()
    val, se, bad = ig.mc_integral(t, SEG, 200_000, seed=1)
    assert bad == 0
    assert abs(val - 2.0) <= 4 * se
    assert val == pytest.approx(2.0, rel=0.02)


@pytest.mark.slow
def test_line_tomograph_unit_circle():
    val, se, _ = ig.mc_integral(ig.line_tomograph(), ig.unit_circle(1024), 1_000_000, seed=2)
    assert val == pytest.approx(4 * math.pi, rel=0.02)


def test_scaling_target_scales_integral():
    t = ig.line_tomograph()
    v1, s1, _ = ig.mc_integral(t, SEG * 0.6, 200_000, seed=3)
    v2, s2, _ = ig.mc_integral(t, SEG * 1.2, 200_000, seed=3)
    assert abs(v2 / v1 - 2.0) <= 4 * math.hypot(s1, s2) / v1 * 2
    assert v2 / v1 == pytest.approx(2.0, rel=0.03)


def test_mc_integral_independent_of_workers():
    t = ig.line_tomograph()
    assert ig.mc_integral(t, SEG, 20_000, seed=5) == ig.mc_integral(t, SEG, 20_000, seed=5, workers=4)


def test_mc_integral_needs_samples():
    with pytest.raises(ValueError):
        ig.mc_integral(ig.line_tomograph(), SEG, 10)


def test_zero_length_target():
    res = ig.crofton_mc(ig.line_tomograph(), [[0.2, 0.3], [0.2, 0.3]], 10_000, seed=0)
    assert res.integral == 0.0
    assert res.volume == 0.0
    assert res.passed


def test_crofton_inequality_and_formula_for_lines():
    t = ig.line_tomograph()
    dens = ig.pushforward_density(t, seed=7)
    res = ig.crofton_mc(t, SEG, 100_000, seed=8, density=dens)
    assert res.passed
    # kinematic density of lines is direction independent: 2 per unit length
    inner = dens.values[dens.covered]
    mid = inner[np.abs(inner.mean(axis=1) - 2.0) < 0.5]
    assert abs(np.median(mid) - 2.0) < 0.1
    chk = ig.crofton_formula_check(t, SEG, 100_000, seed=8, density=dens)
    assert chk.density_integral == pytest.approx(chk.mc, rel=0.03)


def strip_in_disk(r, lo, hi):
    """Area of {ξ in the disk of radius r : lo <= ξ_y <= hi}."""

    def F(y):
        y = max(-r, min(r, y))
        return y * math.sqrt(r * r - y * y) + r * r * math.asin(y / r)

    return F(hi) - F(lo)


@pytest.mark.parametrize("c,ell", [(0.0, 0.1), (0.05, 0.1), (0.12, 0.2)])
def test_translation_tomograph_straight_target(c, ell):
    r = 0.15
    core = [[0.1, 0.5], [0.9, 0.5]]
    t = ig.translation_tomograph(core, r)
    target = [[0.5, 0.5 + c - ell / 2], [0.5, 0.5 + c + ell / 2]]
    val, se, _ = ig.mc_integral(t, target, 20_000, seed=4)
    want = strip_in_disk(r, c - ell / 2, c + ell / 2)
    assert abs(val - want) <= 4 * se + 1e-12


def test_zero_radius_family():
    t = ig.translation_tomograph([[0.1, 0.5], [0.9, 0.5]], 0.0)
    val, se, _ = ig.mc_integral(t, [[0.5, 0.3], [0.5, 0.7]], 2000)
    assert val == 0.0 and se == 0.0


def test_degenerate_family_rejected():
    t = ig.translation_tomograph([[0.1, 0.5], [0.6, 0.5]], 0.1, along=(1.0, 0.0))
    with pytest.raises(ig.NonTransverse, match="not transverse"):
        ig.mc_integral(t, [[0.2, 0.5], [0.8, 0.5]], 2000)


def test_cylinder_family():
    t = ig.cylinder_graph_tomograph(4, 0.5)
    assert np.all(t.curve(np.zeros(4))[:, 1] == 0)
    target = ig.cylinder_graph(lambda th: 0.3 * np.sin(2 * th))
    xis = t.domain.sample(np.random.default_rng(0), 4000)
    n, bad = t.count(xis, target)
    assert not bad.any()
    assert np.all(n % 2 == 0)
    assert ig.submersion_rate(t, np.random.default_rng(1)) == 1.0


def test_length_ratio():
    t = ig.line_tomograph()
    a = np.array([[0.0, 0.0], [0.3, 0.4]])
    v1, _, _ = ig.mc_integral(t, a, 100_000, seed=9)
    v2, _, _ = ig.mc_integral(t, 2 * a, 100_000, seed=9)
    assert v2 / v1 == pytest.approx(2.0, rel=0.03)


@pytest.mark.parametrize("spec,name", [
    ({"kind": "lines"}, "lines"),
    ({"kind": "translation", "core": [[0, 0], [1, 0]], "radius": 0.1}, "translation"),
    ({"kind": "cylinder", "d": 3}, "cylinder-graphs"),
])
def test_tomograph_from_spec(spec, name):
    assert ig.tomograph_from_spec(spec).name == name


def test_tomograph_from_spec_error():
    with pytest.raises(ValueError):
        ig.tomograph_from_spec({"kind": "planes"})
