import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from barcode_entropy import dynamics as dyn
from barcode_entropy.growth import GrowthSeries

from oracles import (
    circle_fixed_points_brute,
    dk_matrix_torus,
    doubling_grid_separated,
    greedy_separated,
    is_maximal,
    is_separated,
    torus_fixed_points_brute,
)

CAT = [[2, 1], [1, 1]]
LAMBDA = (3 + math.sqrt(5)) / 2
HTOP_CAT = math.log2(LAMBDA)


# -- d_k -------------------------------------------------------------------


def test_identity_map_dk_is_d():
    ident = dyn.rotation(0.0)
    for k in (1, 3, 10):
        assert dyn.dk_distance(ident, [0.1], [0.35], k) == pytest.approx(0.25)


def test_doubling_dk_example():
    assert dyn.dk_distance(dyn.degree_map(2), [0.0], [0.125], 3) == 0.5


def test_dk_rejects_k0():
    with pytest.raises(ValueError):
        dyn.dk_distance(dyn.cat_map(), [0, 0], [0.1, 0], 0)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True), st.integers(1, 8))
def test_dk_nondecreasing(x1, x2, y1, y2, k):
    sys = dyn.cat_map()
    assert dyn.dk_distance(sys, [x1, x2], [y1, y2], k) <= dyn.dk_distance(sys, [x1, x2], [y1, y2], k + 1)


def test_shift_metric():
    sh = dyn.ShiftMap(2)
    W = sh.window_length(2)
    x = np.zeros((1, W), dtype=np.int64)
    y = x.copy()
    y[0, W // 2 + 3] = 1
    assert sh.distance(x, y)[0] == 2.0 ** -3
    # after one shift the difference sits at index 2
    assert dyn.dk_distance(sh, x, y, 2) == 2.0 ** -2


# -- separated sets -----------------------------------------------------------


@pytest.mark.parametrize("k,eps", [(1, 0.1), (2, 0.1), (3, 0.2), (4, 0.25)])
def test_greedy_count_matches_bruteforce(k, eps):
    sys = dyn.cat_map()
    pts = np.random.default_rng(k).random((300, 2))
    D = dk_matrix_torus(sys.step, pts, k)
    chosen = greedy_separated(D, eps)
    assert is_separated(D, chosen, eps)
    assert is_maximal(D, chosen, eps)
    assert dyn._OrbitIndex(sys, pts).greedy(k, eps) == len(chosen)


def test_isometry_packing_constant_in_k():
    sys = dyn.rotation((math.sqrt(5) - 1) / 2)
    s = [dyn.packing_numbers(sys, 0.05, k, 4096, seed=1).separated for k in range(1, 6)]
    assert len(set(s)) == 1


def test_doubling_packing_doubles():
    ks = list(range(2, 8))
    oracle = [doubling_grid_separated(k, 1 / 16) for k in ks]
    ours = [dyn.packing_numbers(dyn.degree_map(2), 1 / 16, k, 1 << 14, seed=0) for k in ks]
    assert all(p.bracket_ok and not p.saturated for p in ours)
    slope_oracle = np.polyfit(ks, np.log2(oracle), 1)[0]
    slope_ours = np.polyfit(ks, np.log2([p.separated for p in ours]), 1)[0]
    assert slope_oracle == pytest.approx(1.0, abs=0.05)
    assert slope_ours == pytest.approx(1.0, abs=0.05)


@pytest.mark.parametrize("m,k", [(1, 1), (1, 3), (2, 2), (3, 1), (3, 3)])
def test_shift_cylinder_counts(m, k):
    # separated words must differ on the 2m - 1 + (k - 1) symbols d_k compares
    got = dyn.packing_numbers(dyn.ShiftMap(2), 2.0 ** -m, k, 1 << 13, seed=0).separated
    assert got == 2 ** (k + 2 * m - 2)


def test_packing_validation():
    with pytest.raises(ValueError):
        dyn.packing_numbers(dyn.cat_map(), 0.0, 2, 100)
    with pytest.raises(ValueError):
        dyn.packing_numbers(dyn.cat_map(), 0.1, 2, 0)


# -- periodic points --------------------------------------------------------


def test_cat_periodic_count():
    assert dyn.periodic_count(dyn.cat_map(), 2) == 5
    assert torus_fixed_points_brute(CAT, 2, 12) == 5
    for k in (1, 3):
        assert dyn.periodic_count(dyn.cat_map(), k) == torus_fixed_points_brute(CAT, k, 20)


def test_doubling_periodic_count():
    assert dyn.periodic_count(dyn.degree_map(2), 3) == 7
    for k in range(1, 7):
        assert dyn.periodic_count(dyn.degree_map(2), k) == circle_fixed_points_brute(2, k, 2 ** k)


def test_periodic_count_errors():
    with pytest.raises(ValueError):
        dyn.periodic_count(dyn.rotation(0.0), 3)
    with pytest.raises(ValueError):
        dyn.periodic_count(dyn.rotation(0.5), 2)
    with pytest.raises(ValueError):
        dyn.periodic_count(dyn.cat_map(), 0)
    assert dyn.periodic_count(dyn.rotation(0.5), 1) == 0


def test_periodic_count_grid_fallback():
    m = dyn.circle_table_map(2, [0.0, 0.04, 0.0, -0.04])
    with pytest.warns(UserWarning):
        n = dyn.periodic_count(m, 4)
    assert n == 2 ** 4 - 1


def test_orbit_growth_entropy_closed_forms():
    ks = range(1, 21)
    cat = GrowthSeries(ks, [LAMBDA ** k + LAMBDA ** -k - 2 for k in ks])
    assert dyn.orbit_growth_entropy(cat) == pytest.approx(HTOP_CAT, rel=1e-3)
    assert dyn.orbit_growth_entropy(dyn.periodic_series(dyn.cat_map(), ks)) == pytest.approx(HTOP_CAT, rel=1e-3)
    assert dyn.orbit_growth_entropy(GrowthSeries(ks, [2 ** k - 1 for k in ks])) == pytest.approx(1.0, abs=1e-3)
    assert dyn.orbit_growth_entropy(GrowthSeries(ks, [7] * 20)) == pytest.approx(0.0, abs=1e-12)


def test_cat_eigenvalue_matches_rate():
    w = np.linalg.eigvals(np.array(CAT, float))
    assert sum(math.log2(abs(x)) for x in w if abs(x) > 1) == pytest.approx(1.3885, abs=1e-4)


# -- volume growth --------------------------------------------------------------


def test_isometry_volume_constant():
    vg = dyn.volume_growth(dyn.rotation([0.3, 0.7]), [[0, 0], [0.2, 0.1]], range(1, 9))
    x, L = vg.series.as_arrays()
    assert np.allclose(L, L[0])
    assert vg.fit.rate == pytest.approx(0.0, abs=1e-9)


def test_cat_unstable_segment_rate():
    v = dyn.unstable_direction(CAT)
    vg = dyn.volume_growth(dyn.cat_map(), dyn.segment_curve([0, 0], 0.01 * v), range(1, 13))
    assert vg.fit.rate == pytest.approx(HTOP_CAT, rel=1e-3)
    # linear map: length of A^k applied to a segment along v is λ^k |segment|
    assert vg.series.counts[-1] == pytest.approx(0.01 * LAMBDA ** 12, rel=1e-6)


def test_volume_growth_validation():
    with pytest.raises(ValueError):
        dyn.volume_growth(dyn.ShiftMap(2), [[0], [1]])
    with pytest.raises(ValueError):
        dyn.volume_growth(dyn.cat_map(), None)


# -- pseudo-orbits and shadowing ------------------------------------------


def cat_periodic_orbit(k, n):
    A = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]]
    P = [[Fraction(int(i == j)) for j in range(2)] for i in range(2)]
    for _ in range(k):
        P = [[sum(P[i][t] * A[t][j] for t in range(2)) for j in range(2)] for i in range(2)]
    a, b, c, d = P[0][0] - 1, P[0][1], P[1][0], P[1][1] - 1
    det = a * d - b * c
    x = [(d * n[0] - b * n[1]) / det % 1, (-c * n[0] + a * n[1]) / det % 1]
    out = [x]
    for _ in range(k - 1):
        x = [(2 * x[0] + x[1]) % 1, (x[0] + x[1]) % 1]
        out.append(x)
    return out


def test_true_orbit_has_zero_defect():
    z = np.array(cat_periodic_orbit(6, (1, 2)), dtype=float)
    assert dyn.pseudo_orbit_defect(dyn.cat_map(), z) < 1e-12


def test_perturbed_fixed_point_defect():
    sys = dyn.cat_map()
    delta = 1e-3
    z = np.zeros((5, 2))
    z[2] = [delta, 0.0]
    lip = np.linalg.norm(np.array(CAT, float), 2)
    assert dyn.pseudo_orbit_defect(sys, z) <= lip * delta + delta


def test_rounded_cat_orbit_defect():
    z = np.array(cat_periodic_orbit(8, (3, 1)), dtype=float)
    z[3, 0] = round(z[3, 0], 6)
    assert dyn.pseudo_orbit_defect(dyn.cat_map(), z) <= 4e-6


def test_shadow_of_true_orbit_is_itself():
    z = np.array(cat_periodic_orbit(5, (2, 3)), dtype=float)
    res = dyn.shadow_linear(CAT, z)
    assert res.distance < 1e-12
    assert np.allclose(res.orbit, z, atol=1e-12)


def test_shadow_of_perturbed_fixed_point():
    res = dyn.shadow_linear(CAT, [[1e-4, -2e-4]])
    assert np.allclose(np.mod(res.orbit + 0.5, 1) - 0.5, 0.0, atol=1e-15)


def exact_shadow(z):
    """u_0 = (I - A^k)^{-1} Σ A^{k-1-i} e_i and u_{i+1} = A u_i + e_i in rationals."""
    k = len(z)
    Z = [[Fraction(float(v)) for v in p] for p in z]

    def A(v):
        return [2 * v[0] + v[1], v[0] + v[1]]

    e = []
    for i in range(k):
        raw = [a - b for a, b in zip(A(Z[i]), Z[(i + 1) % k])]
        e.append([r - round(r) for r in raw])
    acc = [Fraction(0), Fraction(0)]
    for i in range(k):
        acc = [a + b for a, b in zip(A(acc), e[i])]
    # acc = Σ A^{k-1-i} e_i; solve (I - A^k) u_0 = acc
    P = [[1, 0], [0, 1]]
    for _ in range(k):
        P = [[2 * P[0][0] + P[1][0], 2 * P[0][1] + P[1][1]], [P[0][0] + P[1][0], P[0][1] + P[1][1]]]
    a, b, c, d = 1 - P[0][0], -P[0][1], -P[1][0], 1 - P[1][1]
    det = a * d - b * c
    u = [(d * acc[0] - b * acc[1]) / det, (-c * acc[0] + a * acc[1]) / det]
    out = []
    for i in range(k):
        out.append([float((Z[i][j] + u[j]) % 1) for j in range(2)])
        u = [x + y for x, y in zip(A(u), e[i])]
    return np.array(out)


def test_random_pseudo_orbits_shadowed():
    rng = np.random.default_rng(4)
    C = dyn.hyperbolic_constant(CAT)
    assert C <= 5
    for _ in range(30):
        k = int(rng.integers(1, 51))
        z = np.array(cat_periodic_orbit(k, tuple(rng.integers(0, 7, size=2))), dtype=float)
        # a point moved by r changes the defect by at most (|A| + 1) r
        r = 1e-4 / (np.linalg.norm(np.array(CAT, float), 2) + 1)
        z = np.mod(z + rng.uniform(-1, 1, size=z.shape) * r / math.sqrt(2), 1.0)
        res = dyn.shadow_linear(CAT, z)
        assert res.eta == pytest.approx(dyn.pseudo_orbit_defect(dyn.cat_map(), z), rel=1e-9)
        assert res.eta <= 1e-4
        assert res.distance <= C * res.eta + 1e-12
        assert res.defect < 1e-9
        want = exact_shadow(z)
        diff = np.mod(res.orbit - want + 0.5, 1) - 0.5
        assert np.abs(diff).max() < 1e-9


def test_shadow_requires_hyperbolic():
    with pytest.raises(ValueError):
        dyn.shadow_linear([[1, 1], [0, 1]], [[0.1, 0.2]])


# -- specs --------------------------------------------------------------------


@pytest.mark.parametrize("spec", [
    {"kind": "cat"}, {"kind": "doubling"}, {"kind": "rotation", "alpha": 0.3}, {"kind": "shift"},
    {"kind": "perturbed_torus"}, {"kind": "custom_grid", "degree": 2, "values": [0, 0.1]},
    {"kind": "linear_torus", "matrix": [[1, 1], [1, 2]]},
])
def test_system_from_spec(spec):
    assert isinstance(dyn.system_from_spec(spec), dyn.DynamicalSystem)


def test_system_from_spec_errors():
    with pytest.raises(ValueError):
        dyn.system_from_spec({"kind": "nope"})
    with pytest.raises(ValueError):
        dyn.system_from_spec({"kind": "linear_torus", "matrix": [[2, 0], [0, 2]]})


def test_torus_sample_is_seeded():
    a = dyn.cat_map().sample(1000, np.random.default_rng(3))
    b = dyn.cat_map().sample(1000, np.random.default_rng(3))
    assert np.array_equal(a, b)
    assert a.min() >= 0 and a.max() < 1


@pytest.mark.slow
def test_cat_entropy_estimate_small_budget():
    est = dyn.htop_estimate(dyn.cat_map(), [2.0 ** -3], range(1, 12), budget=1 << 15, seed=0, with_cover=False)
    assert est.value == pytest.approx(HTOP_CAT, rel=0.2)
