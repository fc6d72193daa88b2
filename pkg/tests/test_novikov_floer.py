import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from barcode_entropy import novikov as nv
from barcode_entropy.novikov import INF, NovikovComplex, NovikovGenerator, NovikovScalar, RatT, UnpinnedBarcode

from oracles import unpinned_by_minors

T = NovikovScalar.monomial


def cx(acts, diff):
    return NovikovComplex([NovikovGenerator(k, v) for k, v in acts.items()], diff)


def terms_of(c):
    return {k: lam.terms for k, lam in c.differential.items()}


# -- scalars -----------------------------------------------------------------


def test_valuation_examples():
    assert nv.novikov_valuation(NovikovScalar([2, 5])) == 2
    assert nv.novikov_valuation(NovikovScalar()) == INF
    assert nv.novikov_valuation(NovikovScalar([1, 3]) * NovikovScalar([2])) == 3


def test_coefficients_cancel_mod_two():
    assert NovikovScalar([1, 1, 2]) == T(2)
    assert not (T(1.5) + T(1.5))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-6, 6), max_size=5), st.lists(st.integers(-6, 6), max_size=5))
def test_product_matches_term_by_term(xs, ys):
    a, b = NovikovScalar(xs), NovikovScalar(ys)
    want: dict[float, int] = {}
    for x in a.terms:
        for y in b.terms:
            want[x + y] = want.get(x + y, 0) ^ 1
    assert (a * b).terms == tuple(sorted(e for e, odd in want.items() if odd))
    if a and b:
        assert nv.novikov_valuation(a * b) == nv.novikov_valuation(a) + nv.novikov_valuation(b)


polys = st.lists(st.integers(0, 8), min_size=1, max_size=5).map(lambda d: RatT.from_degrees(d)).filter(bool)


@settings(max_examples=100, deadline=None)
@given(polys, polys, polys)
def test_rational_functions_form_a_field(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * a.inverse() == RatT(0, 1)
    assert (a / b) * b == a
    assert a + a == RatT(0, 0)


# -- chain action ----------------------------------------------------------


C1 = cx({"x": 4.0, "y": 7.0}, {})


def test_chain_action_examples():
    assert nv.chain_action({"x": T(1)}, C1) == 3
    assert nv.chain_action({"x": T(0), "y": T(0)}, C1) == 7
    with pytest.raises(ValueError):
        nv.chain_action({}, C1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.lists(st.integers(-4, 4), min_size=1, max_size=3))
def test_boundary_lowers_action_and_scalars_shift(seed, lam_exps):
    rng = np.random.default_rng(seed)
    c, _ = nv.random_novikov_complex(rng, 3, grid=0.5)
    ids = [g.id for g in c.generators]
    chain = {}
    for g in ids:
        if rng.random() < 0.6:
            chain[g] = NovikovScalar(rng.integers(-4, 5, size=int(rng.integers(1, 3))) * 0.5)
    chain = {k: v for k, v in chain.items() if v}
    if not chain:
        return
    a = nv.chain_action(chain, c)
    bd = c.boundary(chain)
    if bd:
        assert nv.chain_action(bd, c) < a
    lam = NovikovScalar(lam_exps)
    if not lam:
        return
    scaled = {k: lam * v for k, v in chain.items()}
    assert nv.chain_action(scaled, c) == a - nv.novikov_valuation(lam)


# -- orthogonalization ------------------------------------------------------


def test_orthogonalize_diagonal():
    svd = nv.orthogonalize(cx({"a": 1.0, "b": 0.0}, {("a", "b"): [0]}))
    assert [(set(x), set(y)) for x, y in svd.pairs] == [({"a"}, {"b"})]
    assert svd.cycles == ()


def test_orthogonalize_leading_term_pivot():
    c = cx({"a": 3.0, "b": 1.0, "c": 0.0}, {("a", "b"): [0], ("a", "c"): [2]})
    svd = nv.orthogonalize(c)
    assert svd.pair_actions == ((3.0, 1.0),)
    assert len(svd.cycles) == 1 and svd.cycle_actions == (0.0,)
    x, y = svd.pairs[0]
    assert set(x) == {"a"}
    assert set(y) == {"b", "c"}  # y = ∂a = b + T^2 c
    assert nv.unpinned_barcode(c) == UnpinnedBarcode(unpinned_by_minors(c.actions, terms_of(c)))


def test_orthogonalize_zero_differential():
    svd = nv.orthogonalize(cx({"a": 1.0, "b": 2.0, "c": 0.0}, {}))
    assert svd.pairs == ()
    assert len(svd.cycles) == 3


def test_tie_break_validated():
    with pytest.raises(ValueError):
        nv.orthogonalize(C1, tie_break="middle")


def test_nonzero_square_rejected():
    with pytest.raises(nv.ComplexError, match="∂²"):
        cx({"a": 2.0, "b": 1.0, "c": 0.0}, {("a", "b"): [0], ("b", "c"): [0]})


def test_nonpositive_arrow_rejected():
    with pytest.raises(nv.ComplexError, match="decrease"):
        cx({"a": 1.0, "b": 0.0}, {("a", "b"): [-1]})


# -- unpinned barcodes -------------------------------------------------------


def test_unpinned_examples():
    assert nv.unpinned_barcode(cx({"a": 5.0, "b": 0.0}, {("a", "b"): [0]})) == UnpinnedBarcode([5])
    assert nv.unpinned_barcode(cx({"a": 1.0, "b": 2.0, "c": 0.0}, {})) == UnpinnedBarcode([INF] * 3)


def test_b_eps_unpinned_examples():
    assert nv.b_eps_unpinned(UnpinnedBarcode([5, INF]), 1) == 2
    assert nv.b_eps_unpinned(UnpinnedBarcode([1]), 1) == 0
    with pytest.raises(ValueError):
        nv.b_eps_unpinned(UnpinnedBarcode([1]), 0)


@pytest.mark.parametrize("seed", range(40))
def test_unpinned_matches_minor_oracle(seed):
    rng = np.random.default_rng(seed)
    c, planted = nv.random_novikov_complex(rng, int(rng.integers(1, 4)), grid=1.0, density=0.5)
    if len(c) > 6:
        pytest.skip("minor expansion is only run up to 6 generators")
    want = UnpinnedBarcode(unpinned_by_minors(c.actions, terms_of(c)))
    assert planted == want
    assert nv.unpinned_barcode(c) == want
    assert nv.unpinned_barcode(c, "last") == want


@pytest.mark.parametrize("seed", range(30))
def test_pivot_order_does_not_change_barcode(seed):
    c, planted = nv.random_novikov_complex(np.random.default_rng(seed), 5)
    assert nv.unpinned_barcode(c, "first") == nv.unpinned_barcode(c, "last") == planted


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.1, 6))
def test_b_eps_at_most_generator_count(seed, eps):
    c, _ = nv.random_novikov_complex(np.random.default_rng(seed), 4)
    assert nv.b_eps_unpinned(nv.unpinned_barcode(c), eps) <= len(c)


# -- Floer graphs and isolated vertices -------------------------------------


def test_floer_graph_examples():
    g = nv.floer_graph(cx({"a": 1.0, "b": 0.0}, {("a", "b"): [2]}))
    assert [ar.length for ar in g.arrows] == [3.0]
    assert nv.floer_graph(C1).arrows == ()


@pytest.mark.parametrize("seed", range(10))
def test_arrow_count_is_term_count(seed):
    c, _ = nv.random_novikov_complex(np.random.default_rng(seed), 4)
    g = nv.floer_graph(c)
    assert len(g.arrows) == sum(len(lam.terms) for lam in c.differential.values())
    for ar in g.arrows:
        assert ar.length == c.act[ar.source] - c.act[ar.target] + ar.exponent > 0


def test_isolated_examples():
    c = cx({"a": 5.0, "b": 0.0}, {("a", "b"): [0]})
    p, ids = nv.isolated_count(nv.floer_graph(c), 1.0)
    assert (p, sorted(ids)) == (2, ["a", "b"])
    assert nv.b_eps_unpinned(nv.unpinned_barcode(c), 1.0) == 1 >= math.ceil(p / 2)
    assert nv.isolated_count(nv.floer_graph(c), 5.0)[0] == 0


def test_isolated_inequality_random():
    rng = np.random.default_rng(11)
    hits = 0
    for _ in range(200):
        eps = float(rng.choice([0.25, 0.5, 1.0]))
        c, _ = nv.random_novikov_complex(rng, int(rng.integers(1, 5)), density=float(rng.uniform(0, 0.3)))
        p, _ = nv.isolated_count(nv.floer_graph(c), eps)
        b = nv.b_eps_unpinned(nv.unpinned_barcode(c), eps)
        assert b >= math.ceil(p / 2)
        hits += p > 0
    assert hits > 50


# -- duality and tensor products ---------------------------------------------


def test_dual_example():
    d = nv.dual_complex(cx({"a": 5.0, "b": 0.0}, {("a", "b"): [0]}))
    assert d.actions == {("*", "a"): -5.0, ("*", "b"): 0.0}
    assert set(d.differential) == {(("*", "b"), ("*", "a"))}
    assert nv.unpinned_barcode(d) == UnpinnedBarcode([5])


def test_double_dual_is_original():
    c, _ = nv.random_novikov_complex(np.random.default_rng(5), 4)
    dd = nv.dual_complex(nv.dual_complex(c))
    assert dd.actions == c.actions
    assert dd.differential == c.differential
    assert nv.unpinned_barcode(dd) == nv.unpinned_barcode(c)


def test_duality_preserves_b_eps():
    rng = np.random.default_rng(17)
    for _ in range(500):
        c, planted = nv.random_novikov_complex(rng, int(rng.integers(1, 4)))
        bd = nv.unpinned_barcode(nv.dual_complex(c))
        assert bd == planted
        for eps in (0.25, 1.0, 3.0):
            assert nv.b_eps_unpinned(bd, eps) == nv.b_eps_unpinned(planted, eps)


def test_tensor_examples():
    three = nv.svd_form_complex([3.0], prefix="a")
    five = nv.svd_form_complex([5.0], prefix="b")
    line = nv.svd_form_complex([INF], prefix="c")
    assert nv.unpinned_barcode(nv.tensor_product(three, five)) == UnpinnedBarcode([3, 3])
    assert nv.unpinned_barcode(nv.tensor_product(line, five)) == UnpinnedBarcode([5])


def test_tensor_pairing_law_random():
    rng = np.random.default_rng(23)
    for _ in range(200):
        a, ba = nv.random_novikov_complex(rng, int(rng.integers(1, 3)), prefix="a")
        b, bb = nv.random_novikov_complex(rng, int(rng.integers(1, 3)), prefix="b")
        prod = nv.unpinned_barcode(nv.tensor_product(a, b))
        assert prod == nv.pairing_law(ba, bb)
        for eps in (0.5, 2.0):
            assert nv.b_eps_unpinned(prod, eps) <= 2 * nv.b_eps_unpinned(ba, eps) * nv.b_eps_unpinned(bb, eps)


@pytest.mark.parametrize("seed", range(8))
def test_tensor_against_minor_oracle(seed):
    rng = np.random.default_rng(300 + seed)
    a, _ = nv.random_novikov_complex(rng, 1, grid=1.0, prefix="a")
    b, _ = nv.random_novikov_complex(rng, 1, grid=1.0, prefix="b")
    t = nv.tensor_product(a, b)
    if len(t) > 6:
        pytest.skip("minor expansion is only run up to 6 generators")
    assert nv.unpinned_barcode(t) == UnpinnedBarcode(unpinned_by_minors(t.actions, terms_of(t)))


def test_perturbing_novikov_actions_keeps_lengths_close():
    from barcode_entropy.persistence import perturb_actions

    rng = np.random.default_rng(2)
    for _ in range(20):
        c, planted = nv.random_novikov_complex(rng, 3)
        p = perturb_actions(c, 0.1, rng)
        assert max(abs(p.act[g] - c.act[g]) for g in c.act) <= 0.1
        got = nv.unpinned_barcode(p)
        assert got.n_infinite == planted.n_infinite
