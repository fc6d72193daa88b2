"""Acceptance suite: sixteen numbered checks shared by the CLI and the tests.

Each check takes (seed, workers) and returns an ``Outcome`` with a
pass flag, a metrics dict and any output files as text. Outcomes hold
no timings so that a suite run is byte-reproducible; wall-clock times
travel separately in ``CheckRun``.
"""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import dynamics as dyn
from . import integral_geometry as ig
from . import novikov as nv
from . import persistence as pc
from . import toric
from .growth import GrowthSeries, certify_polynomial_bound, exp_growth_rate, poly_degree_fit
from .io import atomic_write, barcode_csv, dumps_json, growth_csv
from .seeding import derive_seed, substream

INF = math.inf
LOG2_CAT = math.log2((3 + math.sqrt(5)) / 2)


@dataclass
class Outcome:
    passed: bool
    metrics: dict
    files: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Check:
    id: int
    name: str
    limit_s: float
    fn: Callable[[int, int], Outcome]
    fast: bool = False


@dataclass
class CheckRun:
    check: Check
    outcome: Outcome | None
    elapsed: float
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.outcome is not None and self.outcome.passed

    @property
    def in_time(self) -> bool:
        return self.elapsed < self.check.limit_s


# ---------------------------------------------------------------------------
# persistence core


def sphere_morse_complex() -> pc.FilteredComplexF2:
    """Octahedral S² with two minima (0, 1), one saddle (2) and one maximum (3).

    Ring vertices r0..r3 around the equator, poles t and u. Values: r0=0,
    r2=1 (minima), r1=2 (saddle: lower link {r0, r2} is two points), r3=3
    (maximum); the poles at 2.5 and 2.7 are regular.
    """
    vals = {0: 0.0, 1: 2.0, 2: 1.0, 3: 3.0, 4: 2.5, 5: 2.7}
    ring = [0, 1, 2, 3]
    edges = [(ring[i], ring[(i + 1) % 4]) for i in range(4)] + [(p, r) for p in (4, 5) for r in ring]
    tris = [(p, ring[i], ring[(i + 1) % 4]) for p in (4, 5) for i in range(4)]
    simplices = [(v,) for v in vals] + edges + tris
    return pc.sublevel_filtration(simplices, vals)


def check_sphere(seed: int, workers: int) -> Outcome:
    bc = pc.barcode(sphere_morse_complex())
    want = pc.Barcode.from_pairs([(0.0, INF), (1.0, 2.0), (3.0, INF)])
    got = sorted(bc.expanded())
    degrees = sorted((b.start, b.degree) for b in bc.bars)
    return Outcome(bc == want, {"bars": got, "degrees": degrees}, {"sphere_barcode.csv": barcode_csv(bc)})


def _graph_family(max_gens: int = 12):
    """Every lower-star-like complex on 4 or 5 vertices with at most ``max_gens`` simplices:
    all edge sets, all filled-triangle subsets, a distinct and a tied vertex
    value pattern, and two edge delays."""
    for nv_ in (4, 5):
        tri_all = list(itertools.combinations(range(nv_), 3))
        edges_all = list(itertools.combinations(range(nv_), 2))
        patterns = (tuple(float(i) for i in range(nv_)), tuple(float(i // 2) for i in range(nv_)))
        for vals in patterns:
            for emask in range(1 << len(edges_all)):
                E = [e for k, e in enumerate(edges_all) if emask >> k & 1]
                if nv_ + len(E) > max_gens:
                    continue
                Es = set(E)
                T_ok = [t for t in tri_all if all(f in Es for f in itertools.combinations(t, 2))]
                for tmask in range(1 << len(T_ok)):
                    T = [t for k, t in enumerate(T_ok) if tmask >> k & 1]
                    if nv_ + len(E) + len(T) > max_gens:
                        continue
                    for delay in (0.0, 0.5):
                        gens = [pc.Generator((v,), vals[v], 0) for v in range(nv_)]
                        eact = {e: max(vals[e[0]], vals[e[1]]) + delay for e in E}
                        gens += [pc.Generator(e, eact[e], 1) for e in E]
                        gens += [pc.Generator(t, max(eact[f] for f in itertools.combinations(t, 2)) + delay, 2) for t in T]
                        bd = {e: [(e[0],), (e[1],)] for e in E}
                        bd.update({t: list(itertools.combinations(t, 2)) for t in T})
                        yield pc.FilteredComplexF2(gens, bd)


def check_oracle(seed: int, workers: int) -> Outcome:
    n_struct = mism = 0
    for c in _graph_family():
        n_struct += 1
        if pc.barcode(c) != pc.module_barcode(pc.sampled_module(c)):
            mism += 1
    rng = substream(seed, "verify", "persistence", "oracle")
    n_rand = 500
    mism_rand = planted_mism = 0
    for _ in range(n_rand):
        n = int(rng.integers(1, 31))
        c, planted = pc.random_filtered_complex(rng, n)
        b = pc.barcode(c)
        if b != pc.module_barcode(pc.sampled_module(c)):
            mism_rand += 1
        if b != planted:
            planted_mism += 1
    ok = mism == 0 and mism_rand == 0 and planted_mism == 0
    return Outcome(ok, {"structured": n_struct, "structured_mismatches": mism, "random": n_rand,
                        "random_mismatches": mism_rand, "planted_mismatches": planted_mism})


def check_stability(seed: int, workers: int) -> Outcome:
    rng = substream(seed, "verify", "persistence", "stability")
    eps_grid = np.arange(1, 33) * 0.125
    viol_b = viol_bn = 0
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 21))
        c, _ = pc.random_filtered_complex(rng, n)
        delta = float(rng.choice([0.125, 0.25, 0.5, 1.0]))
        c2 = pc.perturb_actions(c, delta / 2, rng)
        shift = max(abs(c.actions[k] - c2.actions[k]) for k in c.actions)
        b1, b2 = pc.barcode(c), pc.barcode(c2)
        d = 2 * shift
        for eps in eps_grid:
            lo = pc.barcode_function(b1, eps + d)
            mid = pc.barcode_function(b2, eps)
            hi = pc.barcode_function(b1, eps - d) if eps > d else math.inf
            if not lo <= mid <= hi:
                viol_b += 1
        bn = pc.bottleneck_distance(b1, b2)
        worst = max(worst, bn - shift)
        if bn > shift + 1e-12:
            viol_bn += 1
    return Outcome(viol_b == 0 and viol_bn == 0, {"complexes": 1000, "barcode_function_violations": viol_b,
                                                    "bottleneck_violations": viol_bn, "max_bottleneck_minus_shift": worst})


# ---------------------------------------------------------------------------
# Novikov / Floer


def _isolated_instance(rng: np.random.Generator, eps: float) -> nv.NovikovComplex:
    lengths = []
    budget = int(rng.integers(1, 21))  # vertex budget, so p <= 20
    while budget > 0:
        r = rng.random()
        if r < 0.2:
            lengths.append(INF)
            budget -= 1
        elif budget >= 2:
            long = r < 0.75
            lo, hi = (eps + 0.125, 6.0) if long else (0.125, eps)
            lengths.append(float(np.round(rng.uniform(lo, hi) / 0.125) * 0.125))
            budget -= 2
        else:
            break
    c = nv.svd_form_complex(lengths, rng)
    return nv.scramble(c, rng, density=float(rng.uniform(0.0, 0.3)))


def check_isolated(seed: int, workers: int) -> Outcome:
    rng = substream(seed, "verify", "novikov", "isolated")
    eps = 1.0
    viol, ps, tight = 0, [], 0
    for _ in range(200):
        c = _isolated_instance(rng, eps)
        p, _ = nv.isolated_count(nv.floer_graph(c), eps)
        b = nv.b_eps_unpinned(nv.unpinned_barcode(c), eps)
        ps.append(p)
        need = math.ceil(p / 2)
        viol += b < need
        tight += b == need
    return Outcome(viol == 0, {"complexes": 200, "violations": int(viol), "p_max": max(ps), "p_mean": float(np.mean(ps)),
                               "tight_cases": int(tight)})


def check_duality_tensor(seed: int, workers: int) -> Outcome:
    rng = substream(seed, "verify", "novikov", "dual")
    dual_bad = 0
    for _ in range(500):
        c, _ = nv.random_novikov_complex(rng, int(rng.integers(1, 9)))
        if nv.unpinned_barcode(nv.dual_complex(c)) != nv.unpinned_barcode(c):
            dual_bad += 1
    rng = substream(seed, "verify", "novikov", "pairing")
    pair_bad = pairs = 0
    for na, nb, rep in itertools.product(range(1, 7), range(1, 7), range(4)):
        la = [INF if rng.random() < 0.25 else float(0.125 * rng.integers(1, 33)) for _ in range(na)]
        lb = [INF if rng.random() < 0.25 else float(0.125 * rng.integers(1, 33)) for _ in range(nb)]
        a = nv.svd_form_complex(la, rng, prefix="a")
        b = nv.svd_form_complex(lb, rng, prefix="b")
        if rep % 2:
            a, b = nv.scramble(a, rng), nv.scramble(b, rng)
        got = nv.unpinned_barcode(nv.tensor_product(a, b))
        pairs += 1
        if got != nv.pairing_law(nv.UnpinnedBarcode(la), nv.UnpinnedBarcode(lb)):
            pair_bad += 1
    rng = substream(seed, "verify", "novikov", "tensor")
    bound_bad = 0
    eps_grid = (0.25, 0.5, 1.0, 2.0)
    for _ in range(200):
        a, ba = nv.random_novikov_complex(rng, int(rng.integers(1, 4)), prefix="a")
        b, bb = nv.random_novikov_complex(rng, int(rng.integers(1, 4)), prefix="b")
        bt = nv.unpinned_barcode(nv.tensor_product(a, b))
        for eps in eps_grid:
            if nv.b_eps_unpinned(bt, eps) > 2 * nv.b_eps_unpinned(ba, eps) * nv.b_eps_unpinned(bb, eps):
                bound_bad += 1
    ok = dual_bad == 0 and pair_bad == 0 and bound_bad == 0
    return Outcome(ok, {"dual_complexes": 500, "dual_mismatches": dual_bad, "pairing_instances": pairs,
                        "pairing_mismatches": pair_bad, "tensor_pairs": 200, "tensor_bound_violations": bound_bad})


# ---------------------------------------------------------------------------
# dynamics


def _entropy_payload(est: dyn.EntropyEstimate) -> dict:
    return {"value": est.value, "per_eps": [list(p) for p in est.per_eps], "k_range": list(est.k_range),
            "diagnostics": {"flags": list(est.diagnostics.get("flags", [])), "monotone": est.diagnostics.get("monotone")}}


DOUBLING_EPS = tuple(2.0 ** -m for m in range(3, 11))
CAT_EPS = (2.0 ** -3, 2.0 ** -4)
ROTATION_EPS = tuple(2.0 ** -m for m in range(3, 9))


def check_doubling(seed: int, workers: int) -> Outcome:
    est = dyn.htop_estimate(dyn.degree_map(2), DOUBLING_EPS, range(1, 17), budget=1 << 17, seed=derive_seed(seed, "verify", "dynamics", "doubling"))
    return Outcome(0.90 <= est.value <= 1.10, {"htop": est.value, "target": 1.0, "per_eps": [list(p) for p in est.per_eps]},
                   {"doubling_entropy.json": dumps_json(_entropy_payload(est))})


def check_cat(seed: int, workers: int) -> Outcome:
    est = dyn.htop_estimate(dyn.cat_map(), CAT_EPS, range(1, 17), budget=1 << 18, seed=derive_seed(seed, "verify", "dynamics", "cat"))
    per = dyn.periodic_series(dyn.cat_map(), range(1, 21))
    rate20 = math.log2(per.counts[-1]) / 20
    rel_h = abs(est.value - LOG2_CAT) / LOG2_CAT
    rel_p = abs(rate20 - LOG2_CAT) / LOG2_CAT
    return Outcome(rel_h <= 0.10 and rel_p <= 0.01,
                   {"htop": est.value, "target": LOG2_CAT, "htop_rel_err": rel_h, "periodic_rate_k20": rate20,
                    "periodic_fit_rate": dyn.orbit_growth_entropy(per), "periodic_rel_err": rel_p},
                   {"cat_entropy.json": dumps_json(_entropy_payload(est)), "cat_periodic.csv": growth_csv(per, "k")})


def check_rotation(seed: int, workers: int) -> Outcome:
    est = dyn.htop_estimate(dyn.rotation((math.sqrt(5) - 1) / 2), ROTATION_EPS, range(1, 17), budget=1 << 15,
                            seed=derive_seed(seed, "verify", "dynamics", "rotation"))
    return Outcome(est.value <= 0.05, {"htop": est.value, "per_eps": [list(p) for p in est.per_eps]})


def _builtin_systems():
    """(name, system, htop settings, volume settings) for every builtin kind with a volume."""
    return [
        ("doubling", dyn.degree_map(2), (DOUBLING_EPS[:6], range(1, 15), 1 << 16), dict(graph=True, k_range=range(1, 15))),
        ("cat", dyn.cat_map(), (CAT_EPS, range(1, 17), 1 << 17), dict(curve=[[0.0, 0.0], [0.1, 0.0]], k_range=range(1, 15))),
        ("rotation", dyn.rotation((math.sqrt(5) - 1) / 2), (ROTATION_EPS, range(1, 17), 1 << 14), dict(graph=True, k_range=range(1, 15))),
        ("perturbed_torus", dyn.perturbed_linear_torus([[2, 1], [1, 1]], 0.05), (CAT_EPS, range(1, 17), 1 << 17),
         dict(curve=[[0.0, 0.0], [0.1, 0.0]], k_range=range(1, 13))),
        ("custom_grid", dyn.circle_table_map(2, [0.0, 0.04, 0.0, -0.04]), (DOUBLING_EPS[:6], range(1, 15), 1 << 16),
         dict(graph=True, k_range=range(1, 15))),
    ]


def check_yomdin(seed: int, workers: int) -> Outcome:
    rows, ok = {}, True
    for name, sys, (eps, ks, budget), vol_kw in _builtin_systems():
        est = dyn.htop_estimate(sys, eps, ks, budget=budget, seed=derive_seed(seed, "verify", "yomdin", name), with_cover=False)
        vg = dyn.volume_growth(sys, **vol_kw)
        good = vg.fit.rate <= est.value + 0.15
        ok &= good
        rows[name] = {"htop": est.value, "volume_rate": vg.fit.rate, "ok": good}
    u = dyn.unstable_direction([[2, 1], [1, 1]])
    vu = dyn.volume_growth(dyn.cat_map(), [[0.0, 0.0], list(0.1 * u)], range(1, 15))
    rel = abs(vu.fit.rate - LOG2_CAT) / LOG2_CAT
    ok &= rel <= 0.10
    return Outcome(bool(ok), {"systems": rows, "shift": "skipped: no length structure on a symbolic space",
                              "cat_unstable_rate": vu.fit.rate, "cat_unstable_rel_err": rel},
                   {"cat_unstable_volume.csv": growth_csv(vu.series, "k")})


def periodic_cat_orbit(k: int, n: tuple[int, int]) -> np.ndarray:
    """Exact period-k orbit of the cat map through the solution of (A^k - I)x = n, in rationals."""
    from fractions import Fraction

    M = dyn._int_matpow([[2, 1], [1, 1]], k)
    a, b, c, d = M[0][0] - 1, M[0][1], M[1][0], M[1][1] - 1
    det = a * d - b * c
    x = [Fraction(d * n[0] - b * n[1], det) % 1, Fraction(-c * n[0] + a * n[1], det) % 1]
    out = [x]
    for _ in range(k - 1):
        x = [(2 * x[0] + x[1]) % 1, (x[0] + x[1]) % 1]
        out.append(x)
    return np.array([[float(v) for v in p] for p in out])


def check_shadowing(seed: int, workers: int) -> Outcome:
    rng = substream(seed, "verify", "dynamics", "shadowing")
    A = [[2, 1], [1, 1]]
    worst_ratio = worst_defect = 0.0
    bad = 0
    for _ in range(100):
        k = int(rng.integers(1, 51))
        z = periodic_cat_orbit(k, (int(rng.integers(0, 100)), int(rng.integers(0, 100))))
        noise = rng.normal(size=(k, 2))
        noise *= 1e-4 / np.linalg.norm(noise, axis=1, keepdims=True) * rng.random((k, 1))
        zz = (z + noise) % 1
        eta = dyn.pseudo_orbit_defect(dyn.cat_map(), zz)
        r = dyn.shadow_linear(A, zz)
        # η is the cyclic defect of this pseudo-orbit and at most 1e-4 (plus the image of the noise)
        lim = 5 * max(eta, 1e-300)
        worst_ratio = max(worst_ratio, r.distance / max(eta, 1e-300))
        worst_defect = max(worst_defect, r.defect)
        bad += (r.distance > lim) or (r.defect > 1e-10)
    return Outcome(bad == 0, {"pseudo_orbits": 100, "failures": int(bad), "max_distance_over_eta": worst_ratio,
                              "max_residual_defect": worst_defect})


# ---------------------------------------------------------------------------
# integral geometry


def check_crofton(seed: int, workers: int) -> Outcome:
    t = ig.line_tomograph()
    dens = ig.pushforward_density(t, seed=derive_seed(seed, "verify", "crofton", "density"))
    targets = {"segment": np.array([[-0.5, 0.1], [0.5, 0.1]]), "circle": ig.unit_circle(256)}
    rows, ok, files = {}, True, {}
    for name, tgt in targets.items():
        r = ig.crofton_mc(t, tgt, 1_000_000, seed=derive_seed(seed, "verify", "crofton", name), density=dens, workers=workers)
        want = 2 * r.volume
        rel = abs(r.integral - want) / want
        di, dse = dens.integrate(tgt)
        fc = ig.CroftonFormulaCheck(r.integral, r.stderr, di, dse)
        good = rel <= 0.02 and r.passed and fc.passed(3.0)
        ok &= good
        rows[name] = {"integral": r.integral, "stderr": r.stderr, "exact": want, "rel_err": rel, "const": r.const,
                      "inequality": r.passed, "density_integral": di, "density_stderr": dse, "z": fc.z}
        files[f"crofton_{name}.json"] = dumps_json(r.as_dict())
    return Outcome(bool(ok), rows, files)


# ---------------------------------------------------------------------------
# toric models


def check_ellipsoid(seed: int, workers: int) -> Outcome:
    e = toric.EllipsoidSpec([1.0, math.sqrt(2)])
    _, n10 = toric.ellipsoid_spectrum(e, 10.0)
    slope = toric.linear_slope(toric.ellipsoid_count_series(e, np.arange(100, 1001)))
    want = 1 + 1 / math.sqrt(2)
    gen = toric.ellipsoid_generator_bound(e, np.arange(1, 1001))
    rate = exp_growth_rate(gen).rate
    ok = n10 == 17 and abs(slope - want) / want <= 0.01 and rate <= 0.02
    return Outcome(ok, {"count_s10": n10, "slope": slope, "slope_target": want, "entropy_estimate": rate,
                        "rationally_independent": e.rationally_independent}, {"ellipsoid_generators.csv": growth_csv(gen)})


def check_toric_s2(seed: int, workers: int) -> Outcome:
    h = toric.power_profile(2.0)
    counts = [toric.rational_tori_count(h, k) for k in range(1, 101)]
    wrong = [k for k, c in zip(range(1, 101), counts) if c.total != 2 * k + 1]
    ser = GrowthSeries(range(1, 101), [c.total for c in counts])
    cert = toric.toric_bound_check(ser, 1)
    return Outcome(not wrong and cert.passed, {"mismatched_k": wrong, "interior_k1_to_3": [c.interior for c in counts[:3]],
                                               "certificate": {"c_1": cert.c_n, "c_0": cert.c_0, "passed": cert.passed},
                                               "degree_fit": poly_degree_fit(ser).degree}, {"toric_s2_counts.csv": growth_csv(ser)})


def _lattice_brute(b: toric.LatticeBasis, s_grid: np.ndarray) -> np.ndarray:
    A, B, C = b.gram
    lam_min = min(np.linalg.eigvalsh([[A, B], [B, C]]))
    R = int(math.ceil(math.sqrt(max(s_grid) / lam_min))) + 1
    m, n = np.meshgrid(np.arange(-R, R + 1), np.arange(-R, R + 1))
    E = A * m * m + 2 * B * m * n + C * n * n
    E = np.sort(E[(m != 0) | (n != 0)].ravel())
    return 2 * np.searchsorted(E, s_grid, side="left") + 4


def check_flat_torus(seed: int, workers: int) -> Outcome:
    s = np.arange(1, 10001, dtype=float)
    rows, ok, files = {}, True, {}
    for name, basis in (("square", toric.LatticeBasis((1, 0), (0, 1))), ("skew", toric.LatticeBasis((1, 0), (0.3, 1.1)))):
        ser = toric.flat_torus_count_series(basis, s)
        brute = _lattice_brute(basis, s)
        mism = int(np.sum(np.asarray(ser.counts) != brute))
        probe = [pc.barcode_function(toric.flat_torus_loop_barcode(basis, v), 1.0, v + 1) for v in (1.5, 10.0, 100.0)]
        probe_ok = probe == [int(_lattice_brute(basis, np.array([v]))[0]) for v in (1.5, 10.0, 100.0)]
        cert = toric.toric_bound_check(ser, 1)
        rate = exp_growth_rate(ser).rate
        good = mism == 0 and probe_ok and cert.passed and rate <= 0.02
        ok &= good
        rows[name] = {"mismatches": mism, "barcode_probe_ok": probe_ok, "certificate": cert.passed, "entropy_estimate": rate}
        files[f"flat_torus_{name}.csv"] = growth_csv(ser)
    return Outcome(bool(ok), rows, files)


# ---------------------------------------------------------------------------
# growth calibration


def check_calibration(seed: int, workers: int) -> Outcome:
    rng = substream(seed, "verify", "growth", "calibration")
    k = np.arange(1, 41)
    rates = {}
    for rho in (0.5, 1.0, 1.5):
        c = np.round(3 * 2.0 ** (rho * k) * np.exp(rng.normal(0, 0.05, k.size)))
        rates[rho] = exp_growth_rate(GrowthSeries(k, np.maximum(c, 1))).rate
    x = np.arange(1, 201)
    degs = {}
    for d in (0, 1, 2):
        c = np.round(5 * x ** d * np.exp(rng.normal(0, 0.05, x.size)) + 2)
        degs[d] = poly_degree_fit(GrowthSeries(x, c)).degree
    ok = all(abs(v - r) / r <= 0.05 for r, v in rates.items()) and all(abs(v - d) <= 0.05 for d, v in degs.items())
    return Outcome(ok, {"rates": rates, "degrees": degs})


# ---------------------------------------------------------------------------
# reproducibility


def check_reproducible(seed: int, workers: int, reference: dict[str, str] | None = None) -> Outcome:
    """Re-run checks 1-15 with a different worker count and compare output bytes.

    ``reference`` is the rendered output of a run that just happened (so
    only one extra run is needed); without it two runs are made.
    """
    other = 1 if workers > 1 else 4
    base = [c for c in CHECKS if c.id != 16]
    if reference is None:
        reference = render(run_checks(base, seed, workers))
    again = render(run_checks(base, seed, other))
    a = {k: v for k, v in reference.items() if not k.startswith("16_") and k != "summary.json"}
    b = {k: v for k, v in again.items() if k != "summary.json"}
    differing = sorted(k for k in set(a) | set(b) if a.get(k) != b.get(k))
    return Outcome(not differing and bool(a), {"files": len(a), "workers_compared": sorted({workers, other}), "differing": differing})


# ---------------------------------------------------------------------------
# registry and runner


CHECKS: list[Check] = [
    Check(1, "sphere_morse_barcode", 1, check_sphere, True),
    Check(2, "oracle_equivalence", 30, check_oracle, True),
    Check(3, "isolated_points_bound", 30, check_isolated, True),
    Check(4, "stability", 60, check_stability),
    Check(5, "duality_and_tensor", 60, check_duality_tensor),
    Check(6, "doubling_entropy", 60, check_doubling),
    Check(7, "cat_entropy", 120, check_cat),
    Check(8, "rotation_entropy", 30, check_rotation, True),
    Check(9, "volume_growth_consistency", 120, check_yomdin),
    Check(10, "shadowing", 30, check_shadowing, True),
    Check(11, "crofton", 120, check_crofton),
    Check(12, "ellipsoid", 30, check_ellipsoid, True),
    Check(13, "toric_sphere", 30, check_toric_s2, True),
    Check(14, "flat_torus", 30, check_flat_torus, True),
    Check(15, "growth_calibration", 10, check_calibration, True),
    Check(16, "reproducibility", INF, check_reproducible),
]
SUITES = ("all", "fast")


def select(suite: str) -> list[Check]:
    if suite == "all":
        return list(CHECKS)
    if suite == "fast":
        return [c for c in CHECKS if c.fast]
    try:
        ids = {int(x) for x in suite.split(",")}
    except ValueError:
        raise ValueError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)} or a comma-separated id list") from None
    bad = ids - {c.id for c in CHECKS}
    if bad:
        raise ValueError(f"unknown check id {min(bad)}")
    return [c for c in CHECKS if c.id in ids]


def _run_one(check_id: int, seed: int, workers: int) -> tuple[Outcome | None, float, str | None]:
    check = next(c for c in CHECKS if c.id == check_id)
    t0 = time.perf_counter()
    try:
        out = check.fn(seed, workers)
        err = None
    except Exception as e:  # reported per check; the suite goes on
        out, err = None, f"{type(e).__name__}: {e}"
    return out, time.perf_counter() - t0, err


def _prefix(c: Check) -> str:
    return f"{c.id:02d}_{c.name}"


def render(runs: list[CheckRun]) -> dict[str, str]:
    """Output files of a suite run, keyed by relative path. Holds no timings."""
    files: dict[str, str] = {}
    summary = []
    for r in runs:
        p = _prefix(r.check)
        rec = {"id": r.check.id, "name": r.check.name, "passed": r.passed}
        if r.error:
            rec["error"] = r.error
        else:
            rec["metrics"] = r.outcome.metrics
            for name, text in r.outcome.files.items():
                files[f"{p}/{name}"] = text
        files[f"{p}/result.json"] = dumps_json(rec)
        summary.append({"id": r.check.id, "name": r.check.name, "passed": r.passed})
    files["summary.json"] = dumps_json({"checks": summary, "passed": all(r.passed for r in runs)})
    return files


def run_checks(checks: list[Check], seed: int, workers: int, out: Path | None = None,
               on_result: Callable[[CheckRun], None] | None = None) -> list[CheckRun]:
    """Run checks (in worker processes when workers > 1) and write their files under ``out``.

    Files are written only after every check has finished, so a crash
    leaves no partial output.
    """
    plain = [c for c in checks if c.id != 16]
    runs: dict[int, CheckRun] = {}
    if workers > 1 and len(plain) > 1:
        with ProcessPoolExecutor(min(workers, len(plain))) as ex:
            futs = {c.id: ex.submit(_run_one, c.id, seed, workers) for c in plain}
            for c in plain:
                runs[c.id] = CheckRun(c, *futs[c.id].result())
                if on_result:
                    on_result(runs[c.id])
    else:
        for c in plain:
            runs[c.id] = CheckRun(c, *_run_one(c.id, seed, workers))
            if on_result:
                on_result(runs[c.id])
    ordered = [runs[c.id] for c in plain]
    files = render(ordered)
    if out is not None:
        for rel, text in files.items():
            atomic_write(Path(out) / rel, text)
    if any(c.id == 16 for c in checks):
        c16 = next(c for c in CHECKS if c.id == 16)
        full = len(plain) == len(CHECKS) - 1
        t0 = time.perf_counter()
        try:
            if full:
                o16, err = check_reproducible(seed, workers, files), None
            else:
                o16, err = check_reproducible(seed, workers), None
        except Exception as e:
            o16, err = None, f"{type(e).__name__}: {e}"
        r16 = CheckRun(c16, o16, time.perf_counter() - t0, err)
        if on_result:
            on_result(r16)
        ordered.append(r16)
        if out is not None:
            files = render(ordered)
            for rel in (f"{_prefix(c16)}/result.json", "summary.json"):
                atomic_write(Path(out) / rel, files[rel])
    return ordered
