"""Dynamical systems with metrics: entropy, periodic points, volume growth, shadowing.

Torus and circle maps act on points in [0,1)^d and carry a lift to R^d used
for arclength computations. The two-sided shift acts on finite windows of
symbols. All logarithms are base 2.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .growth import GrowthSeries, RateFit, exp_growth_rate

INF = math.inf


def _wrap(x: np.ndarray) -> np.ndarray:
    y = np.mod(x, 1.0)
    y[y >= 1.0] = 0.0
    return y


def _torus_diff(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    d = np.mod(np.asarray(x, float) - np.asarray(y, float) + 0.5, 1.0) - 0.5
    return d


class DynamicalSystem:
    """Base class; see TorusMap and ShiftMap."""

    kind: str = "abstract"
    exact: dict

    def step(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def orbit(self, pts: np.ndarray, k: int) -> list[np.ndarray]:
        out = [pts]
        for _ in range(k - 1):
            out.append(self.step(out[-1]))
        return out

    def distance(self, x, y) -> np.ndarray:
        raise NotImplementedError

    def power(self, m: int) -> "DynamicalSystem":
        raise NotImplementedError


def _kronecker(n: int, d: int) -> np.ndarray:
    phi = 2.0
    for _ in range(64):
        phi = (1 + phi) ** (1.0 / (d + 1))
    alpha = phi ** -np.arange(1, d + 1)
    return _wrap(0.5 + np.outer(np.arange(1, n + 1), alpha))


class TorusMap(DynamicalSystem):
    """Self-map of T^d given by a lift F: R^d -> R^d with F(x + n) - F(x) ∈ Z^d.

    The metric is the flat Euclidean metric of R^d / Z^d.
    """

    def __init__(self, lift: Callable[[np.ndarray], np.ndarray], dim: int, kind: str = "custom", exact: dict | None = None, lipschitz: float | None = None):
        self.lift = lift
        self.dim = dim
        self.kind = kind
        self.exact = dict(exact or {})
        self.lipschitz = lipschitz

    def step(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, float).reshape(-1, self.dim)
        return _wrap(self.lift(pts))

    def distance(self, x, y) -> np.ndarray:
        d = _torus_diff(np.asarray(x, float).reshape(-1, self.dim), np.asarray(y, float).reshape(-1, self.dim))
        return np.sqrt(np.sum(d * d, axis=1))

    def lift_power(self, k: int) -> Callable[[np.ndarray], np.ndarray]:
        def f(x):
            for _ in range(k):
                x = self.lift(x)
            return x
        return f

    def power(self, m: int) -> "TorusMap":
        exact = {}
        if "matrix" in self.exact:
            exact["matrix"] = _int_matpow(self.exact["matrix"], m)
        if "degree" in self.exact:
            exact["degree"] = self.exact["degree"] ** m
        if "rotation" in self.exact:
            exact["rotation"] = [a * m for a in self.exact["rotation"]]
        lip = None if self.lipschitz is None else self.lipschitz ** m
        return TorusMap(self.lift_power(m), self.dim, f"{self.kind}^{m}", exact, lip)

    def sample(self, budget: int, rng: np.random.Generator) -> np.ndarray:
        """Kronecker points plus seeded uniform points, in seeded random order.

        The deterministic part is n·α mod 1 with α built from the
        generalized golden ratio. A lattice would be a poor choice: integer
        maps send lattice cosets to lattice cosets, so orbits would live on
        a finite invariant set as coarse as the lattice. Dyadic sequences
        (Halton, Sobol) create exact distance ties at dyadic ε. The order is the greedy
        scan order; a lexicographic scan packs thin d_k-balls with a
        density that drifts with k and biases the fitted slope.
        """
        n_det = budget // 2
        det = _kronecker(n_det, self.dim)
        rand = rng.random((budget - n_det, self.dim))
        pts = _wrap(np.vstack([det, rand]))
        return pts[rng.permutation(len(pts))]


class ShiftMap(DynamicalSystem):
    """Two-sided full shift on q symbols, σ(x)_i = x_{i+1}.

    d(x, y) = 2^-n with n the least |i| where x_i ≠ y_i. Points are windows
    of symbols; column ``center`` holds index 0. Symbols shifted in from
    beyond the window are marked -1 and never compared.
    """

    kind = "shift"

    def __init__(self, alphabet: int = 2, steps: int = 1):
        if alphabet < 2:
            raise ValueError("alphabet needs at least 2 symbols")
        self.alphabet = alphabet
        self.steps = steps
        self.exact = {"alphabet": alphabet, "steps": steps}

    @staticmethod
    def window_length(k: int) -> int:
        return 2 * (k + 32) + 1

    def step(self, pts: np.ndarray) -> np.ndarray:
        s = self.steps
        out = np.full_like(pts, -1)
        out[:, :-s] = pts[:, s:]
        return out

    def distance(self, x, y) -> np.ndarray:
        x = np.atleast_2d(x)
        y = np.atleast_2d(y)
        W = x.shape[1]
        c = W // 2
        known = (x >= 0) & (y >= 0)
        diff = (x != y) & known
        radius = np.abs(np.arange(W) - c)
        big = np.where(diff, radius[None, :], W)
        n = big.min(axis=1)
        return np.where(n >= W, 0.0, 2.0 ** (-n.astype(float)))

    def power(self, m: int) -> "ShiftMap":
        return ShiftMap(self.alphabet, self.steps * m)

    def sample(self, budget: int, rng: np.random.Generator, k: int = 1) -> np.ndarray:
        W = self.window_length(k * self.steps)
        pts = rng.integers(0, self.alphabet, size=(budget, W))
        order = np.lexsort(pts.T[::-1])
        return pts[order]


# ---------------------------------------------------------------------------
# builtin systems


def linear_torus(A) -> TorusMap:
    M = np.array(A, dtype=np.int64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if abs(round(np.linalg.det(M))) != 1:
        raise ValueError("a torus automorphism needs determinant ±1")
    Mf = M.astype(float)
    return TorusMap(lambda x: x @ Mf.T, M.shape[0], "linear_torus", {"matrix": M.tolist()}, float(np.linalg.norm(Mf, 2)))


def cat_map() -> TorusMap:
    return linear_torus([[2, 1], [1, 1]])


def degree_map(m: int = 2) -> TorusMap:
    return TorusMap(lambda x: m * x, 1, "doubling" if m == 2 else "degree", {"degree": m}, float(abs(m)))


def rotation(alpha: float | Sequence[float]) -> TorusMap:
    a = np.atleast_1d(np.asarray(alpha, float))
    return TorusMap(lambda x: x + a, len(a), "rotation", {"rotation": a.tolist()}, 1.0)


def perturbed_linear_torus(A, kappa: float = 0.05) -> TorusMap:
    """x ↦ A x + κ sin(2π x_1)/(2π) in every coordinate; a smooth conjugate of A for small κ."""
    M = np.array(A, dtype=float)

    def lift(x):
        return x @ M.T + (kappa / (2 * np.pi)) * np.sin(2 * np.pi * x[:, :1])

    lip = float(np.linalg.norm(M, 2) + abs(kappa) * math.sqrt(M.shape[0]))
    return TorusMap(lift, M.shape[0], "perturbed_torus", {}, lip)


def circle_table_map(degree: int, values: Sequence[float]) -> TorusMap:
    """Circle map with lift F(x) = degree·x + g(x), g 1-periodic and piecewise linear through ``values``."""
    g = np.asarray(values, float)
    n = len(g)
    if n < 2:
        raise ValueError("need at least 2 table values")
    knots = np.arange(n + 1) / n
    table = np.append(g, g[0])

    def lift(x):
        frac = np.mod(x, 1.0)
        return degree * x + np.interp(frac, knots, table)

    slope = np.max(np.abs(np.diff(table))) * n
    return TorusMap(lift, 1, "custom_grid", {}, float(abs(degree) + slope))


def system_from_spec(spec: dict) -> DynamicalSystem:
    kind = spec.get("kind")
    if kind == "linear_torus":
        return linear_torus(spec["matrix"])
    if kind == "cat":
        return cat_map()
    if kind == "doubling":
        return degree_map(int(spec.get("degree", 2)))
    if kind == "rotation":
        return rotation(spec.get("alpha", (math.sqrt(5) - 1) / 2))
    if kind == "shift":
        return ShiftMap(int(spec.get("alphabet", 2)))
    if kind == "perturbed_torus":
        return perturbed_linear_torus(spec.get("matrix", [[2, 1], [1, 1]]), float(spec.get("kappa", 0.05)))
    if kind == "custom_grid":
        return circle_table_map(int(spec.get("degree", 1)), spec["values"])
    raise ValueError(f"unknown system kind {kind!r}")


# ---------------------------------------------------------------------------
# k-shadowing metric


def dk_distance(sys: DynamicalSystem, x, y, k: int) -> float:
    """max over 0 <= i < k of d(φ^i x, φ^i y)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if isinstance(sys, ShiftMap):
        x = np.atleast_2d(np.asarray(x))
        y = np.atleast_2d(np.asarray(y))
    else:
        x = np.asarray(x, float).reshape(1, -1)
        y = np.asarray(y, float).reshape(1, -1)
    best = 0.0
    for _ in range(k):
        best = max(best, float(sys.distance(x, y)[0]))
        x, y = sys.step(x), sys.step(y)
    return best


# ---------------------------------------------------------------------------
# separated sets and covers


@dataclass(frozen=True)
class PackingResult:
    eps: float
    k: int
    separated: int  # greedy maximal ε-separated set: lower estimate of S_ε(k)
    cover: int  # greedy cover by sets of diameter < ε: upper estimate of C_ε(k)
    cover_2eps: int
    n_samples: int
    saturated: bool

    @property
    def bracket_ok(self) -> bool:
        """C_2ε <= S_ε <= C_ε, skipping sides whose cover was not computed."""
        lo = self.cover_2eps < 0 or self.cover_2eps <= self.separated
        hi = self.cover < 0 or self.separated <= self.cover
        return lo and hi


def _index_times(k: int) -> list[int]:
    """Orbit times the kd-tree indexes: 0, k-1 and k-1-2^j.

    A tree over all k times degrades badly for k beyond ~8; a log-spaced
    subset localizes nearly as well and the exact d_k test is applied to
    the candidates afterwards.
    """
    t, j = {0, k - 1}, 1
    while k - 1 - j > 0:
        t.add(k - 1 - j)
        j *= 2
    return sorted(t)


class _OrbitIndex:
    """Orbit embeddings of a fixed sample, with one kd-tree per time k."""

    def __init__(self, sys: TorusMap, pts: np.ndarray):
        self.sys = sys
        self.orbits = [pts]
        self.trees: dict[int, tuple[cKDTree, list[int]]] = {}
        self.d = sys.dim

    def embedding(self, k: int) -> np.ndarray:
        while len(self.orbits) < k:
            self.orbits.append(self.sys.step(self.orbits[-1]))
        return np.hstack(self.orbits[:k])

    def tree(self, k: int) -> tuple[cKDTree, list[int]]:
        hit = self.trees.get(k)
        if hit is None:
            d = self.d
            cols = [t * d + j for t in _index_times(k) for j in range(d)]
            hit = (cKDTree(self.embedding(k)[:, cols], boxsize=1.0), cols)
            self.trees[k] = hit
        return hit

    def greedy(self, k: int, radius: float, strict: bool = False, limit: int | None = None) -> int:
        """Size of a greedy maximal set with pairwise d_k > radius (>= when strict).

        Scans points in their stored order; each chosen point removes all
        points within d_k <= radius (< radius when strict) of it. Stops
        early once the count exceeds ``limit``.
        """
        tree, cols = self.tree(k)
        data = self.embedding(k)
        n = len(data)
        alive = np.ones(n, dtype=bool)
        count = 0
        for i in range(n):
            if not alive[i]:
                continue
            count += 1
            if limit is not None and count > limit:
                break
            nb = np.asarray(tree.query_ball_point(data[i, cols], radius, p=np.inf), dtype=np.intp)
            if len(nb):
                diff = _torus_diff(data[nb], data[i]).reshape(len(nb), k, self.d)
                dist = np.sqrt((diff ** 2).sum(axis=2)).max(axis=1)
                nb = nb[dist < radius] if strict else nb[dist <= radius]
            alive[nb] = False
        return count


def _shift_classes(pts: np.ndarray, k: int, m: int, steps: int) -> int:
    """Number of distinct words on the index window that d_k <= 2^-m compares."""
    if m <= 0:
        return 1
    c = pts.shape[1] // 2
    lo, hi = c - (m - 1), c + (m - 1) + (k - 1) * steps
    if lo < 0 or hi >= pts.shape[1]:
        raise ValueError("window too short for this ε and k")
    return len(np.unique(pts[:, lo:hi + 1], axis=0))


def _shift_level(eps: float) -> int:
    """Smallest m with 2^-m <= eps: d <= eps iff d <= 2^-m, as d takes values 2^-n."""
    return max(0, math.ceil(-math.log2(eps) - 1e-12))


def packing_numbers(sys: DynamicalSystem, eps: float, k: int, sample_budget: int, seed=0, *, saturation: float = 8.0) -> PackingResult:
    """Greedy packing and covering counts for d_k on a deterministic+seeded sample.

    The separated count lower-bounds S_ε(k) restricted to the sample; the
    cover uses closed d_k-balls of radius just under ε/2 (diameter < ε)
    centered at a greedy net, so every ε-separated subset of the sample has
    at most one point per ball and S_ε <= C_ε holds by construction.
    """
    if sample_budget <= 0:
        raise ValueError("sample budget must be positive")
    if not eps > 0:
        raise ValueError("eps must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if isinstance(sys, ShiftMap):
        pts = sys.sample(sample_budget, rng, k)
        m = _shift_level(eps)
        s = _shift_classes(pts, k, m, sys.steps)
        c = _shift_classes(pts, k, m + 1, sys.steps)  # diameter < 2^-m means agreement one step further
        c2 = _shift_classes(pts, k, max(m - 1, 0), sys.steps) if m >= 1 else 1
        return PackingResult(eps, k, s, c, min(c2, s), sample_budget, s * saturation > sample_budget)
    pts = sys.sample(sample_budget, rng)
    idx = _OrbitIndex(sys, pts)
    return _packing_from_index(idx, eps, k, saturation)


def _packing_from_index(idx: _OrbitIndex, eps: float, k: int, saturation: float, with_cover: bool = True, cap: int | None = None) -> PackingResult:
    n = len(idx.orbits[0])
    limit = int(n / saturation) if cap is None else min(cap, int(n / saturation))
    s = idx.greedy(k, eps, limit=limit)
    if s > limit:
        return PackingResult(eps, k, s, -1, -1, n, True)
    c = c2 = -1
    if with_cover:
        # covers past the same limit are reported as unknown (-1)
        c = idx.greedy(k, eps / 2, strict=True, limit=2 * limit)
        c2 = idx.greedy(k, eps, strict=True, limit=2 * limit)
        c = c if c <= 2 * limit else -1
        c2 = c2 if c2 <= 2 * limit else -1
    return PackingResult(eps, k, s, c, c2, n, False)


@dataclass(frozen=True)
class EntropyEstimate:
    value: float
    per_eps: tuple[tuple[float, float], ...]
    k_range: tuple[int, int]
    diagnostics: dict = field(default_factory=dict, compare=False)


def htop_estimate(sys: DynamicalSystem, eps_grid: Sequence[float], k_range: Sequence[int], budget: int = 1 << 17, seed=0, *, saturation: float = 16.0, with_cover: bool = True, max_separated: int = 1 << 13) -> EntropyEstimate:
    """Per-ε tail slope of log2 S_ε(k); the value is the rate at the smallest ε.

    For each ε, k runs up the range until the separated set fills more
    than 1/saturation of the sample (or exceeds ``max_separated``, a
    runtime guard); counts past that point measure the sample, not the
    map, and are left out. The fit uses the top half of the unsaturated
    ks (at least the last four). Covers are computed on the fit window of
    the smallest ε, the one that sets the value.
    """
    ks = sorted(int(k) for k in k_range)
    if not ks or not len(eps_grid):
        raise ValueError("empty grids")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    eps_sorted = sorted(set(float(e) for e in eps_grid), reverse=True)
    per_eps, diag = [], {"eps": {}, "flags": []}
    shift = isinstance(sys, ShiftMap)
    if shift:
        pts = sys.sample(budget, rng, ks[-1])
    else:
        idx = _OrbitIndex(sys, sys.sample(budget, rng))
    for eps in eps_sorted:
        rows = []
        for k in ks:
            if shift:
                m = _shift_level(eps)
                s = _shift_classes(pts, k, m, sys.steps)
                c = _shift_classes(pts, k, m + 1, sys.steps)
                res = PackingResult(eps, k, s, c, s, budget, s * saturation > budget or s > max_separated)
            else:
                res = _packing_from_index(idx, eps, k, saturation, False, max_separated)
            if res.saturated:
                break
            rows.append(res)
        if len(rows) < 4:
            diag["eps"][eps] = {"rows": [(r.k, r.separated, r.cover) for r in rows]}
            diag["flags"].append(f"eps={eps}: only {len(rows)} unsaturated k values; skipped")
            continue
        window = rows[len(rows) // 2:] if len(rows) >= 8 else rows[-4:]
        if with_cover and not shift and eps == eps_sorted[-1]:
            done = {r.k for r in window}
            window = [_packing_from_index(idx, eps, r.k, saturation, True, max_separated) for r in window]
            rows = [r for r in rows if r.k not in done] + window
        if any(not r.bracket_ok for r in window):
            diag["flags"].append(f"bracket violated at eps={eps}")
        fit = exp_growth_rate(_pad(window))
        per_eps.append((eps, fit.rate))
        diag["eps"][eps] = {"rows": [(r.k, r.separated, r.cover) for r in rows], "window": fit.window, "residual": fit.residual}
    if not per_eps:
        raise ValueError("no ε admitted a usable fit; raise the budget or lower k")
    rates = [r for _, r in per_eps]
    diag["monotone"] = all(b >= a - 0.1 for a, b in zip(rates, rates[1:]))
    return EntropyEstimate(max(per_eps[-1][1], 0.0), tuple(per_eps), (ks[0], ks[-1]), diag)


def _pad(rows) -> GrowthSeries:
    # exp_growth_rate fits the top half of what it is given; hand it a
    # series whose top half is exactly these rows.
    ks = [r.k for r in rows]
    span = ks[-1] - ks[0]
    lead_k = [ks[0] - span - 1 + i for i in range(len(rows))]
    return GrowthSeries(lead_k + ks, [0] * len(rows) + [r.separated for r in rows])


# ---------------------------------------------------------------------------
# periodic points


def _int_matpow(A, k: int) -> list[list[int]]:
    n = len(A)
    R = [[int(i == j) for j in range(n)] for i in range(n)]
    B = [[int(v) for v in row] for row in A]
    while k:
        if k & 1:
            R = [[sum(R[i][t] * B[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        B = [[sum(B[i][t] * B[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        k >>= 1
    return R


def _int_det(M) -> int:
    """Bareiss fraction-free determinant."""
    A = [[int(v) for v in row] for row in M]
    n = len(A)
    sign, prev = 1, 1
    for i in range(n - 1):
        if A[i][i] == 0:
            swap = next((r for r in range(i + 1, n) if A[r][i] != 0), None)
            if swap is None:
                return 0
            A[i], A[swap] = A[swap], A[i]
            sign = -sign
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                A[r][c] = (A[r][c] * A[i][i] - A[r][i] * A[i][c]) // prev
        prev = A[i][i]
    return sign * A[n - 1][n - 1]


def periodic_count(sys: DynamicalSystem, k: int, *, grid: int = 1 << 16) -> int:
    """Number of fixed points of φ^k.

    Exact for linear torus maps (|det(A^k − I)|), degree-m circle maps
    (|m^k − 1|), rotations and shifts (q^k). Other circle maps fall back to
    counting integer crossings of F^k(x) − x on a grid, with a warning.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    ex = sys.exact
    if "matrix" in ex:
        Ak = _int_matpow(ex["matrix"], k)
        n = len(Ak)
        det = _int_det([[Ak[i][j] - (i == j) for j in range(n)] for i in range(n)])
        if det == 0:
            raise ValueError("infinite or non-isolated fixed set: A^k − I is singular")
        return abs(det)
    if "degree" in ex:
        m = ex["degree"]
        val = abs(m ** k - 1)
        if val == 0:
            raise ValueError("infinite or non-isolated fixed set: degree-1 map")
        return val
    if "rotation" in ex:
        if all((Fraction(a) * k).denominator == 1 for a in ex["rotation"]):
            raise ValueError("infinite or non-isolated fixed set: φ^k is the identity")
        return 0
    if "alphabet" in ex:
        return ex["alphabet"] ** (k * ex.get("steps", 1))
    if isinstance(sys, TorusMap) and sys.dim == 1:
        warnings.warn("periodic count from a grid search is approximate")
        x = (np.arange(grid) + 0.5) / grid
        g = sys.lift_power(k)(x.reshape(-1, 1))[:, 0] - x
        g_end = sys.lift_power(k)(np.array([[x[0] + 1.0]]))[0, 0] - (x[0] + 1.0)
        vals = np.append(g, g_end)
        return int(np.abs(np.diff(np.floor(vals))).sum())
    raise ValueError("no exact structure and no grid search for this system")


def orbit_growth_entropy(p: GrowthSeries) -> float:
    if len(p) < 4:
        raise ValueError("need at least 4 points")
    if not any(c > 0 for c in p.counts):
        return 0.0
    return exp_growth_rate(p).rate


def periodic_series(sys: DynamicalSystem, ks: Sequence[int]) -> GrowthSeries:
    return GrowthSeries(ks, [periodic_count(sys, k) for k in ks])


# ---------------------------------------------------------------------------
# volume growth


@dataclass(frozen=True)
class VolumeGrowth:
    series: GrowthSeries
    fit: RateFit
    lower_bound_only: bool
    n_points: tuple[int, ...]


def _image_length(F: Callable, curve: Callable[[np.ndarray], np.ndarray], tol: float, budget: int, graph: bool) -> tuple[float, bool, int]:
    """Arclength of F∘curve on [0,1], bisecting segments whose chord misses the midpoint image by > tol."""
    t = np.linspace(0.0, 1.0, 33)

    def image(s):
        p = curve(s)
        y = F(p)
        return np.hstack([p, y]) if graph else y

    Y = image(t)
    exhausted = False
    while True:
        mid = (t[:-1] + t[1:]) / 2
        Ym = image(mid)
        err = np.sqrt(((Ym - (Y[:-1] + Y[1:]) / 2) ** 2).sum(axis=1))
        bad = err > tol
        if not bad.any():
            break
        if len(t) + bad.sum() > budget:
            exhausted = True
            break
        t = np.insert(t, np.flatnonzero(bad) + 1, mid[bad])
        Y = np.insert(Y, np.flatnonzero(bad) + 1, Ym[bad], axis=0)
    return float(np.sqrt((np.diff(Y, axis=0) ** 2).sum(axis=1)).sum()), exhausted, len(t)


def segment_curve(p0, p1) -> Callable[[np.ndarray], np.ndarray]:
    p0 = np.asarray(p0, float)
    p1 = np.asarray(p1, float)
    return lambda s: p0[None, :] + np.asarray(s)[:, None] * (p1 - p0)[None, :]


def polyline_curve(points) -> Callable[[np.ndarray], np.ndarray]:
    P = np.asarray(points, float)
    if len(P) < 2:
        raise ValueError("curve needs at least 2 points")
    seg = np.sqrt((np.diff(P, axis=0) ** 2).sum(axis=1))
    cum = np.concatenate([[0], np.cumsum(seg)]) / max(seg.sum(), 1e-300)

    def f(s):
        s = np.asarray(s)
        return np.column_stack([np.interp(s, cum, P[:, j]) for j in range(P.shape[1])])

    return f


def volume_growth(sys: TorusMap, curve=None, k_range: Sequence[int] = range(1, 11), *, graph: bool = False, tol: float = 1e-6, budget: int = 1 << 20) -> VolumeGrowth:
    """Lengths of φ^k(curve) in the universal cover and their exponential rate.

    ``curve`` is a polyline (array of lifted points) or a callable on [0,1].
    With ``graph=True`` on a circle map, the length of the graph of φ^k over
    the circle is measured instead.
    """
    if not isinstance(sys, TorusMap):
        raise ValueError("volume growth needs a smooth torus or circle map")
    if graph:
        if sys.dim != 1:
            raise ValueError("graph mode is for circle maps")
        curve = segment_curve([0.0], [1.0])
    elif curve is None:
        raise ValueError("need a curve")
    elif not callable(curve):
        curve = polyline_curve(curve)
    ks = sorted(int(k) for k in k_range)
    lengths, npts, flagged = [], [], False
    for k in ks:
        L, exhausted, n = _image_length(sys.lift_power(k), curve, tol, budget, graph)
        lengths.append(L)
        npts.append(n)
        flagged |= exhausted
    series = GrowthSeries(ks, lengths)
    return VolumeGrowth(series, exp_growth_rate(series), flagged, tuple(npts))


def unstable_direction(A) -> np.ndarray:
    M = np.asarray(A, float)
    w, V = np.linalg.eig(M)
    i = int(np.argmax(np.abs(w)))
    v = np.real(V[:, i])
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# pseudo-orbits and shadowing


def pseudo_orbit_defect(sys: DynamicalSystem, z) -> float:
    """max_i d(φ(z_i), z_{i+1}) with indices taken cyclically."""
    z = np.asarray(z)
    if len(z) == 0:
        raise ValueError("empty sequence")
    if isinstance(sys, TorusMap):
        z = z.reshape(len(z), sys.dim).astype(float)
    img = sys.step(z)
    return float(np.max(sys.distance(img, np.roll(z, -1, axis=0))))


@dataclass(frozen=True)
class ShadowResult:
    orbit: np.ndarray
    distance: float
    defect: float
    constant: float
    eta: float


def hyperbolic_constant(A) -> float:
    """Bound C with sup_i |u_i| <= C η for the periodic solution of u_{i+1} = A u_i + e_i.

    Sums the spectral projector norms weighted by the geometric series of
    the contracting (forward) and expanding (backward) parts.
    """
    M = np.asarray(A, float)
    w, V = np.linalg.eig(M)
    if np.any(np.isclose(np.abs(w), 1.0, atol=1e-12)):
        raise ValueError("matrix is not hyperbolic")
    Vi = np.linalg.inv(V)
    C = 0.0
    for i, mu in enumerate(w):
        P = np.outer(V[:, i], Vi[i, :])
        nP = np.linalg.norm(P, 2)
        a = abs(mu)
        C += nP / (1 - a) if a < 1 else nP / (a - 1)
    return float(C)


def shadow_linear(A, z) -> ShadowResult:
    """Closest true k-periodic orbit of a hyperbolic toral automorphism.

    With e_i the lifted defects A z_i − z_{i+1} − n_i, the orbit is z_i + u_i
    where u solves u_{i+1} = A u_i + e_i periodically. In eigen-coordinates
    each contracting mode sums past defects forward and each expanding mode
    sums future defects backward, which is the unique bounded solution.
    """
    M = np.array(A, dtype=float)
    d = M.shape[0]
    z = np.asarray(z, float).reshape(-1, d)
    k = len(z)
    w, V = np.linalg.eig(M)
    if np.any(np.isclose(np.abs(w), 1.0, atol=1e-12)):
        raise ValueError("matrix is not hyperbolic")
    Ak = _int_matpow(np.asarray(A, dtype=np.int64).tolist(), k)
    if _int_det([[Ak[i][j] - (i == j) for j in range(d)] for i in range(d)]) == 0:
        raise ValueError("A^k − I is singular")
    raw = z @ M.T - np.roll(z, -1, axis=0)
    e = raw - np.round(raw)
    eta = float(np.sqrt((e ** 2).sum(axis=1)).max())
    eh = e @ np.linalg.inv(V).T  # rows: defects in eigen-coordinates
    uh = np.zeros((k, d), dtype=complex)
    idx = np.arange(k)
    for j, mu in enumerate(w):
        if abs(mu) < 1:
            m = np.arange(1, k + 1)
            weights = mu ** (m - 1) / (1 - mu ** k)
            for i in range(k):
                uh[i, j] = np.sum(weights * eh[(i - m) % k, j])
        else:
            m = np.arange(0, k)
            weights = -(mu ** (-(m + 1.0))) / (1 - mu ** (-float(k)))
            for i in range(k):
                uh[i, j] = np.sum(weights * eh[(i + m) % k, j])
    u = np.real(uh @ V.T)
    orbit = _wrap(z + u)
    dist = float(np.sqrt((_torus_diff(orbit, z) ** 2).sum(axis=1)).max())
    sysA = linear_torus(np.array(A, dtype=np.int64))
    defect = pseudo_orbit_defect(sysA, orbit)
    return ShadowResult(orbit, dist, defect, hyperbolic_constant(A), eta)
