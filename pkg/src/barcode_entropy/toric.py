"""Combinatorial models for toric integrable systems.

Rational tori of convex profiles on intervals and polygons, ellipsoid
Reeb spectra, semi-admissible radial profiles, and the loop-space barcode
of a flat 2-torus. All of these grow polynomially; the growth checks use
growth.certify_polynomial_bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .growth import BoundCertificate, GrowthSeries, certify_polynomial_bound
from .persistence import Bar, Barcode

INF = math.inf
_TIE = 1e-12


# ---------------------------------------------------------------------------
# convex profiles on moment polytopes


@dataclass
class ConvexProfile:
    """A convex function h on an interval (n = 1) or a convex polygon (n = 2).

    ``domain`` is (a, b) for an interval or a list of polygon vertices in
    counterclockwise order with integer edge directions.
    """

    h: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    domain: tuple
    name: str = "profile"

    @property
    def n(self) -> int:
        return 1 if len(self.domain) == 2 and np.ndim(self.domain[0]) == 0 else 2

    def check_convex(self, resolution: int = 1000, tol: float = 1e-9) -> None:
        """Sampled certificate: second differences along lines are >= -tol."""
        rng = np.random.default_rng(0)
        if self.n == 1:
            a, b = self.domain
            x = np.linspace(a, b, resolution + 1)
            segs = [x]
        else:
            V = np.asarray(self.domain, float)
            segs = []
            for _ in range(16):
                w = rng.dirichlet(np.ones(len(V)), size=2) @ V
                t = np.linspace(0, 1, resolution + 1)[:, None]
                segs.append(w[0] + t * (w[1] - w[0]))
        for pts in segs:
            vals = np.asarray(self.h(pts if self.n == 2 else pts), float)
            d2 = vals[:-2] - 2 * vals[1:-1] + vals[2:]
            scale = max(1.0, float(np.abs(vals).max()))
            if np.any(d2 < -tol * scale):
                raise ValueError(f"profile {self.name!r} fails the convexity certificate")


def power_profile(p: float = 2.0, c: float = 1.0, domain=(0.0, 1.0), center=None) -> ConvexProfile:
    """h(x) = c Σ_i |x_i − center_i|^p, convex for p >= 1 and c >= 0."""
    if p < 1 or c < 0:
        raise ValueError("power profile needs p >= 1 and c >= 0")
    n = 1 if len(domain) == 2 and np.ndim(domain[0]) == 0 else 2
    x0 = np.zeros(n) if center is None else np.atleast_1d(np.asarray(center, float))

    if n == 1:
        def h(x):
            return c * np.abs(np.asarray(x, float) - x0[0]) ** p

        def g(x):
            d = np.asarray(x, float) - x0[0]
            return c * p * np.sign(d) * np.abs(d) ** (p - 1)
    else:
        def h(x):
            d = np.atleast_2d(np.asarray(x, float)) - x0
            return c * (np.abs(d) ** p).sum(axis=-1)

        def g(x):
            d = np.atleast_2d(np.asarray(x, float)) - x0
            return c * p * np.sign(d) * np.abs(d) ** (p - 1)

    return ConvexProfile(h, g, tuple(domain) if n == 1 else tuple(map(tuple, domain)), f"power{p}")


def poly_profile(coeffs: Sequence[float], domain=(0.0, 1.0)) -> ConvexProfile:
    """h(x) = Σ c_i x^i on an interval."""
    P = np.polynomial.Polynomial(coeffs)
    dP = P.deriv()
    return ConvexProfile(lambda x: P(np.asarray(x, float)), lambda x: dP(np.asarray(x, float)), tuple(domain), "poly")


def quadratic_profile(Q, b=(0.0, 0.0), domain=((0, 0), (1, 0), (0, 1))) -> ConvexProfile:
    """h(x) = ½ xᵀQx + b·x on a polygon, Q positive semidefinite."""
    Q = np.asarray(Q, float)
    bv = np.asarray(b, float)
    if np.linalg.eigvalsh((Q + Q.T) / 2).min() < -1e-12:
        raise ValueError("quadratic profile is not convex")

    def h(x):
        X = np.atleast_2d(np.asarray(x, float))
        return 0.5 * np.einsum("ni,ij,nj->n", X, Q, X) + X @ bv

    def g(x):
        X = np.atleast_2d(np.asarray(x, float))
        return X @ Q.T + bv

    return ConvexProfile(h, g, tuple(map(tuple, domain)), "quadratic")


def table_profile(slopes: Sequence[float], domain=(0.0, 1.0)) -> ConvexProfile:
    """Convex h with h(a) = 0 whose derivative interpolates ``slopes`` linearly on a uniform grid."""
    s = np.asarray(slopes, float)
    if np.any(np.diff(s) < 0):
        raise ValueError("slope table must be nondecreasing for a convex profile")
    a, b = domain
    knots = np.linspace(a, b, len(s))
    cum = np.concatenate([[0.0], np.cumsum((s[1:] + s[:-1]) / 2 * np.diff(knots))])

    def g(x):
        return np.interp(np.asarray(x, float), knots, s)

    def h(x):
        x = np.asarray(x, float)
        i = np.clip(np.searchsorted(knots, x, side="right") - 1, 0, len(knots) - 2)
        dx = x - knots[i]
        slope = (s[i + 1] - s[i]) / (knots[i + 1] - knots[i])
        return cum[i] + s[i] * dx + 0.5 * slope * dx * dx

    return ConvexProfile(h, g, (a, b), "table")


def profile_from_spec(spec: dict) -> ConvexProfile:
    kind = spec.get("kind")
    domain = spec.get("domain", (0.0, 1.0))
    if kind == "power":
        return power_profile(float(spec.get("p", 2.0)), float(spec.get("c", 1.0)), domain, spec.get("center"))
    if kind == "poly":
        return poly_profile(spec["coeffs"], domain)
    if kind == "table":
        return table_profile(spec["slopes"], domain)
    if kind == "quadratic":
        return quadratic_profile(spec["Q"], spec.get("b", (0.0, 0.0)), domain)
    raise ValueError(f"unknown profile kind {kind!r}")


@dataclass(frozen=True)
class FaceCount:
    dim: int
    label: str
    count: int


@dataclass(frozen=True)
class RationalToriCount:
    faces: tuple[FaceCount, ...]

    @property
    def total(self) -> int:
        return sum(f.count for f in self.faces)

    def by_dim(self, d: int) -> int:
        return sum(f.count for f in self.faces if f.dim == d)

    @property
    def interior(self) -> int:
        top = max(f.dim for f in self.faces)
        return self.by_dim(top)


def _open_interval_multiples(g0: float, g1: float, k: int) -> int:
    """#{p ∈ Z : g0 < p/k < g1}; values within 1e-12 of an endpoint belong to the endpoint."""
    lo, hi = min(g0, g1) * k, max(g0, g1) * k
    first = math.floor(lo + _TIE) + 1
    last = math.ceil(hi - _TIE) - 1
    return max(0, last - first + 1)


def _fmt(p) -> str:
    return "(" + ", ".join(f"{float(x):g}" for x in p) + ")"


def _primitive(v) -> np.ndarray:
    v = np.asarray(v)
    iv = np.round(v).astype(np.int64)
    if not np.allclose(v, iv, atol=1e-9):
        raise ValueError("polygon edges must have integer directions")
    g = math.gcd(int(abs(iv[0])), int(abs(iv[1])))
    return iv // g


def rational_tori_count(prof: ConvexProfile, k: int, *, grid: int = 64) -> RationalToriCount:
    """Rational tori of φ^k per face: points w in an open face F with ∇(h|_F)(w) ∈ (1/k)Z^{dim F}.

    Vertices always count once. Edges use the derivative along the
    primitive edge vector, which is monotone by convexity, so the count is
    the number of multiples of 1/k strictly inside its range. Polygon
    interiors test each candidate lattice vector v by minimizing h − v·w
    over the polygon: v is attained in the interior iff the minimizer is
    interior. Values tying with a face boundary go to the smaller face.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    prof.check_convex()
    faces = []
    if prof.n == 1:
        a, b = prof.domain
        faces += [FaceCount(0, f"vertex {a}", 1), FaceCount(0, f"vertex {b}", 1)]
        g0, g1 = float(prof.grad(np.array(a))), float(prof.grad(np.array(b)))
        faces.append(FaceCount(1, f"({a}, {b})", _open_interval_multiples(g0, g1, k)))
        return RationalToriCount(tuple(faces))
    V = np.asarray(prof.domain, float)
    m = len(V)
    for i in range(m):
        faces.append(FaceCount(0, f"vertex {_fmt(V[i])}", 1))
    for i in range(m):
        p, q = V[i], V[(i + 1) % m]
        e = _primitive(q - p)
        T = float(np.linalg.norm(q - p) / np.linalg.norm(e))
        g0 = float(prof.grad(p[None, :])[0] @ e)
        g1 = float(prof.grad((p + T * e)[None, :])[0] @ e)
        faces.append(FaceCount(1, f"edge {_fmt(p)}-{_fmt(q)}", _open_interval_multiples(g0, g1, k)))
    faces.append(FaceCount(2, "interior", _interior_count(prof, V, k, grid)))
    return RationalToriCount(tuple(faces))


def _interior_count(prof: ConvexProfile, V: np.ndarray, k: int, grid: int) -> int:
    from scipy.optimize import LinearConstraint, minimize

    # candidate lattice vectors: the gradient image's bounding box
    t = np.linspace(0, 1, grid + 1)
    W = []
    for i in range(len(V)):
        for s in t:
            W.append(V[0] + s * (V[i] - V[0]))
            W.append(V[i] + s * (V[(i + 1) % len(V)] - V[i]))
    G = prof.grad(np.asarray(W))
    lo = np.floor(G.min(axis=0) * k) - 1
    hi = np.ceil(G.max(axis=0) * k) + 1
    # half-planes a·w <= c of the polygon (counterclockwise)
    A, c = [], []
    for i in range(len(V)):
        p, q = V[i], V[(i + 1) % len(V)]
        nrm = np.array([q[1] - p[1], -(q[0] - p[0])])
        A.append(nrm)
        c.append(nrm @ p)
    A, c = np.asarray(A), np.asarray(c)
    scale = np.abs(A).sum(axis=1)
    cons = LinearConstraint(A, -np.inf, c)
    w0 = V.mean(axis=0)
    count = 0
    for p1 in range(int(lo[0]), int(hi[0]) + 1):
        for p2 in range(int(lo[1]), int(hi[1]) + 1):
            v = np.array([p1, p2]) / k
            res = minimize(lambda w: float(prof.h(w[None, :])[0] - v @ w), w0,
                           jac=lambda w: prof.grad(w[None, :])[0] - v,
                           constraints=[cons], method="trust-constr",
                           options={"gtol": 1e-12, "xtol": 1e-14, "maxiter": 2000})
            w = res.x
            slack = (c - A @ w) / scale
            if slack.min() > 1e-7 and np.linalg.norm(prof.grad(w[None, :])[0] - v) < 1e-6:
                count += 1
    return count


def fixed_point_bound(prof: ConvexProfile, k: int) -> int:
    """Σ over faces of 2^dim(F) times the rational tori count: fixed points after a Morse–Bott split."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    r = rational_tori_count(prof, k)
    return sum((2 ** f.dim) * f.count for f in r.faces)


# ---------------------------------------------------------------------------
# semi-admissible radial profiles


@dataclass
class SemiAdmissibleProfile:
    """h on [1, r_max] with h(1) = 0, h' >= 0, h'' >= 0, continued linearly with slope h'(r_max)."""

    h0: Callable[[float], float]
    dh0: Callable[[float], float]
    r_max: float
    name: str = "semi-admissible"

    @property
    def slope(self) -> float:
        return float(self.dh0(self.r_max))

    def h(self, r: float) -> float:
        if r <= self.r_max:
            return float(self.h0(r))
        return float(self.h0(self.r_max) + self.slope * (r - self.r_max))

    def dh(self, r: float) -> float:
        return float(self.dh0(min(r, self.r_max)))

    def action(self, r: float) -> float:
        """A_h(r) = r h'(r) − h(r)."""
        return r * self.dh(r) - self.h(r)

    def check(self, resolution: int = 10_000, tol: float = 1e-12) -> None:
        if abs(self.h(1.0)) > 1e-12:
            raise ValueError("h(1) must vanish")
        r = np.linspace(1.0, self.r_max, resolution + 1)
        d = np.array([self.dh(x) for x in r])
        if np.any(d < -tol) or np.any(np.diff(d) < -tol):
            raise ValueError("h' must be nonnegative and nondecreasing")
        A = np.array([self.action(x) for x in r])
        if np.any(np.diff(A) < -1e-9):
            raise ValueError("action function is not monotone")


def semi_admissible_power(p: float = 2.0, c: float = 1.0, r_max: float = 2.0) -> SemiAdmissibleProfile:
    if p <= 1:
        raise ValueError("need p > 1 for h'(1) = 0 and convexity")
    return SemiAdmissibleProfile(lambda r: c * (r - 1) ** p, lambda r: c * p * (r - 1) ** (p - 1), r_max, f"c(r-1)^{p}")


def reeb_orbit_level(prof: SemiAdmissibleProfile, T: float, tol: float = 1e-12) -> tuple[float, float]:
    """Solve h'(r_*) = T by bisection; return (r_*, A_h(r_*))."""
    if not 0 < T < prof.slope:
        raise ValueError("no orbit level: T must lie strictly between 0 and the slope")
    lo, hi = 1.0, prof.r_max
    a_lo = prof.action(lo)
    while hi - lo > tol * max(1.0, hi):
        mid = (lo + hi) / 2
        if prof.dh(mid) < T:
            lo = mid
        else:
            hi = mid
        a_mid = prof.action(lo)
        if a_mid < a_lo - 1e-12:
            raise ValueError("action function decreases along the bisection")
        a_lo = a_mid
    r = (lo + hi) / 2
    delta = max(1e-6, 1e3 * tol)
    if prof.dh(min(r + delta, prof.r_max)) - prof.dh(max(r - delta, 1.0)) <= 0:
        raise ValueError("h' is not strictly increasing at the orbit level")
    return r, prof.action(r)


# ---------------------------------------------------------------------------
# ellipsoids


@dataclass(frozen=True)
class EllipsoidSpec:
    a: tuple[float, ...]

    def __init__(self, a: Sequence[float]):
        vals = tuple(float(x) for x in a)
        if not vals or any(not x > 0 for x in vals):
            raise ValueError("ellipsoid parameters must be positive")
        object.__setattr__(self, "a", vals)

    @property
    def rationally_independent(self) -> bool:
        """No ratio a_i/a_j is a fraction with denominator <= 10^6 (to 1e-14)."""
        for i in range(len(self.a)):
            for j in range(i + 1, len(self.a)):
                r = self.a[i] / self.a[j]
                f = Fraction(r).limit_denominator(10 ** 6)
                if abs(r - f) < 1e-14 * max(1.0, r):
                    return False
        return True


def ellipsoid_spectrum(e: EllipsoidSpec, s: float) -> tuple[list[float], int]:
    """Sorted Reeb periods m·a_i <= s (m >= 1) and the generator count Σ_i floor(s/a_i)."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    acts = []
    count = 0
    for a in e.a:
        m = int(math.floor(s / a))
        count += m
        acts.extend(a * j for j in range(1, m + 1))
    return sorted(acts), count


def ellipsoid_count_series(e: EllipsoidSpec, s_grid: Sequence[float]) -> GrowthSeries:
    return GrowthSeries(s_grid, [sum(math.floor(s / a) for a in e.a) for s in s_grid])


def ellipsoid_generator_bound(e: EllipsoidSpec, s_grid: Sequence[float]) -> GrowthSeries:
    """2 × count: every Reeb orbit contributes two generators, bounding b_ε(s) for every ε."""
    c = ellipsoid_count_series(e, s_grid)
    return GrowthSeries(c.index, [2 * x for x in c.counts])


def linear_slope(series: GrowthSeries) -> float:
    x, y = series.as_arrays()
    return float(np.polyfit(x, y, 1)[0])


# ---------------------------------------------------------------------------
# flat torus loop space


@dataclass(frozen=True)
class LatticeBasis:
    v1: tuple[float, float]
    v2: tuple[float, float]

    def __init__(self, v1, v2):
        a = tuple(float(x) for x in v1)
        b = tuple(float(x) for x in v2)
        if abs(a[0] * b[1] - a[1] * b[0]) <= 0:
            raise ValueError("lattice vectors must be linearly independent")
        object.__setattr__(self, "v1", a)
        object.__setattr__(self, "v2", b)

    @property
    def gram(self) -> tuple[float, float, float]:
        a = self.v1[0] ** 2 + self.v1[1] ** 2
        b = self.v1[0] * self.v2[0] + self.v1[1] * self.v2[1]
        c = self.v2[0] ** 2 + self.v2[1] ** 2
        return a, b, c

    @property
    def covolume(self) -> float:
        return abs(self.v1[0] * self.v2[1] - self.v1[1] * self.v2[0])


def lattice_energies(b: LatticeBasis, s: float) -> list[tuple[int, int, float]]:
    """Nonzero classes (m, n) with energy |m v1 + n v2|² < s, row by row in n."""
    A, B, C = b.gram
    det = A * C - B * B
    out = []
    if s <= 0:
        return out
    n_max = int(math.floor(math.sqrt(s * A / det))) + 1
    for n in range(-n_max, n_max + 1):
        # A m² + 2 B n m + C n² < s
        disc = B * B * n * n - A * (C * n * n - s)
        if disc < 0:
            continue
        r = math.sqrt(disc)
        m_lo = math.ceil((-B * n - r) / A) - 1
        m_hi = math.floor((-B * n + r) / A) + 1
        for m in range(m_lo, m_hi + 1):
            if m == 0 and n == 0:
                continue
            E = A * m * m + 2 * B * m * n + C * n * n
            if E < s:
                out.append((m, n, E))
    return out


def lattice_count(b: LatticeBasis, s: float) -> int:
    return len(lattice_energies(b, s))


TRIVIAL_CLASS_BARS = ((0, 1), (1, 2), (2, 1))  # (degree, multiplicity): homology of the torus of constant loops


def flat_torus_loop_barcode(b: LatticeBasis, s: float) -> Barcode:
    """Infinite bars of the energy filtration on the loop space of R²/Λ below level s.

    Each nonzero class contributes a circle of closed geodesics of energy
    ℓ², hence bars in degrees 0 and 1 born at ℓ²; constant loops contribute
    the homology of the torus at 0.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    bars = []
    if s > 0:
        bars += [Bar(0.0, INF, mult, deg) for deg, mult in TRIVIAL_CLASS_BARS]
    for _, _, E in lattice_energies(b, s):
        bars.append(Bar(E, INF, 1, 0))
        bars.append(Bar(E, INF, 1, 1))
    return Barcode(bars)


def flat_torus_count_series(b: LatticeBasis, s_grid: Sequence[float]) -> GrowthSeries:
    """b_∞(s) = 2·(lattice count) + 4 on a grid, from one sorted enumeration."""
    s_grid = list(s_grid)
    E = np.sort([e for _, _, e in lattice_energies(b, max(s_grid))])
    trivial = sum(m for _, m in TRIVIAL_CLASS_BARS)
    counts = [(2 * int(np.searchsorted(E, s, side="left")) + trivial) if s > 0 else 0 for s in s_grid]
    return GrowthSeries(s_grid, counts)


def toric_bound_check(counts: GrowthSeries, n: float, *, margin: float = 0.05) -> BoundCertificate:
    """Polynomial certificate count(x) <= C_n x^n + C_0 for a toric model series."""
    return certify_polynomial_bound(counts, n, margin=margin)
