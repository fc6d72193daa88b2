"""Tomographs, intersection counting and Crofton's inequality/formula in dimension 2.

Curves are polylines in lifted coordinates of a model space: the plane,
the flat torus R²/Z², or the cylinder T*S¹ = (R/2πZ) × R with coordinates
(θ, p). A closed curve repeats its first point (mod periods) at the end.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial import cKDTree

TWO_PI = 2 * math.pi
PERIODS = {"plane": (None, None), "torus": (1.0, 1.0), "cylinder": (TWO_PI, None)}


class NonTransverse(ValueError):
    pass


def _as_polyline(a) -> np.ndarray:
    P = np.asarray(a, float)
    if P.ndim != 2 or P.shape[1] != 2 or len(P) < 2:
        raise ValueError("polyline must be an (n >= 2, 2) array")
    return P


def polyline_length(a) -> float:
    P = _as_polyline(a)
    return float(np.sqrt((np.diff(P, axis=0) ** 2).sum(axis=1)).sum())


def _subdivide(P: np.ndarray, max_len: float) -> np.ndarray:
    seg = np.sqrt((np.diff(P, axis=0) ** 2).sum(axis=1))
    pieces = np.maximum(1, np.ceil(seg / max_len).astype(int))
    if np.all(pieces == 1):
        return P
    out = [P[:1]]
    for i, m in enumerate(pieces):
        t = np.arange(1, m + 1)[:, None] / m
        out.append(P[i] + t * (P[i + 1] - P[i]))
    return np.vstack(out)


def _orient(px, py, qx, qy, rx, ry):
    return (qx - px) * (ry - py) - (qy - py) * (rx - px)


def _pair_crossings(a0, a1, b0, b1) -> np.ndarray:
    """Vectorized crossing test for segment arrays (k, 2).

    Zero orientations count as positive, a fixed symbolic perturbation:
    contacts at vertices and tangencies are resolved as if the second
    curve were pushed slightly to the left of each first-curve segment,
    so a polyline through a vertex is counted consistently.
    """
    o1 = _orient(a0[:, 0], a0[:, 1], a1[:, 0], a1[:, 1], b0[:, 0], b0[:, 1]) >= 0
    o2 = _orient(a0[:, 0], a0[:, 1], a1[:, 0], a1[:, 1], b1[:, 0], b1[:, 1]) >= 0
    o3 = _orient(b0[:, 0], b0[:, 1], b1[:, 0], b1[:, 1], a0[:, 0], a0[:, 1]) >= 0
    o4 = _orient(b0[:, 0], b0[:, 1], b1[:, 0], b1[:, 1], a1[:, 0], a1[:, 1]) >= 0
    return (o1 != o2) & (o3 != o4)


def _collinear_overlap(a0, a1, b0, b1) -> np.ndarray:
    z1 = _orient(a0[:, 0], a0[:, 1], a1[:, 0], a1[:, 1], b0[:, 0], b0[:, 1]) == 0
    z2 = _orient(a0[:, 0], a0[:, 1], a1[:, 0], a1[:, 1], b1[:, 0], b1[:, 1]) == 0
    col = z1 & z2
    if not col.any():
        return col
    d = a1 - a0
    t0 = ((b0 - a0) * d).sum(axis=1)
    t1 = ((b1 - a0) * d).sum(axis=1)
    dd = (d * d).sum(axis=1)
    lo, hi = np.minimum(t0, t1), np.maximum(t0, t1)
    return col & (np.minimum(hi, dd) - np.maximum(lo, 0.0) > 0)


def _segments(P: np.ndarray, space: str) -> tuple[np.ndarray, np.ndarray]:
    """Segment endpoints, translated so each start lies in the fundamental domain."""
    s0, s1 = P[:-1].copy(), P[1:].copy()
    for axis, per in enumerate(PERIODS[space]):
        if per is not None:
            shift = np.floor(s0[:, axis] / per) * per
            s0[:, axis] -= shift
            s1[:, axis] -= shift
    return s0, s1


def curve_intersections(a, b, space: str = "plane") -> int:
    """Number of intersection points of two polylines in the model space.

    Candidate segment pairs come from a kd-tree on segment midpoints (with
    periodic boxes where the space wraps); each pair is then tested
    exactly with orientation predicates. Collinear overlaps raise
    NonTransverse.
    """
    if space not in PERIODS:
        raise ValueError(f"unknown model space {space!r}")
    A, B = _as_polyline(a), _as_polyline(b)
    pers = PERIODS[space]
    if any(p is not None for p in pers):
        cap = min(p for p in pers if p is not None) / 4
        A, B = _subdivide(A, cap), _subdivide(B, cap)
    a0, a1 = _segments(A, space)
    b0, b1 = _segments(B, space)
    la = np.sqrt(((a1 - a0) ** 2).sum(axis=1))
    lb = np.sqrt(((b1 - b0) ** 2).sum(axis=1))
    ma, mb = (a0 + a1) / 2, (b0 + b1) / 2
    box, off = _box(ma, mb, pers)
    ta = cKDTree(_wrap_box(ma - off, box), boxsize=box)
    tb = cKDTree(_wrap_box(mb - off, box), boxsize=box)
    radius = (la.max() + lb.max()) / 2 * (1 + 1e-9) + 1e-12
    pairs = ta.query_ball_tree(tb, radius)
    ii = np.fromiter((i for i, js in enumerate(pairs) for _ in js), dtype=np.intp)
    jj = np.fromiter((j for js in pairs for j in js), dtype=np.intp)
    if len(ii) == 0:
        return 0
    # move each b segment to the periodic image nearest its partner
    shift = np.zeros((len(ii), 2))
    for axis, per in enumerate(pers):
        if per is not None:
            shift[:, axis] = np.round((ma[ii, axis] - mb[jj, axis]) / per) * per
    A0, A1, B0, B1 = a0[ii], a1[ii], b0[jj] + shift, b1[jj] + shift
    if _collinear_overlap(A0, A1, B0, B1).any():
        raise NonTransverse("non-transverse family member")
    return int(_pair_crossings(A0, A1, B0, B1).sum())


def _box(ma, mb, pers):
    lo = np.minimum(ma.min(axis=0), mb.min(axis=0))
    hi = np.maximum(ma.max(axis=0), mb.max(axis=0))
    box, off = np.empty(2), np.empty(2)
    for axis, per in enumerate(pers):
        if per is None:
            off[axis] = lo[axis] - 1.0
            box[axis] = 2 * (hi[axis] - lo[axis]) + 4.0
        else:
            off[axis] = 0.0
            box[axis] = per
    return box, off


def _wrap_box(x, box):
    y = np.mod(x, box)
    y[y >= box] = 0.0
    return y


def brute_force_intersections(a, b, space: str = "plane") -> int:
    """All-pairs O(nm) count over every relevant periodic image."""
    A, B = _as_polyline(a), _as_polyline(b)
    pers = PERIODS[space]
    if any(p is not None for p in pers):
        cap = min(p for p in pers if p is not None) / 4
        A, B = _subdivide(A, cap), _subdivide(B, cap)
    a0, a1 = _segments(A, space)
    b0, b1 = _segments(B, space)
    ranges = [range(-1, 2) if p is not None else range(0, 1) for p in pers]
    total = 0
    for i in range(len(a0)):
        for nx in ranges[0]:
            for ny in ranges[1]:
                s = np.array([nx * (pers[0] or 0), ny * (pers[1] or 0)])
                B0, B1 = b0 + s, b1 + s
                A0 = np.repeat(a0[i:i + 1], len(B0), axis=0)
                A1 = np.repeat(a1[i:i + 1], len(B0), axis=0)
                if _collinear_overlap(A0, A1, B0, B1).any():
                    raise NonTransverse("non-transverse family member")
                total += int(_pair_crossings(A0, A1, B0, B1).sum())
    return total


# ---------------------------------------------------------------------------
# tomographs


@dataclass(frozen=True)
class ParamDomain:
    """Uniform measure dξ on a ball of a given radius or on an axis box."""

    dim: int
    radius: float | None = None
    bounds: tuple[tuple[float, float], ...] | None = None

    @property
    def volume(self) -> float:
        if self.bounds is not None:
            return float(np.prod([hi - lo for lo, hi in self.bounds]))
        r = self.radius
        return math.pi ** (self.dim / 2) / math.gamma(self.dim / 2 + 1) * r ** self.dim

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.bounds is not None:
            lo = np.array([b[0] for b in self.bounds])
            hi = np.array([b[1] for b in self.bounds])
            return lo + rng.random((n, self.dim)) * (hi - lo)
        g = rng.standard_normal((n, self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return g * (self.radius * rng.random((n, 1)) ** (1.0 / self.dim))

    @property
    def center(self) -> np.ndarray:
        if self.bounds is not None:
            return np.array([(lo + hi) / 2 for lo, hi in self.bounds])
        return np.zeros(self.dim)


@dataclass
class Tomograph:
    """Family ξ ↦ L_ξ of embedded curves over a parameter domain."""

    name: str
    space: str
    domain: ParamDomain
    curve: Callable[[np.ndarray], np.ndarray]
    window: tuple[tuple[float, float], tuple[float, float]]
    fast_count: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]] | None = None
    spec: dict = field(default_factory=dict)

    @property
    def core(self) -> np.ndarray:
        return self.curve(self.domain.center)

    def count(self, xis: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """N(ξ) per row of ``xis`` and a flag for non-transverse members."""
        if self.fast_count is not None:
            return self.fast_count(xis, target)
        n = np.zeros(len(xis), dtype=np.int64)
        bad = np.zeros(len(xis), dtype=bool)
        for i, xi in enumerate(xis):
            try:
                n[i] = curve_intersections(self.curve(xi), target, self.space)
            except NonTransverse:
                bad[i] = True
        return n, bad


def line_tomograph(p_max: float = 2.0, half_length: float = 10.0) -> Tomograph:
    """Lines {x : x·(cos θ, sin θ) = p}, p ∈ [−p_max, p_max], θ ∈ [0, π)."""

    def curve(xi):
        p, th = float(xi[0]), float(xi[1])
        n = np.array([math.cos(th), math.sin(th)])
        t = np.array([-n[1], n[0]])
        return np.array([p * n - half_length * t, p * n + half_length * t])

    def fast(xis, target):
        P = _as_polyline(target)
        if np.abs(P).max() >= half_length:
            raise ValueError("target leaves the region the line segments cover")
        n = np.zeros(len(xis), dtype=np.int64)
        bad = np.zeros(len(xis), dtype=bool)
        for lo in range(0, len(xis), 8192):
            xs = xis[lo:lo + 8192]
            h = np.cos(xs[:, 1:2]) * P[None, :, 0] + np.sin(xs[:, 1:2]) * P[None, :, 1] - xs[:, 0:1]
            s = h >= 0
            n[lo:lo + 8192] = (s[:, 1:] != s[:, :-1]).sum(axis=1)
            zero = h == 0
            bad[lo:lo + 8192] = (zero[:, 1:] & zero[:, :-1]).any(axis=1)
        return n, bad

    w = p_max * 1.25
    return Tomograph("lines", "plane", ParamDomain(2, bounds=((-p_max, p_max), (0.0, math.pi))), curve, ((-w, w), (-w, w)), fast, {"kind": "lines", "p_max": p_max})


def translation_tomograph(core, radius: float, along=None) -> Tomograph:
    """L_ξ = L_0 + ξ on the flat torus, ξ in a disk (or a 1-D ball along ``along``)."""
    L0 = _as_polyline(core)
    if along is None:
        dom = ParamDomain(2, radius=radius)

        def curve(xi):
            return L0 + np.asarray(xi, float)[None, :]
    else:
        v = np.asarray(along, float)
        v = v / np.linalg.norm(v)
        dom = ParamDomain(1, radius=radius)

        def curve(xi):
            return L0 + float(xi[0]) * v[None, :]

    spec = {"kind": "translation", "radius": radius, "core": L0.tolist()}
    if along is not None:
        spec["along"] = list(map(float, along))
    return Tomograph("translation", "torus", dom, curve, ((0.0, 1.0), (0.0, 1.0)), None, spec)


def _trig_basis(d: int):
    """g_j and g_j' for the coefficient functions cos θ, sin θ, cos 2θ, sin 2θ, ..."""

    def deriv(theta):
        cols = []
        for j in range(d):
            m = j // 2 + 1
            cols.append(-m * np.sin(m * theta) if j % 2 == 0 else m * np.cos(m * theta))
        return np.stack(cols, axis=-1)

    return deriv


def cylinder_graph_tomograph(d: int, radius: float, n_theta: int = 256) -> Tomograph:
    """Graphs θ ↦ f_ξ'(θ) in T*S¹ with f_ξ = Σ ξ_j g_j, ξ in a d-ball.

    The first two coefficient functions are the coordinates of the
    standard immersion S¹ → R², which makes (ξ, θ) ↦ (θ, f_ξ'(θ)) a
    submersion.
    """
    if d < 2:
        raise ValueError("need at least 2 coefficients for a submersion")
    deriv = _trig_basis(d)
    theta = np.linspace(0.0, TWO_PI, n_theta + 1)
    G = deriv(theta)

    def curve(xi):
        return np.column_stack([theta, G @ np.asarray(xi, float)])

    def fast(xis, target):
        P = _as_polyline(target)
        if len(P) == len(theta) and np.allclose(P[:, 0], theta):
            diff = xis @ G.T - P[None, :, 1]
            s = diff >= 0
            n = (s[:, 1:] != s[:, :-1]).sum(axis=1)
            zero = diff == 0
            return n.astype(np.int64), (zero[:, 1:] & zero[:, :-1]).any(axis=1)
        out = np.zeros(len(xis), dtype=np.int64)
        bad = np.zeros(len(xis), dtype=bool)
        for i, xi in enumerate(xis):
            try:
                out[i] = curve_intersections(curve(xi), P, "cylinder")
            except NonTransverse:
                bad[i] = True
        return out, bad

    bound = radius * float(np.sqrt((G ** 2).sum(axis=1)).max()) * 1.05
    spec = {"kind": "cylinder", "d": d, "radius": radius, "n_theta": n_theta}
    return Tomograph("cylinder-graphs", "cylinder", ParamDomain(d, radius=radius), curve, ((0.0, TWO_PI), (-bound, bound)), fast, spec)


def cylinder_graph(fn: Callable[[np.ndarray], np.ndarray], n_theta: int = 256) -> np.ndarray:
    theta = np.linspace(0.0, TWO_PI, n_theta + 1)
    return np.column_stack([theta, fn(theta)])


def submersion_rate(t: Tomograph, rng: np.random.Generator, n: int = 200, h: float = 1e-6, tol: float = 1e-8) -> float:
    """Fraction of sampled (ξ, vertex) points where DΨ has full rank 2."""
    ok = total = 0
    for xi in t.domain.sample(rng, n):
        C = t.curve(xi)
        k = int(rng.integers(0, len(C) - 1))
        cols = [C[k + 1] - C[k]]
        for j in range(t.domain.dim):
            e = np.zeros(t.domain.dim)
            e[j] = h
            cols.append((t.curve(xi + e)[k] - C[k]) / h)
        sv = np.linalg.svd(np.column_stack(cols), compute_uv=False)
        ok += sv[-1 if len(sv) < 2 else 1] > tol
        total += 1
    return ok / total


# ---------------------------------------------------------------------------
# Crofton's inequality and formula


@dataclass(frozen=True)
class CroftonResult:
    integral: float
    stderr: float
    const: float
    volume: float
    passed: bool
    n_samples: int
    non_transverse: int

    def as_dict(self) -> dict:
        return {"integral": self.integral, "stderr": self.stderr, "const": self.const, "volume": self.volume, "pass": self.passed}


def _shard_sizes(samples: int, shards: int) -> list[int]:
    base, extra = divmod(samples, shards)
    return [base + (i < extra) for i in range(shards)]


def mc_integral(t: Tomograph, target, samples: int, seed=0, *, shards: int = 16, workers: int = 1) -> tuple[float, float, int]:
    """Monte Carlo ∫_B N dξ with its standard error.

    Shards draw from independent child seeds and are summed in shard
    order, so the result does not depend on ``workers``.
    """
    if samples < 1000:
        raise ValueError("need at least 10^3 samples")
    P = _as_polyline(target)
    children = np.random.SeedSequence(_entropy(seed)).spawn(shards)
    sizes = _shard_sizes(samples, shards)

    def run(i):
        rng = np.random.default_rng(children[i])
        xis = t.domain.sample(rng, sizes[i])
        n, bad = t.count(xis, P)
        return n, bad

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(run, range(shards)))
    else:
        parts = [run(i) for i in range(shards)]
    n = np.concatenate([p[0] for p in parts])
    bad = np.concatenate([p[1] for p in parts])
    n_bad = int(bad.sum())
    if n_bad > 0.01 * samples:
        raise NonTransverse(f"{n_bad} of {samples} sampled family members are not transverse to the target")
    good = n[~bad].astype(float)
    vol = t.domain.volume
    return float(vol * good.mean()), float(vol * good.std(ddof=1) / math.sqrt(len(good))), n_bad


def _entropy(seed) -> int:
    if isinstance(seed, np.random.SeedSequence):
        return seed.entropy
    return int(seed)


@dataclass
class Density2D:
    """Binned 1-density d(y, v) = |v| · value(bin of y, direction of v).

    Directions are unoriented angles in [0, π); values are interpolated
    linearly in angle and constant over each spatial bin.
    """

    xedges: np.ndarray
    yedges: np.ndarray
    values: np.ndarray  # (nx, ny, ndir)
    stderr: np.ndarray
    covered: np.ndarray  # (nx, ny) bool
    periodic: tuple[float | None, float | None] = (None, None)

    @property
    def n_dir(self) -> int:
        return self.values.shape[2]

    def _bin(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        pts = np.array(pts, float, copy=True).reshape(-1, 2)
        for axis, per in enumerate(self.periodic):
            if per is not None:
                pts[:, axis] = np.mod(pts[:, axis], per)
        ix = np.searchsorted(self.xedges, pts[:, 0], side="right") - 1
        iy = np.searchsorted(self.yedges, pts[:, 1], side="right") - 1
        inside = (ix >= 0) & (ix < len(self.xedges) - 1) & (iy >= 0) & (iy < len(self.yedges) - 1)
        return np.clip(ix, 0, len(self.xedges) - 2), np.clip(iy, 0, len(self.yedges) - 2), inside

    def _dir_weights(self, v: np.ndarray):
        ang = np.mod(np.arctan2(v[:, 1], v[:, 0]), math.pi)
        pos = ang / (math.pi / self.n_dir) - 0.5
        j0 = np.floor(pos).astype(int)
        w1 = pos - j0
        return np.mod(j0, self.n_dir), np.mod(j0 + 1, self.n_dir), w1

    def _lookup(self, arr, pts, vecs):
        v = np.asarray(vecs, float).reshape(-1, 2)
        ix, iy, inside = self._bin(pts)
        j0, j1, w1 = self._dir_weights(v)
        val = (1 - w1) * arr[ix, iy, j0] + w1 * arr[ix, iy, j1]
        return np.where(inside, val * np.linalg.norm(v, axis=1), 0.0)

    def __call__(self, pts, vecs) -> np.ndarray:
        return self._lookup(self.values, pts, vecs)

    def integrate(self, curve, max_step: float | None = None) -> tuple[float, float]:
        """∫_curve d by midpoint quadrature on pieces no longer than a bin, with a standard error."""
        P = _as_polyline(curve)
        step = max_step or 0.25 * min(np.diff(self.xedges).min(), np.diff(self.yedges).min())
        P = _subdivide(P, step)
        mids = (P[:-1] + P[1:]) / 2
        vecs = np.diff(P, axis=0)
        val = float(self(mids, vecs).sum())
        # per-bin errors are independent; pieces sharing a bin add coherently
        err_contrib = self._lookup(self.stderr, mids, vecs)
        ix, iy, _ = self._bin(mids)
        key = ix * (len(self.yedges) + 1) + iy
        per_bin = np.bincount(np.unique(key, return_inverse=True)[1], weights=err_contrib)
        return val, float(np.sqrt((per_bin ** 2).sum()))

    def max_value(self, z: float = 3.0) -> float:
        """Upper estimate of sup d over unit vectors: max over bins of value + z·stderr."""
        m = (self.values + z * self.stderr)[self.covered]
        return float(m.max()) if m.size else 0.0


def pushforward_density(t: Tomograph, resolution: int = 40, n_dir: int = 24, samples: int = 20000, points_per_curve: int = 200, seed=0, *, shards: int = 8) -> Density2D:
    """Estimate the push-forward density Ψ_* π^* dξ on bins of the tomograph window.

    A curve element of length ds and unit tangent τ at y contributes
    |τ × u| ds dξ to the density at y in direction u; sampling ξ from dξ
    and points uniformly by arclength on L_ξ makes this a Monte Carlo sum.
    Shards give the per-bin standard errors.
    """
    (x0, x1), (y0, y1) = t.window
    xe = np.linspace(x0, x1, resolution + 1)
    ye = np.linspace(y0, y1, resolution + 1)
    nx = ny = resolution
    area = (xe[1] - xe[0]) * (ye[1] - ye[0])
    dirs = (np.arange(n_dir) + 0.5) * math.pi / n_dir
    U = np.column_stack([np.cos(dirs), np.sin(dirs)])
    pers = PERIODS[t.space]
    vol = t.domain.volume
    children = np.random.SeedSequence(_entropy(seed)).spawn(shards)
    sizes = _shard_sizes(samples, shards)
    acc = np.zeros((shards, nx, ny, n_dir))
    hits = np.zeros((nx, ny), dtype=np.int64)
    if vol == 0:
        z = np.zeros((nx, ny, n_dir))
        return Density2D(xe, ye, z, z.copy(), np.ones((nx, ny), bool), pers)
    for s in range(shards):
        rng = np.random.default_rng(children[s])
        xis = t.domain.sample(rng, sizes[s])
        for xi in xis:
            C = t.curve(xi)
            seg = np.diff(C, axis=0)
            ln = np.sqrt((seg ** 2).sum(axis=1))
            total = ln.sum()
            if total == 0:
                continue
            k = rng.choice(len(seg), size=points_per_curve, p=ln / total)
            u = rng.random(points_per_curve)
            pts = C[k] + u[:, None] * seg[k]
            tau = seg[k] / ln[k, None]
            for axis, per in enumerate(pers):
                if per is not None:
                    pts[:, axis] = np.mod(pts[:, axis], per)
            ix = np.searchsorted(xe, pts[:, 0], side="right") - 1
            iy = np.searchsorted(ye, pts[:, 1], side="right") - 1
            ok = (ix >= 0) & (ix < nx) & (iy >= 0) & (iy < ny)
            if not ok.any():
                continue
            w = np.abs(tau[ok, 0:1] * U[None, :, 1] - tau[ok, 1:2] * U[None, :, 0]) * (total / points_per_curve)
            np.add.at(acc[s], (ix[ok], iy[ok]), w)
            np.add.at(hits, (ix[ok], iy[ok]), 1)
    per_shard = acc * (vol / np.array(sizes)[:, None, None, None]) / area
    values = per_shard.mean(axis=0)
    stderr = per_shard.std(axis=0, ddof=1) / math.sqrt(shards) if shards > 1 else np.zeros_like(values)
    return Density2D(xe, ye, values, stderr, hits > 0, pers)


def crofton_mc(t: Tomograph, target, samples: int = 100_000, seed=0, *, density: Density2D | None = None, workers: int = 1) -> CroftonResult:
    """Check ∫_B N dξ <= const · length(target) with const computed from the tomograph.

    The constant is the maximum of the binned push-forward density over
    points and unit directions (plus three standard errors); the coarea
    argument bounds the integral by this maximum times the target length.
    The inequality is accepted when it holds within three standard
    errors of the Monte Carlo integral.
    """
    integral, se, bad = mc_integral(t, target, samples, seed, workers=workers)
    if density is None:
        density = pushforward_density(t, seed=_entropy(seed) + 1)
    const = density.max_value()
    vol = polyline_length(target)
    passed = integral <= const * vol + 3 * se
    return CroftonResult(integral, se, const, vol, bool(passed), samples, bad)


@dataclass(frozen=True)
class CroftonFormulaCheck:
    mc: float
    mc_stderr: float
    density_integral: float
    density_stderr: float

    @property
    def combined_stderr(self) -> float:
        return math.hypot(self.mc_stderr, self.density_stderr)

    @property
    def z(self) -> float:
        s = self.combined_stderr
        return abs(self.mc - self.density_integral) / s if s > 0 else (0.0 if self.mc == self.density_integral else math.inf)

    def passed(self, z_max: float = 3.0) -> bool:
        return self.z <= z_max


def crofton_formula_check(t: Tomograph, target, samples: int = 100_000, seed=0, density: Density2D | None = None) -> CroftonFormulaCheck:
    integral, se, _ = mc_integral(t, target, samples, seed)
    if density is None:
        density = pushforward_density(t, seed=_entropy(seed) + 1)
    di, dse = density.integrate(target)
    return CroftonFormulaCheck(integral, se, di, dse)


def unit_circle(n: int = 512, radius: float = 1.0, center=(0.0, 0.0)) -> np.ndarray:
    th = np.linspace(0.0, TWO_PI, n + 1)
    th[-1] = 0.0
    return np.column_stack([center[0] + radius * np.cos(th), center[1] + radius * np.sin(th)])


def tomograph_from_spec(spec: dict) -> Tomograph:
    kind = spec.get("kind")
    if kind == "lines":
        return line_tomograph(float(spec.get("p_max", 2.0)))
    if kind == "translation":
        return translation_tomograph(spec["core"], float(spec["radius"]), spec.get("along"))
    if kind == "cylinder":
        return cylinder_graph_tomograph(int(spec.get("d", 2)), float(spec.get("radius", 1.0)), int(spec.get("n_theta", 256)))
    raise ValueError(f"unknown tomograph kind {kind!r}")
