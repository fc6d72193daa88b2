"""Filtered complexes over F2, their barcodes, and barcode statistics.

Two routes to a barcode are provided and kept independent:
``reduce_filtered_complex`` (column reduction) and ``module_barcode``
(rank formula on the sampled homology module, via ``barcode_multiplicity``).
"""
from __future__ import annotations

import bisect
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from . import f2

INF = math.inf


class ComplexError(ValueError):
    """Invalid filtered complex; the message names the offending generator."""


@dataclass(frozen=True, order=True)
class Bar:
    start: float
    end: float
    multiplicity: int = 1
    degree: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError(f"empty bar ({self.start}, {self.end}]")
        if self.start < 0:
            raise ValueError(f"bar start {self.start} below 0")
        if self.multiplicity < 1:
            raise ValueError("bar multiplicity must be positive")

    @property
    def length(self) -> float:
        return self.end - self.start

    @property
    def finite(self) -> bool:
        return self.end != INF


class Barcode:
    """Multiset of bars. Bars with equal (start, end, degree) are merged."""

    def __init__(self, bars: Iterable[Bar] = ()):
        counts: Counter = Counter()
        for b in bars:
            counts[(b.start, b.end, b.degree)] += b.multiplicity
        key = lambda t: (t[0], t[1], -1 if t[2] is None else t[2])
        self.bars: tuple[Bar, ...] = tuple(
            Bar(s, e, m, d) for (s, e, d), m in sorted(counts.items(), key=lambda kv: key(kv[0]))
        )

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "Barcode":
        return cls(Bar(float(a), float(b)) for a, b in pairs)

    @property
    def spectrum(self) -> list[float]:
        pts = set()
        for b in self.bars:
            pts.add(b.start)
            if b.finite:
                pts.add(b.end)
        return sorted(pts)

    def intervals(self) -> Counter:
        """(start, end) -> multiplicity, degrees forgotten."""
        c: Counter = Counter()
        for b in self.bars:
            c[(b.start, b.end)] += b.multiplicity
        return c

    def expanded(self) -> list[tuple[float, float]]:
        out = []
        for b in self.bars:
            out.extend([(b.start, b.end)] * b.multiplicity)
        return out

    def lengths(self) -> list[float]:
        return [e - s for s, e in self.expanded()]

    def __len__(self) -> int:
        return sum(b.multiplicity for b in self.bars)

    def __eq__(self, other) -> bool:
        return isinstance(other, Barcode) and self.intervals() == other.intervals()

    def __repr__(self) -> str:
        inner = ", ".join(
            f"({b.start:g}, {'inf' if not b.finite else format(b.end, 'g')}]"
            + (f"x{b.multiplicity}" if b.multiplicity > 1 else "")
            for b in self.bars
        )
        return f"Barcode[{inner}]"


def barcode_function(b: Barcode, eps: float, s: float = INF) -> int:
    """Number of bars (a, e] with a < s and e - a > eps, with multiplicity."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    return sum(bar.multiplicity for bar in b.bars if bar.start < s and bar.length > eps)


def beta_max(b: Barcode) -> float:
    finite = [bar.length for bar in b.bars if bar.finite]
    return max(finite, default=0.0)


# ---------------------------------------------------------------------------
# filtered complexes


@dataclass(frozen=True)
class Generator:
    id: Hashable
    action: float
    degree: int | None = None


class FilteredComplexF2:
    """Generators with actions and an F2 boundary map given by supports.

    Validation happens at construction: unknown ids, negative actions,
    boundary raising the action, and a nonzero square all raise
    ``ComplexError`` naming the generator.
    """

    def __init__(self, generators: Sequence[Generator], boundary: Mapping[Hashable, Iterable[Hashable]]):
        self.generators: tuple[Generator, ...] = tuple(generators)
        ids = [g.id for g in self.generators]
        if len(set(ids)) != len(ids):
            dup = next(i for i, c in Counter(ids).items() if c > 1)
            raise ComplexError(f"duplicate generator id {dup!r}")
        self.index = {g.id: i for i, g in enumerate(self.generators)}
        bd: dict[Hashable, frozenset] = {}
        for gid, faces in boundary.items():
            if gid not in self.index:
                raise ComplexError(f"boundary given for unknown generator {gid!r}")
            faces = list(faces)
            for f in faces:
                if f not in self.index:
                    raise ComplexError(f"boundary of {gid!r} contains unknown generator {f!r}")
            # F2: repeated faces cancel in pairs
            odd = frozenset(f for f, c in Counter(faces).items() if c % 2)
            if odd:
                bd[gid] = odd
        self.boundary: dict[Hashable, frozenset] = bd
        self._validate()

    @property
    def actions(self) -> dict[Hashable, float]:
        return {g.id: g.action for g in self.generators}

    def __len__(self) -> int:
        return len(self.generators)

    def _validate(self) -> None:
        act = self.actions
        for g in self.generators:
            if not math.isfinite(g.action):
                raise ComplexError(f"generator {g.id!r} has non-finite action")
            if g.action < 0:
                raise ComplexError(f"generator {g.id!r} has negative action {g.action}; shift actions to start at 0")
        for gid, faces in self.boundary.items():
            for f in faces:
                if act[f] > act[gid]:
                    raise ComplexError(
                        f"boundary of {gid!r} raises the action: {f!r} has {act[f]} > {act[gid]}"
                    )
        for gid, faces in self.boundary.items():
            acc: Counter = Counter()
            for f in faces:
                for ff in self.boundary.get(f, ()):
                    acc[ff] += 1
            bad = sorted((str(k) for k, c in acc.items() if c % 2))
            if bad:
                raise ComplexError(f"boundary squared is nonzero on generator {gid!r} (hits {', '.join(bad)})")

    def with_actions(self, actions: Mapping[Hashable, float]) -> "FilteredComplexF2":
        gens = [Generator(g.id, float(actions[g.id]), g.degree) for g in self.generators]
        return FilteredComplexF2(gens, self.boundary)

    def action_constraints(self) -> list[tuple[Hashable, Hashable, float, bool]]:
        """(v, w, gap, strict): action(v) - action(w) >= gap (> when strict)."""
        return [(v, w, 0.0, False) for v, faces in self.boundary.items() for w in faces]

    def filtration_order(self) -> list[int]:
        """Generator indices sorted by action, then boundary depth, then input order.

        Depth puts faces before cofaces when actions tie, which keeps the
        boundary matrix strictly upper triangular in this order whenever
        the boundary relation among equal actions is acyclic.
        """
        depth: dict[Hashable, int] = {}

        def d(gid):
            if gid in depth:
                return depth[gid]
            seen = set()
            stack = [(gid, False)]
            while stack:
                top, done = stack.pop()
                if top in depth:
                    continue
                faces = self.boundary.get(top, ())
                if done:
                    # faces still open lie on a cycle among equal actions; ignore those edges
                    depth[top] = 1 + max((depth[f] for f in faces if f in depth), default=-1)
                elif top not in seen:
                    seen.add(top)
                    stack.append((top, True))
                    stack.extend((f, False) for f in faces if f not in depth)
            return depth[gid]

        return sorted(range(len(self.generators)), key=lambda i: (self.generators[i].action, d(self.generators[i].id), i))


@dataclass(frozen=True)
class SVDBasis:
    """Orthogonal basis with ∂x_i = y_i and ∂z_j = 0, chains as id tuples."""

    pairs: tuple[tuple[tuple, tuple], ...]
    cycles: tuple[tuple, ...]


def reduce_filtered_complex(c: FilteredComplexF2) -> tuple[SVDBasis, Barcode]:
    order = c.filtration_order()
    pos = {c.generators[i].id: p for p, i in enumerate(order)}
    gens = [c.generators[i] for i in order]
    n = len(gens)
    cols = [0] * n
    for p, g in enumerate(gens):
        v = 0
        for f in c.boundary.get(g.id, ()):
            v |= 1 << pos[f]
        cols[p] = v
    chains = [1 << p for p in range(n)]
    owner: dict[int, int] = {}
    for j in range(n):
        col = cols[j]
        while col:
            low = col.bit_length() - 1
            k = owner.get(low)
            if k is None:
                owner[low] = j
                break
            col ^= cols[k]
            chains[j] ^= chains[k]
        cols[j] = col

    def ids(v: int) -> tuple:
        return tuple(gens[p].id for p in f2.bits(v))

    bars, pairs, cycles = [], [], []
    for low, j in sorted(owner.items(), key=lambda t: t[1]):
        pairs.append((ids(chains[j]), ids(cols[j])))
        start, end = gens[low].action, gens[j].action
        if start < end:
            bars.append(Bar(start, end, 1, gens[low].degree))
    for j in range(n):
        if cols[j] == 0 and j not in owner:
            cycles.append(ids(chains[j]))
    # Infinite bars per action level: generators minus pivot rows minus
    # pivot columns. Equal to the zero unpaired columns when the order is
    # triangular; stays right when a cycle of equal actions makes one
    # generator both a pivot row and a nonzero column.
    free: Counter = Counter()
    for g in gens:
        free[(g.action, g.degree)] += 1
    for low, j in owner.items():
        free[(gens[low].action, gens[low].degree)] -= 1
        free[(gens[j].action, gens[j].degree)] -= 1
    for (a, deg), m in free.items():
        if m > 0:
            bars.append(Bar(a, INF, m, deg))
    return SVDBasis(tuple(pairs), tuple(cycles)), Barcode(bars)


def barcode(c: FilteredComplexF2) -> Barcode:
    return reduce_filtered_complex(c)[1]


def sublevel_filtration(simplices: Iterable[Sequence[int]], values: Mapping[int, float] | Sequence[float]) -> FilteredComplexF2:
    """Lower-star filtration of a simplicial complex given by its simplices.

    Every face of every listed simplex must itself be listed.
    """
    simplices = [tuple(sorted(s)) for s in simplices]
    if len(set(simplices)) != len(simplices):
        raise ComplexError("simplex listed twice")
    have = set(simplices)
    gens, bd = [], {}
    for s in simplices:
        if not s:
            raise ComplexError("empty simplex")
        if len(set(s)) != len(s):
            raise ComplexError(f"simplex {s} repeats a vertex")
        val = max(float(values[v]) for v in s)
        gens.append(Generator(s, val, len(s) - 1))
        if len(s) > 1:
            faces = [s[:i] + s[i + 1:] for i in range(len(s))]
            missing = [f for f in faces if f not in have]
            if missing:
                raise ComplexError(f"simplex {s} is missing face {missing[0]}; not closed under faces")
            bd[s] = faces
    return FilteredComplexF2(gens, bd)


# ---------------------------------------------------------------------------
# sampled persistence modules and the rank formula


class SampledModule:
    """Persistence module sampled on a grid.

    ``maps[i]`` holds the columns of π from grid[i] to grid[i+1] as F2
    bitsets. The value at a real parameter c is the value at the smallest
    grid point >= c (modules are constant on (p, p'] between spectrum points).
    """

    def __init__(self, grid: Sequence[float], dims: Sequence[int], maps: Sequence[Sequence[int]], spectrum: Sequence[float] | None = None):
        if len(dims) != len(grid) or len(maps) != len(grid) - 1:
            raise ValueError("grid, dims and maps disagree in length")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("grid must be strictly increasing")
        for i, m in enumerate(maps):
            if len(m) != dims[i] or any(c >> dims[i + 1] for c in m):
                raise ValueError(f"map {i} has the wrong shape")
        self.grid = [float(g) for g in grid]
        self.dims = list(dims)
        self.maps = [list(m) for m in maps]
        self.spectrum = sorted(spectrum) if spectrum is not None else self.grid[:-1]
        self._cache: dict[tuple[int, int], list[int]] = {}

    def map_between(self, i: int, j: int) -> list[int]:
        """Columns of π from grid[i] to grid[j], i <= j."""
        if i > j:
            raise ValueError("structure maps go up the grid")
        key = (i, j)
        hit = self._cache.get(key)
        if hit is None:
            if i == j:
                hit = [1 << t for t in range(self.dims[i])]
            else:
                hit = f2.compose(self.maps[j - 1], self.map_between(i, j - 1))
            self._cache[key] = hit
        return hit

    def rank(self, i: int, j: int) -> int:
        return f2.rank(self.map_between(i, j))

    def locate(self, c: float) -> int:
        i = bisect.bisect_left(self.grid, c)
        if i >= len(self.grid):
            raise ValueError(f"parameter {c} beyond the grid")
        return i

    def after(self, a: float) -> int:
        """Index of the smallest grid point strictly above a."""
        i = bisect.bisect_right(self.grid, a)
        if i >= len(self.grid):
            raise ValueError(f"no grid point above {a}")
        return i


def barcode_multiplicity(m: SampledModule, interval: tuple[float, float], c: float | None = None) -> int:
    """n_I = dim A/(B + C) for I = (a, b] from images and kernels at c.

    With α the birth and β the death function on V_c,
      A = {α <= a, β <= b},  B = {α < a, β <= b},  C = {α <= a, β < b}.
    α <= a iff v lies in the image from just above a, α < a iff it lies in
    the image from a; β <= b iff v dies by just above b, β < b iff it dies
    by b. b = inf makes β <= b vacuous and β < b mean "dies somewhere".
    """
    a, b = interval
    if not a < b:
        raise ValueError("empty interval")
    g = m.grid
    if a < g[0] or a >= g[-1] or (b != INF and (b < g[0] or b >= g[-1])):
        raise ValueError(f"interval ({a}, {b}] outside grid range [{g[0]}, {g[-1]})")
    ia, ia_plus = m.locate(a), m.after(a)
    if c is None:
        ic = ia_plus
    else:
        if not a < c < b:
            raise ValueError("c must lie strictly inside the interval")
        ic = m.locate(c)
    if g[ia] != a:
        raise ValueError(f"left endpoint {a} is not a grid point")
    top = len(g) - 1
    dim_c = m.dims[ic]
    if dim_c == 0:
        return 0
    everything = [1 << t for t in range(dim_c)]
    im_plus = f2.image(m.map_between(ia_plus, ic))
    im_at = f2.image(m.map_between(ia, ic))
    if b == INF:
        ker_le = everything
        ker_lt = f2.kernel(m.map_between(ic, top))
    else:
        ib, ib_plus = m.locate(b), m.after(b)
        if g[ib] != b:
            raise ValueError(f"right endpoint {b} is not a grid point")
        ker_le = f2.kernel(m.map_between(ic, ib_plus))
        ker_lt = f2.kernel(m.map_between(ic, ib))
    A = f2.intersect(im_plus, ker_le)
    B = f2.intersect(im_at, ker_le)
    C = f2.intersect(im_plus, ker_lt)
    return len(A) - f2.rank(B + C)


def module_barcode(m: SampledModule) -> Barcode:
    """Barcode from ranks of structure maps by inclusion-exclusion.

    A bar (a, b] is alive at the grid points from just above a up to b, so
    n_(a,b] = r(a+, b) - r(a, b) - r(a+, b+) + r(a, b+), with r(i, j) the
    rank of the map from grid point i to j. For b = inf, b+ is replaced by
    the last grid point and the two right-hand terms drop out.
    """
    bars = []
    top = len(m.grid) - 1
    r = m.rank
    for a in m.spectrum:
        ia, iap = m.locate(a), m.after(a)
        if m.dims[iap] == 0:
            continue
        n = r(iap, top) - r(ia, top)
        if n:
            bars.append(Bar(a, INF, n))
        for b in m.spectrum:
            if b <= a:
                continue
            ib, ibp = m.locate(b), m.after(b)
            n = r(iap, ib) - r(ia, ib) - r(iap, ibp) + r(ia, ibp)
            if n:
                bars.append(Bar(a, b, n))
    return Barcode(bars)


class _Quotient:
    """Basis of Z/B with coordinates: reps of homology classes tagged by bit."""

    def __init__(self, boundaries: Iterable[int], cycles: Iterable[int]):
        self.ech = f2.Echelon()
        for v in boundaries:
            self.ech.add(v, 0)
        self.reps: list[int] = []
        for z in cycles:
            if self.ech.add(z, 1 << len(self.reps)):
                self.reps.append(z)

    def coords(self, v: int) -> int:
        r, tag = self.ech.reduce(v)
        if r:
            raise ArithmeticError("vector is not a cycle of this level")
        return tag


def sampled_module(c: FilteredComplexF2) -> SampledModule:
    """Homology of the strict sublevels C_{<s} on actions, midpoints and end caps.

    Computed level by level from kernels and images of the boundary matrix
    restricted to each sublevel; no reduction ordering is involved.
    """
    gens = c.generators
    n = len(gens)
    col = []
    for g in gens:
        v = 0
        for f in c.boundary.get(g.id, ()):
            v |= 1 << c.index[f]
        col.append(v)
    acts = sorted({g.action for g in gens})
    if acts:
        grid = [acts[0] - 1.0]
        for a, nxt in zip(acts, acts[1:] + [None]):
            grid.append(a)
            grid.append((a + nxt) / 2 if nxt is not None else a + 1.0)
    else:
        grid = [0.0, 1.0]
    levels = []
    for s in grid:
        idx = [i for i in range(n) if gens[i].action < s]
        sub_cols = [col[i] for i in idx]
        cyc = [f2.apply([1 << i for i in idx], k) for k in f2.kernel(sub_cols)]
        levels.append(_Quotient(f2.image(sub_cols), cyc))
    maps = []
    for lo, hi in zip(levels, levels[1:]):
        maps.append([hi.coords(z) for z in lo.reps])
    return SampledModule(grid, [len(q.reps) for q in levels], maps, spectrum=acts)


def interval_module(bars: Iterable[tuple[float, float]], grid: Sequence[float]) -> SampledModule:
    """Direct sum of interval modules F_(a,b] sampled on a grid."""
    bars = list(bars)
    alive = [[k for k, (a, b) in enumerate(bars) if a < s <= b] for s in grid]
    maps = []
    for now, nxt in zip(alive, alive[1:]):
        where = {k: t for t, k in enumerate(nxt)}
        maps.append([(1 << where[k]) if k in where else 0 for k in now])
    return SampledModule(grid, [len(a) for a in alive], maps)


# ---------------------------------------------------------------------------
# bottleneck distance


def _split(b: Barcode) -> tuple[list[tuple[float, float]], list[float]]:
    fin, inf = [], []
    for s, e in b.expanded():
        (fin.append((s, e)) if e != INF else inf.append(s))
    return fin, sorted(inf)


def bottleneck_distance(b1: Barcode, b2: Barcode) -> float:
    """Bottleneck distance with the diagonal available to finite bars.

    Infinite bars can only match infinite bars; for those, matching sorted
    births is optimal. The finite part is a threshold search over candidate
    costs with a bipartite matching feasibility test.
    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_bipartite_matching

    f1, i1 = _split(b1)
    f2_, i2 = _split(b2)
    if len(i1) != len(i2):
        return INF
    inf_cost = max((abs(x - y) for x, y in zip(i1, i2)), default=0.0)
    n, m = len(f1), len(f2_)
    if n + m == 0:
        return inf_cost
    P = np.array(f1, dtype=float).reshape(n, 2)
    Q = np.array(f2_, dtype=float).reshape(m, 2)
    cross = np.maximum(np.abs(P[:, None, 0] - Q[None, :, 0]), np.abs(P[:, None, 1] - Q[None, :, 1])) if n and m else np.zeros((n, m))
    dp = (P[:, 1] - P[:, 0]) / 2
    dq = (Q[:, 1] - Q[:, 0]) / 2
    # rows: bars of b1 then diagonal copies for b2; cols: bars of b2 then diagonal copies for b1
    N = n + m
    cost = np.full((N, N), INF)
    cost[:n, :m] = cross
    cost[:n, m:] = np.where(np.eye(n, dtype=bool), dp[:, None], INF)
    cost[n:, :m] = np.where(np.eye(m, dtype=bool), dq[None, :], INF)
    cost[n:, m:] = 0.0
    cands = np.unique(cost[np.isfinite(cost)])

    def feasible(t: float) -> bool:
        g = csr_matrix((cost <= t).astype(np.int8))
        match = maximum_bipartite_matching(g, perm_type="column")
        return bool(np.all(match >= 0))

    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    return max(float(cands[lo]), inf_cost)


# ---------------------------------------------------------------------------
# action perturbation


def perturb_actions(c, bound: float, seed, max_tries: int = 1000):
    """Shift actions by at most ``bound`` while keeping every action constraint.

    Works for any complex exposing ``actions``, ``action_constraints`` and
    ``with_actions``. Generators tied by a cycle of equal-action
    constraints must stay equal and move as one unit. Units are visited by
    increasing action (faces first among ties); each draws uniformly from
    [a - bound, a + bound] cut down to what the already placed units allow.
    ``max_tries`` bounds redraws of a strict constraint hit exactly.
    """
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    if bound < 0:
        raise ValueError("bound must be nonnegative")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    acts = c.actions
    if bound == 0:
        return c.with_actions(acts)
    nonneg = isinstance(c, FilteredComplexF2)
    ids = list(acts)
    pos = {k: i for i, k in enumerate(ids)}
    cons = c.action_constraints()
    tie = [(pos[v], pos[w]) for v, w, gap, strict in cons if gap == 0 and not strict and acts[v] == acts[w] and v != w]
    n = len(ids)
    if tie:
        r, q = zip(*tie)
        graph = coo_matrix((np.ones(len(tie)), (r, q)), shape=(n, n))
        _, label = connected_components(graph, directed=True, connection="strong")
    else:
        label = np.arange(n)
    units: dict[int, list] = {}
    for k in ids:
        units.setdefault(int(label[pos[k]]), []).append(k)
    if isinstance(c, FilteredComplexF2):
        rank = {c.generators[i].id: r for r, i in enumerate(c.filtration_order())}
    else:
        rank = {k: r for r, k in enumerate(sorted(ids, key=lambda k: (acts[k], str(k))))}
    by_vertex: dict[Hashable, list] = {k: [] for k in ids}
    for con in cons:
        by_vertex[con[0]].append(con)
        by_vertex[con[1]].append(con)
    new: dict[Hashable, float] = {}
    for members in sorted(units.values(), key=lambda m: min(rank[k] for k in m)):
        a = acts[members[0]]
        lo, hi = a - bound, a + bound
        lo_strict = hi_strict = False
        mset = set(members)
        for gid in members:
            for v, w, gap, strict in by_vertex[gid]:
                if v in mset and w in mset:
                    continue
                if v == gid and w in new:
                    b = new[w] + gap
                    if b > lo or (b == lo and strict):
                        lo, lo_strict = b, strict
                elif w == gid and v in new:
                    b = new[v] - gap
                    if b < hi or (b == hi and strict):
                        hi, hi_strict = b, strict
        if nonneg and lo < 0:
            lo, lo_strict = 0.0, False
        if lo > hi or (lo == hi and (lo_strict or hi_strict)):
            raise ValueError(f"no admissible action left for generator {members[0]!r}")
        for _ in range(max_tries):
            val = float(rng.uniform(lo, hi)) if hi > lo else lo
            if not ((lo_strict and val == lo) or (hi_strict and val == hi)):
                break
        else:
            raise ValueError(f"could not draw a strictly admissible action for generator {members[0]!r}")
        for gid in members:
            new[gid] = val
    return c.with_actions(new)


# ---------------------------------------------------------------------------
# random complexes with a planted barcode


def random_filtered_complex(rng: np.random.Generator, n: int, *, grid: float = 0.125, top: float = 8.0, density: float = 0.3) -> tuple[FilteredComplexF2, Barcode]:
    """Random F2 complex with n generators and its known barcode.

    Start from a complex already in singular value form (pairs y <- x and
    free cycles z) and change basis by a random unitriangular matrix that
    only adds lower-or-equal action generators. The new basis is still
    orthogonal, so the barcode of the start survives.
    """
    n_pairs = int(rng.integers(0, n // 2 + 1))
    acts = np.round(rng.uniform(0, top, size=n) / grid) * grid
    # pairs: (x, y) with action(x) >= action(y)
    acts = acts.tolist()
    planted = []
    bd_old = np.zeros((n, n), dtype=np.uint8)  # bd_old[row, col]
    for p in range(n_pairs):
        x, y = 2 * p, 2 * p + 1
        if acts[x] < acts[y]:
            acts[x], acts[y] = acts[y], acts[x]
        bd_old[y, x] = 1
        if acts[y] < acts[x]:
            planted.append((acts[y], acts[x]))
    for z in range(2 * n_pairs, n):
        planted.append((acts[z], INF))
    tie = rng.permutation(n)
    order = sorted(range(n), key=lambda i: (acts[i], tie[i]))
    rank_of = {g: r for r, g in enumerate(order)}
    # P[:, i] = coordinates of the new basis vector f_i in the old basis
    P = np.eye(n, dtype=np.uint8)
    for i in range(n):
        for j in range(n):
            if rank_of[j] < rank_of[i] and rng.random() < density:
                P[j, i] = 1
    Pinv = _f2_inverse(P)
    bd_new = (Pinv.astype(np.int64) @ bd_old @ P) % 2
    gens = [Generator(f"g{i}", float(acts[i])) for i in range(n)]
    bd = {f"g{i}": [f"g{j}" for j in np.flatnonzero(bd_new[:, i])] for i in range(n)}
    return FilteredComplexF2(gens, bd), Barcode.from_pairs(planted)


def _f2_inverse(P: np.ndarray) -> np.ndarray:
    n = P.shape[0]
    rows = [int("".join(str(int(b)) for b in P[i, ::-1]), 2) | (1 << (n + i)) for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if rows[r] >> col & 1)
        rows[col], rows[piv] = rows[piv], rows[col]
        for r in range(n):
            if r != col and rows[r] >> col & 1:
                rows[r] ^= rows[col]
    inv = np.zeros((n, n), dtype=np.uint8)
    for i in range(n):
        for j in range(n):
            inv[i, j] = rows[i] >> (n + j) & 1
    return inv
