"""Filtered complexes over the Novikov field with F2 coefficients.

Scalars are finite sums of T^a with real exponents. The filtration of a
chain is A(Σ λ_i x_i) = max_i (A(x_i) − ν(λ_i)) with ν the least exponent.

Orthogonalization needs division in Λ, and quotients of finite sums are
in general infinite series. Exponents are therefore mapped onto a common
dyadic grid δZ and the elimination runs exactly in the rational function
field F2(t), t = T^δ, whose elements embed in Λ by Laurent expansion.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .persistence import ComplexError

INF = math.inf


# ---------------------------------------------------------------------------
# scalars


class NovikovScalar:
    """Finite F2 combination of T^a, stored as a strictly increasing exponent tuple."""

    __slots__ = ("terms",)

    def __init__(self, exponents: Iterable[float] = ()):
        odd = [e for e, c in Counter(float(e) for e in exponents).items() if c % 2]
        self.terms: tuple[float, ...] = tuple(sorted(odd))

    @classmethod
    def monomial(cls, a: float) -> "NovikovScalar":
        return cls((a,))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "NovikovScalar") -> "NovikovScalar":
        out = NovikovScalar()
        out.terms = tuple(sorted(set(self.terms) ^ set(other.terms)))
        return out

    __sub__ = __add__

    def __mul__(self, other: "NovikovScalar") -> "NovikovScalar":
        return NovikovScalar(a + b for a in self.terms for b in other.terms)

    def shift(self, c: float) -> "NovikovScalar":
        """Multiply by T^c."""
        out = NovikovScalar()
        out.terms = tuple(a + c for a in self.terms)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, NovikovScalar) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"T^{a:g}" for a in self.terms)


ZERO = NovikovScalar()
ONE = NovikovScalar.monomial(0.0)


def novikov_valuation(lam: NovikovScalar) -> float:
    return lam.terms[0] if lam.terms else INF


# ---------------------------------------------------------------------------
# F2 polynomials packed in ints, and the field F2(t)


def _clmul(a: int, b: int) -> int:
    if a.bit_count() < b.bit_count():
        a, b = b, a
    out = 0
    while b:
        low = b & -b
        out ^= a << (low.bit_length() - 1)
        b ^= low
    return out


def _divmod(a: int, b: int) -> tuple[int, int]:
    db = b.bit_length()
    q = 0
    while a.bit_length() >= db:
        s = a.bit_length() - db
        q ^= 1 << s
        a ^= b << s
    return q, a


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _divmod(a, b)[1]
    return a


def _tz(a: int) -> int:
    return (a & -a).bit_length() - 1


class RatT:
    """Element t^s · P(t)/Q(t) of F2(t) with P, Q coprime and of nonzero constant term.

    The t-adic valuation is s; zero has P = 0.
    """

    __slots__ = ("s", "p", "q")

    def __init__(self, s: int, p: int, q: int = 1):
        if q == 0:
            raise ZeroDivisionError("zero denominator")
        if p == 0:
            self.s, self.p, self.q = 0, 0, 1
            return
        s += _tz(p) - _tz(q)
        p >>= _tz(p)
        q >>= _tz(q)
        if q != 1 and p != 1:
            g = _gcd(p, q)
            if g != 1:
                p = _divmod(p, g)[0]
                q = _divmod(q, g)[0]
        self.s, self.p, self.q = s, p, q

    @classmethod
    def from_degrees(cls, degrees: Iterable[int]) -> "RatT":
        degrees = list(degrees)
        if not degrees:
            return cls(0, 0)
        m = min(degrees)
        p = 0
        for d in degrees:
            p ^= 1 << (d - m)
        return cls(m, p)

    def __bool__(self) -> bool:
        return self.p != 0

    def __add__(self, o: "RatT") -> "RatT":
        if not self.p:
            return o
        if not o.p:
            return self
        m = min(self.s, o.s)
        if self.q == o.q:
            return RatT(m, (self.p << (self.s - m)) ^ (o.p << (o.s - m)), self.q)
        num = _clmul(self.p << (self.s - m), o.q) ^ _clmul(o.p << (o.s - m), self.q)
        return RatT(m, num, _clmul(self.q, o.q))

    __sub__ = __add__

    def __mul__(self, o: "RatT") -> "RatT":
        if not self.p or not o.p:
            return RatT(0, 0)
        p1, q2 = self.p, o.q
        p2, q1 = o.p, self.q
        if q2 != 1 and p1 != 1:
            g = _gcd(p1, q2)
            p1, q2 = _divmod(p1, g)[0], _divmod(q2, g)[0]
        if q1 != 1 and p2 != 1:
            g = _gcd(p2, q1)
            p2, q1 = _divmod(p2, g)[0], _divmod(q1, g)[0]
        out = RatT.__new__(RatT)
        out.s, out.p, out.q = self.s + o.s, _clmul(p1, p2), _clmul(q1, q2)
        return out

    def inverse(self) -> "RatT":
        if not self.p:
            raise ZeroDivisionError("inverse of zero")
        out = RatT.__new__(RatT)
        out.s, out.p, out.q = -self.s, self.q, self.p
        return out

    def __truediv__(self, o: "RatT") -> "RatT":
        return self * o.inverse()

    def __eq__(self, o) -> bool:
        return isinstance(o, RatT) and (self.s, self.p, self.q) == (o.s, o.p, o.q)

    def __hash__(self):
        return hash((self.s, self.p, self.q))

    def series(self, n_terms: int) -> list[int]:
        """Leading t-degrees of the Laurent expansion (up to n_terms nonzero terms)."""
        if not self.p:
            return []
        # invert q as a power series to enough precision
        out, rem, deg = [], self.p, 0
        q = self.q
        while len(out) < n_terms and rem:
            if rem & 1:
                out.append(self.s + deg)
                rem ^= q
            rem >>= 1
            deg += 1
            if deg > 64 * n_terms + q.bit_length() * n_terms:
                break
        return out

    def __repr__(self) -> str:
        return f"RatT(t^{self.s}·{bin(self.p)}/{bin(self.q)})"


class ExponentGrid:
    """Common dyadic grid δ = 2^-m for a set of exponents."""

    MAX_SHIFT = 48
    MAX_DEGREE = 1 << 22

    def __init__(self, exponents: Iterable[float]):
        m = 0
        span = 0.0
        for e in exponents:
            if not math.isfinite(e):
                raise ComplexError(f"non-finite exponent {e}")
            den = Fraction(e).denominator
            m = max(m, den.bit_length() - 1)
            span = max(span, abs(e))
        if m > self.MAX_SHIFT or span * 2.0 ** m > self.MAX_DEGREE:
            raise ComplexError(
                "exponents do not share a dyadic grid fine enough for exact arithmetic; "
                "use dyadic exponents such as k/2^j with modest j"
            )
        self.m = m
        self.delta = 2.0 ** -m

    def degree(self, e: float) -> int:
        d = Fraction(e) * (1 << self.m)
        assert d.denominator == 1
        return int(d)

    def lift(self, lam: NovikovScalar) -> RatT:
        return RatT.from_degrees(self.degree(e) for e in lam.terms)

    def valuation(self, x: RatT) -> float:
        return INF if not x else x.s * self.delta


# ---------------------------------------------------------------------------
# complexes


@dataclass(frozen=True)
class NovikovGenerator:
    id: Hashable
    action: float


class NovikovComplex:
    """Generators with actions and ∂x_i = Σ_j λ_ij x_j.

    ``differential`` maps (i, j) to a NovikovScalar or an exponent list.
    Every term T^a of λ_ij must satisfy A(x_i) − A(x_j) + a > 0.
    """

    def __init__(self, generators: Sequence[NovikovGenerator], differential: Mapping[tuple[Hashable, Hashable], NovikovScalar | Iterable[float]], *, check: bool = True):
        self.generators = tuple(generators)
        ids = [g.id for g in self.generators]
        if len(set(ids)) != len(ids):
            raise ComplexError("duplicate generator id")
        self.index = {g.id: k for k, g in enumerate(self.generators)}
        self.act = {g.id: float(g.action) for g in self.generators}
        diff: dict[tuple, NovikovScalar] = {}
        for (i, j), lam in differential.items():
            if i not in self.index or j not in self.index:
                raise ComplexError(f"differential entry ({i!r}, {j!r}) names an unknown generator")
            if not isinstance(lam, NovikovScalar):
                lam = NovikovScalar(lam)
            if lam:
                diff[(i, j)] = lam
        self.differential = diff
        self.rows: dict[Hashable, dict[Hashable, NovikovScalar]] = {g.id: {} for g in self.generators}
        for (i, j), lam in diff.items():
            self.rows[i][j] = lam
        if check:
            self._validate()

    @property
    def actions(self) -> dict[Hashable, float]:
        return dict(self.act)

    def __len__(self) -> int:
        return len(self.generators)

    def _validate(self) -> None:
        for (i, j), lam in self.differential.items():
            for a in lam.terms:
                if not self.act[i] - self.act[j] + a > 0:
                    raise ComplexError(
                        f"term T^{a:g} in ∂{i!r} at {j!r} does not decrease the action "
                        f"(arrow length {self.act[i] - self.act[j] + a:g})"
                    )
        for i in self.rows:
            sq: dict[Hashable, NovikovScalar] = {}
            for j, lam in self.rows[i].items():
                for k, mu in self.rows[j].items():
                    sq[k] = sq.get(k, ZERO) + lam * mu
            bad = [k for k, v in sq.items() if v]
            if bad:
                raise ComplexError(f"∂² ≠ 0: coefficient of {bad[0]!r} in ∂²{i!r} is {sq[bad[0]]!r}")

    def with_actions(self, actions: Mapping[Hashable, float]) -> "NovikovComplex":
        gens = [NovikovGenerator(g.id, float(actions[g.id])) for g in self.generators]
        return NovikovComplex(gens, self.differential)

    def action_constraints(self):
        """A(x_i) − A(x_j) > −a for every term, i.e. positive arrow lengths."""
        out = []
        for (i, j), lam in self.differential.items():
            out.append((i, j, -lam.terms[0], True))
        return out

    def boundary(self, chain: Mapping[Hashable, NovikovScalar]) -> dict[Hashable, NovikovScalar]:
        out: dict[Hashable, NovikovScalar] = {}
        for i, lam in chain.items():
            for j, mu in self.rows[i].items():
                out[j] = out.get(j, ZERO) + lam * mu
        return {k: v for k, v in out.items() if v}

    def exponents(self) -> list[float]:
        return [a for lam in self.differential.values() for a in lam.terms]


def chain_action(chain: Mapping[Hashable, NovikovScalar], c: NovikovComplex) -> float:
    vals = [c.act[i] - novikov_valuation(lam) for i, lam in chain.items() if lam]
    if not vals:
        raise ValueError("the zero chain has action -inf")
    return max(vals)


# ---------------------------------------------------------------------------
# orthogonalization


@dataclass(frozen=True)
class NovikovSVD:
    """Orthogonal basis with ∂x_i = y_i and ∂z_j = 0.

    Chains map generator ids to exact F2(t) coefficients; ``grid`` converts
    valuations back to action units. ``actions`` lists (A(x_i), A(y_i)).
    """

    pairs: tuple[tuple[dict, dict], ...]
    cycles: tuple[dict, ...]
    pair_actions: tuple[tuple[float, float], ...]
    cycle_actions: tuple[float, ...]
    grid: ExponentGrid


def orthogonalize(c: NovikovComplex, tie_break: str = "first") -> NovikovSVD:
    """Singular value decomposition by minimal-arrow-length pivoting.

    The pivot is the nonzero matrix entry (r, j) of least arrow length
    ν(D_rj) + A_j − A_r among generators still in play. Clearing row r
    with multiples of column j only adds chains of no larger action, and
    replacing e_r by ∂e_j keeps the basis orthogonal, so each pivot peels
    off one bar (A(∂e_j), A(e_j)] and leaves a subcomplex. ``tie_break``
    ("first" or "last") picks among equal-length pivots by generator order.
    """
    if tie_break not in ("first", "last"):
        raise ValueError("tie_break must be 'first' or 'last'")
    grid = ExponentGrid(c.exponents())
    n = len(c.generators)
    ids = [g.id for g in c.generators]
    A = [c.act[i] for i in ids]
    # D[k] = column of ∂e_k as {row: RatT}
    D: list[dict[int, RatT]] = [dict() for _ in range(n)]
    for (i, j), lam in c.differential.items():
        D[c.index[i]][c.index[j]] = grid.lift(lam)
    # basis vectors in original coordinates
    B: list[dict[int, RatT]] = [{k: RatT(0, 1)} for k in range(n)]
    active = set(range(n))
    sign = 1 if tie_break == "first" else -1
    pairs, pair_actions = [], []
    delta = grid.delta

    def length(r: int, j: int) -> float:
        return D[j][r].s * delta + A[j] - A[r]

    while True:
        best = None
        for j in active:
            for r, v in D[j].items():
                key = (length(r, j), sign * j, sign * r)
                if best is None or key < best[0]:
                    best = (key, r, j)
        if best is None:
            break
        _, r, j = best
        if r == j:
            raise ArithmeticError(f"diagonal pivot at {ids[j]!r}")
        piv = D[j][r]
        # clear row r in every other active column: e_k <- e_k − c e_j
        for k in list(active):
            if k == j or r not in D[k]:
                continue
            coef = D[k][r] / piv
            col = D[k]
            for i, v in D[j].items():
                nv = col.get(i, RatT(0, 0)) + coef * v
                if nv:
                    col[i] = nv
                else:
                    col.pop(i, None)
            # inverse row operation: row j += coef * row k
            for kk in active:
                v = D[kk].get(k)
                if v:
                    nv = D[kk].get(j, RatT(0, 0)) + coef * v
                    if nv:
                        D[kk][j] = nv
                    else:
                        D[kk].pop(j, None)
            bk = B[k]
            for i, v in B[j].items():
                nv = bk.get(i, RatT(0, 0)) + coef * v
                if nv:
                    bk[i] = nv
                else:
                    bk.pop(i, None)
        # replace e_r by y = ∂e_j
        y: dict[int, RatT] = {}
        for i, v in D[j].items():
            for g, w in B[i].items():
                nv = y.get(g, RatT(0, 0)) + v * w
                if nv:
                    y[g] = nv
                else:
                    y.pop(g, None)
        a_y = A[r] - piv.s * delta
        pairs.append((_export(B[j], ids), _export(y, ids)))
        pair_actions.append((A[j], a_y))
        active.discard(j)
        active.discard(r)
        for k in active:
            if D[k].pop(j, None):
                raise ArithmeticError(f"∂² ≠ 0 detected while pairing {ids[j]!r}")
            D[k].pop(r, None)
        D[j] = {}
    cycles = tuple(_export(B[k], ids) for k in sorted(active))
    cycle_actions = tuple(A[k] for k in sorted(active))
    return NovikovSVD(tuple(pairs), cycles, tuple(pair_actions), cycle_actions, grid)


def _export(vec: dict[int, RatT], ids: list) -> dict:
    return {ids[k]: v for k, v in sorted(vec.items())}


# ---------------------------------------------------------------------------
# unpinned barcodes


class UnpinnedBarcode:
    """Multiset of bar lengths in (0, inf]."""

    def __init__(self, lengths: Iterable[float]):
        vals = sorted(float(x) for x in lengths)
        if any(not x > 0 for x in vals):
            raise ValueError("unpinned bar lengths must be positive")
        self.lengths: tuple[float, ...] = tuple(vals)

    def __len__(self) -> int:
        return len(self.lengths)

    def __eq__(self, other) -> bool:
        return isinstance(other, UnpinnedBarcode) and self.lengths == other.lengths

    def __repr__(self) -> str:
        return "UnpinnedBarcode{" + ", ".join("inf" if x == INF else f"{x:g}" for x in self.lengths) + "}"

    @property
    def finite(self) -> list[float]:
        return [x for x in self.lengths if x != INF]

    @property
    def n_infinite(self) -> int:
        return sum(1 for x in self.lengths if x == INF)


def unpinned_barcode(c: NovikovComplex, tie_break: str = "first") -> UnpinnedBarcode:
    svd = orthogonalize(c, tie_break)
    lengths = [ax - ay for ax, ay in svd.pair_actions]
    lengths += [INF] * len(svd.cycles)
    return UnpinnedBarcode(lengths)


def b_eps_unpinned(bc: UnpinnedBarcode, eps: float) -> int:
    if not eps > 0:
        raise ValueError("eps must be positive")
    return sum(1 for x in bc.lengths if x > eps)


# ---------------------------------------------------------------------------
# Floer graphs


@dataclass(frozen=True)
class Arrow:
    source: Hashable
    target: Hashable
    exponent: float
    length: float


@dataclass(frozen=True)
class FloerGraph:
    vertices: tuple[tuple[Hashable, float], ...]
    arrows: tuple[Arrow, ...]


def floer_graph(c: NovikovComplex) -> FloerGraph:
    arrows = []
    for (i, j), lam in c.differential.items():
        for a in lam.terms:
            arrows.append(Arrow(i, j, a, c.act[i] - c.act[j] + a))
    return FloerGraph(tuple((g.id, g.action) for g in c.generators), tuple(arrows))


def isolated_count(g: FloerGraph, eps: float) -> tuple[int, list]:
    """Vertices whose every incident arrow is longer than eps."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    short = set()
    for ar in g.arrows:
        if not ar.length > eps:
            short.add(ar.source)
            short.add(ar.target)
    ids = [v for v, _ in g.vertices if v not in short]
    return len(ids), ids


# ---------------------------------------------------------------------------
# duality and tensor products


def dual_complex(c: NovikovComplex) -> NovikovComplex:
    gens = [NovikovGenerator(_star(g.id), -g.action) for g in c.generators]
    diff = {(_star(j), _star(i)): lam for (i, j), lam in c.differential.items()}
    return NovikovComplex(gens, diff)


def _star(gid):
    if isinstance(gid, tuple) and len(gid) == 2 and gid[0] == "*":
        return gid[1]
    return ("*", gid)


def tensor_product(a: NovikovComplex, b: NovikovComplex) -> NovikovComplex:
    gens = [NovikovGenerator((x.id, y.id), x.action + y.action) for x in a.generators for y in b.generators]
    diff: dict[tuple, NovikovScalar] = {}
    for (i, j), lam in a.differential.items():
        for y in b.generators:
            diff[((i, y.id), (j, y.id))] = lam
    for (i, j), lam in b.differential.items():
        for x in a.generators:
            key = ((x.id, i), (x.id, j))
            diff[key] = diff.get(key, ZERO) + lam
    return NovikovComplex(gens, diff)


def pairing_law(a: UnpinnedBarcode, b: UnpinnedBarcode) -> UnpinnedBarcode:
    """Bars of a tensor product predicted from the factors' bars."""
    out = []
    for x in a.lengths:
        for y in b.lengths:
            if x == INF and y == INF:
                out.append(INF)
            elif x == INF or y == INF:
                out.append(min(x, y))
            else:
                out.extend([min(x, y)] * 2)
    return UnpinnedBarcode(out)


# ---------------------------------------------------------------------------
# random complexes with planted barcodes


def svd_form_complex(lengths: Sequence[float], rng: np.random.Generator | None = None, *, grid: float = 0.125, spread: float = 4.0, prefix: str = "") -> NovikovComplex:
    """Complex already in singular value form with the given bar lengths.

    Each finite length ℓ gives a pair ∂x = T^a y with A(x) − A(y) + a = ℓ;
    each inf gives a free cycle. Actions and exponents are dyadic.
    """
    gens, diff = [], {}
    for k, ell in enumerate(lengths):
        base = 0.0 if rng is None else float(np.round(rng.uniform(-spread, spread) / grid) * grid)
        if ell == INF:
            gens.append(NovikovGenerator(f"{prefix}z{k}", base))
            continue
        a = 0.0 if rng is None else float(np.round(rng.uniform(-spread, spread) / grid) * grid)
        ax = base + ell - a
        gens.append(NovikovGenerator(f"{prefix}x{k}", ax))
        gens.append(NovikovGenerator(f"{prefix}y{k}", base))
        diff[(f"{prefix}x{k}", f"{prefix}y{k}")] = NovikovScalar.monomial(a)
    return NovikovComplex(gens, diff)


def scramble(c: NovikovComplex, rng: np.random.Generator, *, density: float = 0.35, grid: float = 0.125, max_gap: float = 3.0) -> NovikovComplex:
    """Random filtration-preserving change of basis, same generator actions.

    New basis f_i = e_i + Σ c_ij e_j where every c_ij e_j has action strictly
    below A(e_i) and j precedes i in a fixed order (so the change is
    unitriangular). Such a basis is again orthogonal, hence the barcode is
    unchanged while the differential becomes dense.
    """
    gens = list(c.generators)
    n = len(gens)
    order = sorted(range(n), key=lambda k: (gens[k].action, k))
    pos = {k: p for p, k in enumerate(order)}
    # N[i][j]: coefficient of e_j in f_i − e_i
    N: list[dict[int, NovikovScalar]] = [dict() for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if pos[j] < pos[i] and rng.random() < density:
                # need A(e_j) − b < A(e_i): b > A(e_j) − A(e_i)
                lo = gens[j].action - gens[i].action
                b = math.floor(lo / grid) * grid + grid * int(rng.integers(1, int(max_gap / grid) + 1))
                N[i][j] = NovikovScalar.monomial(b)
    # P maps new coords to old: f_i = Σ_j P[i][j] e_j with P = I + N
    P = [dict(row) for row in N]
    for i in range(n):
        P[i][i] = P[i].get(i, ZERO) + ONE
    # P^{-1} = Σ_m N^m (nilpotent, characteristic 2)
    Pinv = [{i: ONE} for i in range(n)]
    power = [dict(row) for row in N]
    while any(power):
        for i in range(n):
            for j, v in power[i].items():
                Pinv[i][j] = Pinv[i].get(j, ZERO) + v
        power = _rowmul(power, N)
    idx = {g.id: k for k, g in enumerate(gens)}
    old = [dict() for _ in range(n)]
    for (i, j), lam in c.differential.items():
        old[idx[i]][idx[j]] = lam
    # ∂f_i = Σ_j P[i][j] ∂e_j in old coords, then convert e_k = Σ Pinv[k][l] f_l
    new = _rowmul(_rowmul(P, old), Pinv)
    diff = {}
    for i in range(n):
        for j, v in new[i].items():
            if v:
                diff[(gens[i].id, gens[j].id)] = v
    return NovikovComplex(gens, diff)


def _rowmul(X: list[dict], Y: list[dict]) -> list[dict]:
    out = []
    for row in X:
        acc: dict[int, NovikovScalar] = {}
        for j, v in row.items():
            for k, w in Y[j].items():
                acc[k] = acc.get(k, ZERO) + v * w
        out.append({k: v for k, v in acc.items() if v})
    return out


def random_novikov_complex(rng: np.random.Generator, n_bars: int, *, p_infinite: float = 0.25, grid: float = 0.125, max_length: float = 6.0, density: float = 0.35, prefix: str = "") -> tuple[NovikovComplex, UnpinnedBarcode]:
    lengths = []
    for _ in range(n_bars):
        if rng.random() < p_infinite:
            lengths.append(INF)
        else:
            lengths.append(float(grid * rng.integers(1, int(max_length / grid) + 1)))
    c = svd_form_complex(lengths, rng, grid=grid, prefix=prefix)
    return scramble(c, rng, density=density, grid=grid), UnpinnedBarcode(lengths)
