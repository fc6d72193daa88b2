"""Growth-rate fitting for counting sequences.

All rates are base-2: a series growing like 2^(ρk) has rate ρ. The
limsup in the asymptotic definitions is replaced by a least-squares fit
over the top half of the index range.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

INF = math.inf


@dataclass(frozen=True)
class GrowthSeries:
    index: tuple[float, ...]
    counts: tuple[float, ...]

    def __init__(self, index: Iterable[float], counts: Iterable[float]):
        idx = tuple(float(i) for i in index)
        cnt = tuple(float(c) for c in counts)
        if len(idx) != len(cnt):
            raise ValueError("index and counts differ in length")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("index must be strictly increasing")
        if any(not c >= 0 for c in cnt):
            raise ValueError("counts must be nonnegative")
        object.__setattr__(self, "index", idx)
        object.__setattr__(self, "counts", cnt)

    def __len__(self) -> int:
        return len(self.index)

    def tail(self) -> "GrowthSeries":
        """Points whose index lies in the top half of the index range."""
        lo, hi = self.index[0], self.index[-1]
        mid = (lo + hi) / 2
        keep = [k for k, x in enumerate(self.index) if x >= mid]
        return GrowthSeries([self.index[k] for k in keep], [self.counts[k] for k in keep])

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.index), np.asarray(self.counts)


@dataclass(frozen=True)
class RateFit:
    value: float
    kind: str  # "rate" or "degree"
    window: tuple[float, float]
    residual: float
    n_points: int
    notes: tuple[str, ...] = ()

    @property
    def rate(self) -> float:
        return self.value

    @property
    def degree(self) -> float:
        return self.value


def _lstsq_slope(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    X = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    return float(coef[0]), float(np.sqrt(np.mean(resid ** 2)))


def exp_growth_rate(series: GrowthSeries) -> RateFit:
    """Slope of log2(count) against the index over the top half of the range.

    Zero counts are dropped (log 0 = -inf under log^+); an all-zero tail
    has rate 0.
    """
    tail = series.tail()
    x, c = tail.as_arrays()
    window = (tail.index[0], tail.index[-1]) if len(tail) else (math.nan, math.nan)
    if len(c) and not np.any(c > 0):
        if len(c) < 4:
            raise ValueError("fewer than 4 points in the tail")
        return RateFit(0.0, "rate", window, 0.0, len(c), ("all-zero tail",))
    keep = c > 0
    if keep.sum() < 4:
        raise ValueError(f"fewer than 4 usable points in the tail ({int(keep.sum())})")
    slope, res = _lstsq_slope(x[keep], np.log2(c[keep]))
    notes = () if keep.all() else (f"dropped {int((~keep).sum())} zero counts",)
    return RateFit(slope, "rate", window, res, int(keep.sum()), notes)


def poly_degree_fit(series: GrowthSeries) -> RateFit:
    """Slope of log2(count) against log2(index) over the top half of the range."""
    if len(series) < 6:
        raise ValueError("need at least 6 points")
    tail = series.tail()
    x, c = tail.as_arrays()
    keep = (c > 0) & (x > 0)
    notes = []
    if not keep.all():
        msg = f"dropped {int((~keep).sum())} nonpositive points from the tail"
        warnings.warn(msg)
        notes.append(msg)
    if keep.sum() < 2:
        raise ValueError("not enough positive points in the tail")
    slope, res = _lstsq_slope(np.log2(x[keep]), np.log2(c[keep]))
    return RateFit(slope, "degree", (tail.index[0], tail.index[-1]), res, int(keep.sum()), tuple(notes))


@dataclass(frozen=True)
class BoundCertificate:
    """count(x) <= c_n x^n + c_0 fitted on the first half, checked on everything."""

    n: float
    c_n: float
    c_0: float
    margin: float
    max_violation: float
    passed: bool
    fit_window: tuple[float, float]


def certify_polynomial_bound(series: GrowthSeries, n: float, *, margin: float = 0.05) -> BoundCertificate:
    """Fit the tightest envelope c_n x^n + c_0 on the first half of the data.

    The constants come from a small linear program minimizing the mean of
    the envelope over the fit window subject to covering every fitted
    point.
    They are inflated by ``margin`` and must then cover the whole series;
    covering a finite range alone would be vacuous, so the second half acts
    as the test set.
    """
    from scipy.optimize import linprog

    x, c = series.as_arrays()
    if len(x) < 4:
        raise ValueError("need at least 4 points")
    if np.any(x <= 0):
        raise ValueError("index must be positive for a power envelope")
    half = max(2, len(x) // 2)
    xf, cf = x[:half], c[:half]
    basis = xf ** n
    res = linprog(
        c=[float(basis.mean()), 1.0],
        A_ub=-np.column_stack([basis, np.ones_like(basis)]),
        b_ub=-cf,
        bounds=[(0, None), (0, None)],
        method="highs",
    )
    if not res.success:
        raise RuntimeError(f"envelope fit failed: {res.message}")
    c_n, c_0 = (float(v) * (1 + margin) for v in res.x)
    env = c_n * x ** n + c_0
    viol = float(np.max(c - env))
    return BoundCertificate(n, c_n, c_0, margin, max(viol, 0.0), bool(viol <= 0), (float(xf[0]), float(xf[-1])))


@dataclass(frozen=True)
class BarcodeEntropyEstimate:
    per_eps: tuple[tuple[float, RateFit], ...]
    value: float
    eps_used: float
    monotone: bool
    notes: tuple[str, ...] = field(default=())


def barcode_entropy_estimate(barcodes: Sequence, index: Sequence[float], eps_grid: Sequence[float], *, pinned_at_index: bool = False, slack: float = 1e-6) -> BarcodeEntropyEstimate:
    """Per-ε exponential rates of b_ε over a barcode family, and the smallest-ε value.

    ``barcodes`` may hold Barcode or UnpinnedBarcode objects. With
    ``pinned_at_index`` the index is an action level s and b_ε(s) counts
    bars born below s; otherwise every bar counts.
    """
    from .novikov import UnpinnedBarcode, b_eps_unpinned
    from .persistence import barcode_function

    if len(barcodes) < 4:
        raise ValueError("need at least 4 barcodes")
    if len(barcodes) != len(index):
        raise ValueError("barcodes and index differ in length")
    eps_sorted = sorted(set(float(e) for e in eps_grid), reverse=True)
    per = []
    for eps in eps_sorted:
        counts = []
        for bc, s in zip(barcodes, index):
            if isinstance(bc, UnpinnedBarcode):
                counts.append(b_eps_unpinned(bc, eps))
            else:
                counts.append(barcode_function(bc, eps, s if pinned_at_index else INF))
        per.append((eps, exp_growth_rate(GrowthSeries(index, counts))))
    rates = [f.rate for _, f in per]
    monotone = all(b >= a - max(slack, fa.residual + fb.residual) for (_, fa), (_, fb), a, b in zip(per, per[1:], rates, rates[1:]))
    notes = ("value is the rate at the smallest ε in the grid",)
    if not monotone:
        notes += ("ε-profile not monotone within fit residuals",)
    return BarcodeEntropyEstimate(tuple(per), rates[-1], eps_sorted[-1], monotone, notes)
