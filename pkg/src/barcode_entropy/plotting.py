"""Report figures rendered to PNG bytes with the Agg backend.

Metadata that would vary between runs (software version stamps) is
stripped so repeated runs give identical files.
"""
from __future__ import annotations

import io
import math
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .growth import GrowthSeries  # noqa: E402
from .persistence import Barcode  # noqa: E402

_STYLE = {"figure.dpi": 100, "savefig.dpi": 100, "font.size": 9, "svg.hashsalt": "barcode-entropy"}


def _png(fig) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="png", metadata={"Software": None})
    plt.close(fig)
    return buf.getvalue()


def barcode_figure(b: Barcode | Sequence[float], title: str = "") -> bytes:
    """Horizontal bars; infinite bars run to the right edge with an arrow.

    Accepts a Barcode or a list of unpinned lengths (drawn from 0).
    """
    if isinstance(b, Barcode):
        spans = b.expanded()
    else:
        spans = [(0.0, float(x)) for x in sorted(b)]
    finite = [e for _, e in spans if e != math.inf] + [s for s, _ in spans]
    right = (max(finite) if finite else 1.0) * 1.15 + 1e-9
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(6, max(1.5, 0.18 * len(spans) + 0.8)))
        for y, (s, e) in enumerate(spans):
            if e == math.inf:
                ax.annotate("", xy=(right, y), xytext=(s, y), arrowprops={"arrowstyle": "->", "lw": 1.5})
            else:
                ax.plot([s, e], [y, y], lw=2, color="C0")
        ax.set_xlim(min((s for s, _ in spans), default=0.0) - 0.05 * right, right)
        ax.set_yticks([])
        ax.set_xlabel("action")
        ax.set_title(title or f"{len(spans)} bars")
        fig.tight_layout()
        return _png(fig)


def growth_figure(series: GrowthSeries, *, log: bool = True, label: str = "count", title: str = "") -> bytes:
    x, c = series.as_arrays()
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        keep = c > 0 if log else np.ones_like(c, bool)
        ax.plot(x[keep], c[keep], "o-", ms=3)
        if log:
            ax.set_yscale("log", base=2)
        ax.set_xlabel("index")
        ax.set_ylabel(label)
        ax.set_title(title)
        fig.tight_layout()
        return _png(fig)


def entropy_profile_figure(per_eps: Sequence[tuple[float, float]], title: str = "") -> bytes:
    """Rate against ε on a log axis; the estimate is the leftmost point."""
    eps = [e for e, _ in per_eps]
    rate = [r for _, r in per_eps]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot(eps, rate, "s-")
        ax.set_xscale("log", base=2)
        ax.set_xlabel("ε")
        ax.set_ylabel("rate (bits per step)")
        ax.set_title(title)
        fig.tight_layout()
        return _png(fig)
