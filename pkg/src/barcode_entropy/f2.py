"""Linear algebra over F2 with vectors packed into Python ints.

Bit i of an int is the coefficient of basis vector i. XOR is addition.
"""
from __future__ import annotations

from typing import Iterable, Sequence


def bits(v: int) -> list[int]:
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def lead(v: int) -> int:
    """Index of the highest set bit, -1 for the zero vector."""
    return v.bit_length() - 1


class Echelon:
    """Incrementally built echelon basis, optionally tagging each row.

    Tags are ints combined by XOR alongside the rows, so reducing a vector
    also reports which tagged generators were used.
    """

    __slots__ = ("rows",)

    def __init__(self) -> None:
        self.rows: dict[int, tuple[int, int]] = {}

    def reduce(self, v: int, tag: int = 0) -> tuple[int, int]:
        rows = self.rows
        while v:
            p = v.bit_length() - 1
            hit = rows.get(p)
            if hit is None:
                break
            v ^= hit[0]
            tag ^= hit[1]
        return v, tag

    def add(self, v: int, tag: int = 0) -> bool:
        v, tag = self.reduce(v, tag)
        if not v:
            return False
        self.rows[v.bit_length() - 1] = (v, tag)
        return True

    def __len__(self) -> int:
        return len(self.rows)

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def basis(self) -> list[int]:
        return [r for r, _ in self.rows.values()]


def rank(vectors: Iterable[int]) -> int:
    e = Echelon()
    for v in vectors:
        e.add(v)
    return len(e)


def span_basis(vectors: Iterable[int]) -> list[int]:
    e = Echelon()
    for v in vectors:
        e.add(v)
    return e.basis()


def apply(columns: Sequence[int], v: int) -> int:
    """Image of v under the matrix whose j-th column is columns[j]."""
    out = 0
    for j in bits(v):
        out ^= columns[j]
    return out


def compose(second: Sequence[int], first: Sequence[int]) -> list[int]:
    """Columns of second @ first."""
    return [apply(second, c) for c in first]


def kernel(columns: Sequence[int]) -> list[int]:
    """Basis of the null space of a matrix given by its columns."""
    e = Echelon()
    out = []
    for j, c in enumerate(columns):
        r, tag = e.reduce(c, 1 << j)
        if r:
            e.rows[r.bit_length() - 1] = (r, tag)
        else:
            out.append(tag)
    return out


def image(columns: Sequence[int]) -> list[int]:
    return span_basis(columns)


def intersect(u: Sequence[int], w: Sequence[int]) -> list[int]:
    """Basis of span(u) ∩ span(w) by tagged elimination.

    Reduce w against an echelon form of u tagged with nothing, and of w
    tagged by itself: a combination of w landing in span(u) shows up as a
    zero residue whose tag is the intersection vector.
    """
    e = Echelon()
    for v in u:
        e.add(v, 0)
    out = Echelon()
    for v in w:
        r, tag = e.reduce(v, v)
        if r:
            e.rows[r.bit_length() - 1] = (r, tag)
        elif tag:
            out.add(tag)
    return out.basis()


def subspace_sum(*spaces: Sequence[int]) -> list[int]:
    e = Echelon()
    for s in spaces:
        for v in s:
            e.add(v)
    return e.basis()
