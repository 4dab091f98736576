"""Exact one-dimensional interval-set algebra.

Sets are finite unions of intervals with :class:`QuadReal` endpoints.
Half-open flags are tracked internally so boolean operations are exact
at endpoints; anything exposed to users goes through :meth:`closure` or
:meth:`regularize` (closure of the interior), which is the convention
all window-derived regions follow.
"""

from __future__ import annotations

from dataclasses import dataclass

from .quadfield import QuadReal

__all__ = ["Cell", "IntervalSet"]


@dataclass(frozen=True)
class Cell:
    """One interval; lo_open/hi_open mark excluded endpoints."""

    lo: QuadReal
    hi: QuadReal
    lo_open: bool = False
    hi_open: bool = False

    def is_empty(self) -> bool:
        s = (self.hi - self.lo).sign()
        if s < 0:
            return True
        if s == 0:
            return self.lo_open or self.hi_open
        return False

    def is_point(self) -> bool:
        return (self.hi - self.lo).sign() == 0 and not (self.lo_open or self.hi_open)

    def contains(self, x: QuadReal) -> bool:
        sl = (x - self.lo).sign()
        sh = (self.hi - x).sign()
        if sl < 0 or sh < 0:
            return False
        if sl == 0 and self.lo_open:
            return False
        if sh == 0 and self.hi_open:
            return False
        return True

    def translate(self, t: QuadReal) -> "Cell":
        return Cell(self.lo + t, self.hi + t, self.lo_open, self.hi_open)

    def intersect(self, other: "Cell") -> "Cell":
        if (self.lo - other.lo).sign() > 0:
            lo, lo_open = self.lo, self.lo_open
        elif (self.lo - other.lo).sign() < 0:
            lo, lo_open = other.lo, other.lo_open
        else:
            lo, lo_open = self.lo, self.lo_open or other.lo_open
        if (self.hi - other.hi).sign() < 0:
            hi, hi_open = self.hi, self.hi_open
        elif (self.hi - other.hi).sign() > 0:
            hi, hi_open = other.hi, other.hi_open
        else:
            hi, hi_open = self.hi, self.hi_open or other.hi_open
        return Cell(lo, hi, lo_open, hi_open)

    def length(self) -> QuadReal:
        d = self.hi - self.lo
        return d if d.sign() > 0 else d * 0

    def __str__(self):
        l = "(" if self.lo_open else "["
        r = ")" if self.hi_open else "]"
        return f"{l}{self.lo}, {self.hi}{r}"


class IntervalSet:
    """Normalized finite union of cells (sorted, disjoint, merged)."""

    __slots__ = ("cells",)

    def __init__(self, cells=()):
        self.cells = self._normalize(list(cells))

    # -- constructors ---------------------------------------------------------

    @classmethod
    def closed(cls, lo: QuadReal, hi: QuadReal) -> "IntervalSet":
        return cls([Cell(lo, hi, False, False)])

    @classmethod
    def open(cls, lo: QuadReal, hi: QuadReal) -> "IntervalSet":
        return cls([Cell(lo, hi, True, True)])

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls([])

    # -- normalization --------------------------------------------------------

    @staticmethod
    def _mergeable(a: Cell, b: Cell) -> bool:
        # b.lo >= a.lo by sort order; merge if overlapping or touching
        # with the touch point present on at least one side
        s = (b.lo - a.hi).sign()
        if s < 0:
            return True
        if s == 0:
            return not (a.hi_open and b.lo_open)
        return False

    @classmethod
    def _normalize(cls, cells):
        cells = [c for c in cells if not c.is_empty()]
        if not cells:
            return []

        def key(c: Cell):
            return (c.lo.to_float(), c.lo_open)

        # float sort first, exact bubble fixups after: endpoints in one
        # computation are far apart relative to float error, but ties
        # (equal exact values) must still order open-after-closed
        cells.sort(key=key)
        for i in range(1, len(cells)):
            j = i
            while j > 0:
                prev, cur = cells[j - 1], cells[j]
                s = (cur.lo - prev.lo).sign()
                if s < 0 or (s == 0 and prev.lo_open and not cur.lo_open):
                    cells[j - 1], cells[j] = cur, prev
                    j -= 1
                else:
                    break
        out = [cells[0]]
        for c in cells[1:]:
            last = out[-1]
            if cls._mergeable(last, c):
                # extend the hull of last and c
                sh = (c.hi - last.hi).sign()
                if sh > 0:
                    out[-1] = Cell(last.lo, c.hi, last.lo_open, c.hi_open)
                elif sh == 0:
                    out[-1] = Cell(
                        last.lo, last.hi, last.lo_open, last.hi_open and c.hi_open
                    )
            else:
                out.append(c)
        return out

    # -- queries --------------------------------------------------------------

    def is_empty(self) -> bool:
        return not self.cells

    def contains(self, x: QuadReal) -> bool:
        return any(c.contains(x) for c in self.cells)

    def total_length(self):
        if not self.cells:
            return 0
        acc = self.cells[0].length()
        for c in self.cells[1:]:
            acc = acc + c.length()
        return acc

    def hull(self) -> Cell | None:
        if not self.cells:
            return None
        return Cell(self.cells[0].lo, self.cells[-1].hi)

    # -- boolean algebra ------------------------------------------------------

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.cells + other.cells)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        for a in self.cells:
            for b in other.cells:
                c = a.intersect(b)
                if not c.is_empty():
                    out.append(c)
        return IntervalSet(out)

    def minus(self, other: "IntervalSet") -> "IntervalSet":
        out = list(self.cells)
        for b in other.cells:
            nxt = []
            for a in out:
                nxt.extend(_cell_minus(a, b))
            out = nxt
        return IntervalSet(out)

    def is_subset_of(self, other: "IntervalSet") -> bool:
        return self.minus(other).is_empty()

    def translate(self, t: QuadReal) -> "IntervalSet":
        return IntervalSet([c.translate(t) for c in self.cells])

    # -- topology -------------------------------------------------------------

    def interior(self) -> "IntervalSet":
        return IntervalSet(
            [Cell(c.lo, c.hi, True, True) for c in self.cells if not c.is_point()]
        )

    def closure(self) -> "IntervalSet":
        return IntervalSet([Cell(c.lo, c.hi, False, False) for c in self.cells])

    def regularize(self) -> "IntervalSet":
        """Closure of the interior: prunes points, closes the rest."""
        return self.interior().closure()

    def boundary_points(self):
        """Endpoints of the closure (for boundary-hit tests)."""
        pts = []
        for c in self.cells:
            pts.append(c.lo)
            if (c.hi - c.lo).sign() != 0:
                pts.append(c.hi)
        return pts

    def __eq__(self, other):
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self.minus(other).is_empty() and other.minus(self).is_empty()

    def __str__(self):
        if not self.cells:
            return "{}"
        return " u ".join(str(c) for c in self.cells)

    __repr__ = __str__


def _cell_minus(a: Cell, b: Cell):
    """a with b removed, as up to two cells."""
    inter = a.intersect(b)
    if inter.is_empty():
        return [a]
    out = []
    left = Cell(a.lo, inter.lo, a.lo_open, not inter.lo_open)
    if not left.is_empty():
        out.append(left)
    right = Cell(inter.hi, a.hi, not inter.hi_open, a.hi_open)
    if not right.is_empty():
        out.append(right)
    return out
