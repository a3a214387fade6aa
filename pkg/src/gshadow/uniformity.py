"""Max-metric entourages on R^n and exact axis-aligned box-set arithmetic.

Entourages are realized as E_eps = {(x, y) : max_i |x_i - y_i| <= eps},
closed and symmetric.  Box sets keep their endpoints as exact rationals so
intersections, diagonal-linear images, inclusion checks and Lebesgue volumes
are computed without rounding; floats entering a box are converted exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InputError


def as_point(coords) -> np.ndarray:
    x = np.asarray(coords, dtype=float)
    if x.ndim != 1:
        raise InputError("a point must be a flat coordinate vector")
    if not np.all(np.isfinite(x)):
        raise InputError("point coordinates must be finite")
    return x


def dmax(x, y) -> float:
    """Max-metric distance."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise InputError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return float(np.max(np.abs(x - y))) if x.size else 0.0


@dataclass(frozen=True)
class MetricEntourage:
    """The closed entourage of radius eps in the max metric."""

    epsilon: float

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise InputError("entourage radius must be positive")


def contains(entourage: MetricEntourage, x, y) -> bool:
    """(x, y) in E_eps, boundary inclusive."""
    return dmax(x, y) <= entourage.epsilon


def compose(e1: MetricEntourage, e2: MetricEntourage) -> MetricEntourage:
    """E_{a} o E_{b} = E_{a+b} in the max-metric realization."""
    return MetricEntourage(e1.epsilon + e2.epsilon)


def power(entourage: MetricEntourage, m: int) -> MetricEntourage:
    if m < 1:
        raise InputError("entourage power must be >= 1")
    return MetricEntourage(entourage.epsilon * m)


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, np.integer):
        return Fraction(int(v))
    if isinstance(v, np.floating):
        return Fraction(float(v))
    return Fraction(v)


def _box_intersect(a, b):
    out = []
    for (alo, ahi), (blo, bhi) in zip(a, b):
        lo = max(alo, blo)
        hi = min(ahi, bhi)
        if lo > hi:
            return None
        out.append((lo, hi))
    return tuple(out)


def _box_minus_box(a, b):
    """Split a \\ b into boxes with disjoint interiors."""
    if _box_intersect(a, b) is None:
        return [a]
    pieces = []
    cur = list(a)
    for i, ((alo, ahi), (blo, bhi)) in enumerate(zip(a, b)):
        lo, hi = cur[i]
        if lo < blo:
            piece = list(cur)
            piece[i] = (lo, min(hi, blo))
            if piece[i][0] < piece[i][1]:
                pieces.append(tuple(piece))
            lo = blo
        if hi > bhi:
            piece = list(cur)
            piece[i] = (max(lo, bhi), hi)
            if piece[i][0] < piece[i][1]:
                pieces.append(tuple(piece))
            hi = bhi
        if lo > hi:
            return pieces
        cur[i] = (lo, hi)
    return pieces


def _box_volume(box) -> Fraction:
    vol = Fraction(1)
    for lo, hi in box:
        vol *= hi - lo
    return vol


class BoxSet:
    """A finite union of closed axis-aligned boxes with exact endpoints.

    The internal list always has pairwise disjoint interiors, which makes
    volume a plain sum and inclusion a difference-is-empty check.
    """

    __slots__ = ("dimension", "boxes")

    def __init__(self, dimension: int, boxes=(), _disjoint=False):
        if dimension < 1:
            raise InputError("dimension must be >= 1")
        norm = []
        for box in boxes:
            if len(box) != dimension:
                raise InputError("box dimension mismatch")
            fbox = tuple((_frac(lo), _frac(hi)) for lo, hi in box)
            for lo, hi in fbox:
                if lo > hi:
                    raise InputError("empty box: lo > hi")
            norm.append(fbox)
        if not _disjoint:
            disjoint = []
            for box in norm:
                remaining = [box]
                for existing in disjoint:
                    next_remaining = []
                    for piece in remaining:
                        next_remaining.extend(_box_minus_box(piece, existing))
                    remaining = next_remaining
                disjoint.extend(remaining)
            norm = disjoint
        self.dimension = dimension
        self.boxes = tuple(norm)

    @classmethod
    def empty(cls, dimension: int) -> "BoxSet":
        return cls(dimension, (), _disjoint=True)

    @classmethod
    def from_bounds(cls, los, his) -> "BoxSet":
        los = list(los)
        his = list(his)
        if len(los) != len(his):
            raise InputError("bounds length mismatch")
        return cls(len(los), [tuple(zip(los, his))])

    def is_empty(self) -> bool:
        return not self.boxes

    def volume(self) -> Fraction:
        return sum((_box_volume(b) for b in self.boxes), Fraction(0))

    def intersect(self, other: "BoxSet") -> "BoxSet":
        self._check(other)
        out = []
        for a in self.boxes:
            for b in other.boxes:
                c = _box_intersect(a, b)
                if c is not None and _box_volume(c) >= 0:
                    out.append(c)
        # intersections of two disjoint families stay disjoint
        out = [c for c in out if all(lo <= hi for lo, hi in c)]
        return BoxSet(self.dimension, out, _disjoint=True)

    def difference(self, other: "BoxSet") -> "BoxSet":
        self._check(other)
        remaining = list(self.boxes)
        for b in other.boxes:
            next_remaining = []
            for a in remaining:
                next_remaining.extend(_box_minus_box(a, b))
            remaining = next_remaining
        return BoxSet(self.dimension, remaining, _disjoint=True)

    def union(self, other: "BoxSet") -> "BoxSet":
        self._check(other)
        return BoxSet(self.dimension, self.boxes + other.boxes)

    def contains_boxset(self, other: "BoxSet") -> bool:
        """other subset of self, exact up to degenerate (volume-0) slivers."""
        return other.difference(self).volume() == 0

    def contains_point(self, x) -> bool:
        x = [_frac(float(v)) for v in x]
        if len(x) != self.dimension:
            raise InputError("point dimension mismatch")
        for box in self.boxes:
            if all(lo <= v <= hi for v, (lo, hi) in zip(x, box)):
                return True
        return False

    def linear_image(self, scales, offsets=None) -> "BoxSet":
        """Image under the diagonal-affine map x_i -> scale_i * x_i + offset_i."""
        if np.isscalar(scales) or isinstance(scales, Fraction):
            scales = [scales] * self.dimension
        scales = [_frac(s) for s in scales]
        if len(scales) != self.dimension:
            raise InputError("scale dimension mismatch")
        if any(s == 0 for s in scales):
            raise InputError("linear image requires nonzero scales")
        if offsets is None:
            offsets = [Fraction(0)] * self.dimension
        else:
            offsets = [_frac(t) for t in offsets]
        out = []
        for box in self.boxes:
            new = []
            for (lo, hi), s, t in zip(box, scales, offsets):
                a = s * lo + t
                b = s * hi + t
                new.append((min(a, b), max(a, b)))
            out.append(tuple(new))
        return BoxSet(self.dimension, out, _disjoint=True)

    def inflate(self, r) -> "BoxSet":
        r = _frac(r)
        if r < 0:
            raise InputError("inflation radius must be >= 0")
        out = [tuple((lo - r, hi + r) for lo, hi in box) for box in self.boxes]
        return BoxSet(self.dimension, out)

    def bounding_box(self):
        if self.is_empty():
            return None
        los = [min(box[i][0] for box in self.boxes) for i in range(self.dimension)]
        his = [max(box[i][1] for box in self.boxes) for i in range(self.dimension)]
        return los, his

    def centers(self):
        return [
            np.array([float((lo + hi) / 2) for lo, hi in box]) for box in self.boxes
        ]

    def to_jsonable(self):
        return [[[float(lo), float(hi)] for lo, hi in box] for box in self.boxes]

    def _check(self, other):
        if self.dimension != other.dimension:
            raise InputError("box set dimension mismatch")

    def __repr__(self):
        return f"BoxSet(dim={self.dimension}, boxes={len(self.boxes)})"


def cross_section(entourage: MetricEntourage, x) -> BoxSet:
    """E[x]: the closed box of half-width eps around x."""
    eps = _frac(entourage.epsilon)
    coords = [_frac(float(v)) for v in np.asarray(x, dtype=float)]
    return BoxSet(len(coords), [tuple((c - eps, c + eps) for c in coords)],
                  _disjoint=True)


def intersect(a: BoxSet, b: BoxSet) -> BoxSet:
    return a.intersect(b)


def linear_image(a: BoxSet, scales, offsets=None) -> BoxSet:
    return a.linear_image(scales, offsets)


@dataclass(frozen=True)
class LebesgueMeasure:
    """Lebesgue measure on R^n, optionally rescaled by a pullback factor."""

    dimension: int
    scale: Fraction = Fraction(1)

    def measure(self, a: BoxSet) -> Fraction:
        if a.dimension != self.dimension:
            raise InputError("measure/box dimension mismatch")
        return self.scale * a.volume()

    def singleton_measure(self) -> Fraction:
        # non-atomic: every singleton is a degenerate box of volume 0
        return Fraction(0)

    def pullback(self, h_scales) -> "LebesgueMeasure":
        """Pullback under the diagonal-linear map with the given scales."""
        factor = Fraction(1)
        for s in h_scales:
            fs = _frac(s)
            if fs == 0:
                raise InputError("pullback requires nonzero scales")
            factor *= abs(fs)
        return LebesgueMeasure(self.dimension, self.scale / factor)


def volume(a: BoxSet, mu: LebesgueMeasure) -> Fraction:
    return mu.measure(a)
