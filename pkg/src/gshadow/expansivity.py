"""Separation search, truncated dynamical balls and volume-decay reports."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .actions import Action, composite_scales, evaluate
from .errors import InputError
from .groups import cayley_ball
from .uniformity import BoxSet, LebesgueMeasure, MetricEntourage, as_point, dmax


@dataclass(frozen=True)
class SeparationCertificate:
    g: object                      # the separating GroupElement
    attained_distance: float
    searched_radius: int


def separation_search(phi: Action, x, y, entourage: MetricEntourage,
                      max_radius: int):
    """First group element (shortest, deterministic tie-break) pushing x and y
    apart beyond the entourage radius, or None if the ball is exhausted."""
    x = as_point(x)
    y = as_point(y)
    if np.array_equal(x, y):
        raise InputError("separation search needs distinct points")
    ball = cayley_ball(phi.genset, max_radius)
    for g in ball.elements:        # sorted by (length, key)
        d = dmax(evaluate(phi, g, x), evaluate(phi, g, y))
        if d > entourage.epsilon:
            return SeparationCertificate(
                g=g,
                attained_distance=d,
                searched_radius=ball.length_of(g),
            )
    return None


def dynamical_ball(phi: Action, x, entourage: MetricEntourage, m: int,
                   exact_center=None) -> BoxSet:
    """Truncated dynamical ball: points never separated from x within radius m.

    Exact for all-diagonal-linear actions: per coordinate the half-width is
    eps divided by the largest composite scale in the ball.  ``exact_center``
    may supply the center as exact rationals (used by conjugacy transport).
    """
    if not phi.all_diagonal_linear():
        raise InputError(
            "exact dynamical balls need an all-diagonal-linear action"
        )
    if exact_center is not None:
        center = [Fraction(c) for c in exact_center]
    else:
        center = [Fraction(float(c)) for c in as_point(x)]
    ball = cayley_ball(phi.genset, m)
    scales = np.abs(np.array([composite_scales(phi, g) for g in ball.elements]))
    max_scale = scales.max(axis=0)
    eps = Fraction(entourage.epsilon)
    box = []
    for c, s in zip(center, max_scale):
        hw = eps / Fraction(float(s))
        box.append((c - hw, c + hw))
    return BoxSet(phi.dimension, [tuple(box)], _disjoint=True)


@dataclass(frozen=True)
class MuExpansivityReport:
    radii: tuple
    volumes: tuple              # per sample: tuple of Fractions, one per radius
    ratios: tuple               # observed consecutive-volume ratios per sample
    analytic_ratio: float
    threshold: float
    passed: bool


def per_step_contraction(phi: Action) -> float:
    """Analytic volume ratio per radius step for diagonal-linear actions."""
    ratio = 1.0
    for i in range(phi.dimension):
        ms = max(
            abs(float(phi.map(s).scales[i])) for s in phi.genset.symbols
        )
        ratio /= ms
    return ratio


def mu_expansivity_report(phi: Action, entourage: MetricEntourage, samples,
                          radii, mu: LebesgueMeasure,
                          threshold: float = 1e-6) -> MuExpansivityReport:
    """Volumes of truncated dynamical balls per sample and radius.

    Passes iff volumes strictly decrease in the radius and the final volume
    falls below the threshold: the finite surrogate for measure zero.
    """
    radii = tuple(sorted(radii))
    volumes = []
    ratios = []
    for x in samples:
        vols = tuple(
            mu.measure(dynamical_ball(phi, x, entourage, m)) for m in radii
        )
        volumes.append(vols)
        ratios.append(
            tuple(
                float(b / a) if a != 0 else float("nan")
                for a, b in zip(vols, vols[1:])
            )
        )
    decreasing = all(
        all(b < a for a, b in zip(vols, vols[1:])) for vols in volumes
    )
    small_enough = all(float(vols[-1]) <= threshold for vols in volumes)
    return MuExpansivityReport(
        radii=radii,
        volumes=tuple(volumes),
        ratios=tuple(ratios),
        analytic_ratio=per_step_contraction(phi),
        threshold=threshold,
        passed=decreasing and small_enough,
    )
