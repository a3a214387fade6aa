"""Constructive content of the stability theorems.

build_semiconjugacy realizes the near-identity intertwining map as the
shadow of the perturbed orbit; build_H_window realizes the set-valued
stability map as a nested intersection of pulled-back entourage cross
sections, computed exactly in box arithmetic.  The verification operations
check the definitional properties those constructions must satisfy, and
extract_persistence_witness recovers a tracing point from the windows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .actions import Action, composite_scales, evaluate
from .errors import InputError, NumericError, SolverError
from .groups import CayleyBall, GroupElement, cayley_ball, multiply_elements
from .pseudo_orbits import orbit_of_nearby_action
from .shadowing import shadow
from .uniformity import (
    BoxSet,
    LebesgueMeasure,
    MetricEntourage,
    as_point,
    cross_section,
    dmax,
)


# ---------------------------------------------------------------------------
# semiconjugacy (single-valued stability map)


@dataclass(eq=False)
class SemiRow:
    x: np.ndarray
    fx: np.ndarray
    radius: float
    solved: bool
    passed: bool


@dataclass(eq=False)
class SemiconjugacyTable:
    rows: list
    epsilon: float
    ball_radius: int
    equivariance_residuals: dict = field(default_factory=dict)
    identity_distance_max: float = float("nan")

    @property
    def all_pass(self) -> bool:
        return all(r.solved and r.passed for r in self.rows)

    @property
    def max_radius(self) -> float:
        return max((r.radius for r in self.rows if r.solved), default=0.0)


def build_semiconjugacy(phi: Action, psi: Action, ball: CayleyBall,
                        entourage: MetricEntourage, samples,
                        certified_bound: float) -> SemiconjugacyTable:
    """f(x) := the Phi-shadow of Psi's orbit of x, per sample."""
    rows = []
    for x in samples:
        x = as_point(x)
        po = orbit_of_nearby_action(psi, ball, x, phi, certified_bound)
        try:
            result = shadow(po, phi)
        except (SolverError, NumericError):
            rows.append(SemiRow(x=x, fx=x * float("nan"), radius=float("nan"),
                                solved=False, passed=False))
            continue
        rows.append(
            SemiRow(
                x=x,
                fx=result.point,
                radius=result.tracing_radius,
                solved=True,
                passed=result.tracing_radius <= entourage.epsilon,
            )
        )
    return SemiconjugacyTable(
        rows=rows, epsilon=entourage.epsilon, ball_radius=ball.radius
    )


@dataclass(frozen=True)
class SemiconjugacyReport:
    max_equivariance_residual: float
    max_identity_distance: float
    residual_tolerance: float
    epsilon: float
    passed: bool


def verify_semiconjugacy(table: SemiconjugacyTable, phi: Action, psi: Action,
                         ball: CayleyBall, test_elements, tol: float,
                         certified_bound: float) -> SemiconjugacyReport:
    """Check f(Psi_h x) = Phi_h(f(x)) and (x, f(x)) within the entourage.

    The left side is recomputed from its own orbit window based at Psi_h(x).
    """
    per_h = {}
    id_dist = 0.0
    for row in table.rows:
        if not row.solved:
            continue
        id_dist = max(id_dist, dmax(row.x, row.fx))
        for h in test_elements:
            z = evaluate(psi, h, row.x)
            po = orbit_of_nearby_action(psi, ball, z, phi, certified_bound)
            f_z = shadow(po, phi).point
            residual = dmax(f_z, evaluate(phi, h, row.fx))
            per_h[h.key] = max(per_h.get(h.key, 0.0), residual)
    table.equivariance_residuals = per_h
    table.identity_distance_max = id_dist
    max_res = max(per_h.values(), default=0.0)
    return SemiconjugacyReport(
        max_equivariance_residual=max_res,
        max_identity_distance=id_dist,
        residual_tolerance=tol,
        epsilon=table.epsilon,
        passed=(max_res <= tol and id_dist <= table.epsilon),
    )


def continuity_modulus(table: SemiconjugacyTable, delta: float) -> float:
    """Empirical modulus: sup |f(x) - f(x')| over sample pairs closer than delta."""
    rows = [r for r in table.rows if r.solved]
    worst = 0.0
    for i, a in enumerate(rows):
        for b in rows[i + 1:]:
            if dmax(a.x, b.x) <= delta:
                worst = max(worst, dmax(a.fx, b.fx))
    return worst


# ---------------------------------------------------------------------------
# set-valued stability map H on finite windows


@dataclass(eq=False)
class HWindow:
    x: np.ndarray
    eps_prime: float
    entries: list                  # list of (m, BoxSet), m increasing

    def deepest_nonempty(self):
        for m, box in reversed(self.entries):
            if not box.is_empty():
                return m, box
        return None

    def box_at(self, m: int) -> BoxSet:
        for mm, box in self.entries:
            if mm == m:
                return box
        raise InputError(f"no window at radius {m}")

    def to_jsonable(self):
        return {
            "x": self.x.tolist(),
            "eps_prime": self.eps_prime,
            "windows": {str(m): box.to_jsonable() for m, box in self.entries},
        }


def _orbit_table(psi: Action, ball: CayleyBall, x) -> dict:
    return {g.key: evaluate(psi, g, x) for g in ball.elements}


def _constraint_box(phi: Action, eps: Fraction, center, g: GroupElement) -> BoxSet:
    """Phi_{g^-1}(E'[center]) for diagonal-linear Phi: an exact box."""
    scales = composite_scales(phi, g)
    box = []
    for c, s in zip(center, scales):
        lo = (Fraction(float(c)) - eps) / Fraction(float(s))
        hi = (Fraction(float(c)) + eps) / Fraction(float(s))
        box.append((min(lo, hi), max(lo, hi)))
    return BoxSet(phi.dimension, [tuple(box)], _disjoint=True)


def build_H_window(phi: Action, psi: Action, eps_prime: MetricEntourage, x,
                   radii, ball: CayleyBall = None, orbit: dict = None,
                   shift: GroupElement = None) -> HWindow:
    """H_m(x) = intersection over the radius-m ball of Phi_{g^-1}(E'[Psi_g x]).

    Computed exactly in box arithmetic for diagonal-linear Phi.  When an
    ``orbit`` table (and optional ``shift``) is supplied, the center for
    constraint g is looked up as orbit[g * shift]; this realizes the identity
    Psi_g(Psi_h x) = Psi_{gh}(x) without re-evaluating the action.
    """
    if not phi.all_diagonal_linear():
        raise InputError("exact H windows need an all-diagonal-linear action")
    radii = sorted(radii)
    if ball is None:
        ball = cayley_ball(phi.genset, max(radii))
    x = as_point(x)
    eps = Fraction(eps_prime.epsilon)
    entries = []
    current = None
    radius_iter = iter(radii)
    next_m = next(radius_iter)
    # ball elements are sorted by length, so one sweep yields every window
    idx = 0
    elements = ball.elements
    for m in range(ball.radius + 1):
        while idx < len(elements) and ball.length_of(elements[idx]) <= m:
            g = elements[idx]
            if orbit is not None:
                lookup = g if shift is None else multiply_elements(
                    ball.genset, g, shift
                )
                center = orbit[lookup.key]
            else:
                center = evaluate(psi, g, x)
            constraint = _constraint_box(phi, eps, center, g)
            current = constraint if current is None else current.intersect(constraint)
            idx += 1
        if m == next_m:
            entries.append((m, current))
            try:
                next_m = next(radius_iter)
            except StopIteration:
                break
    return HWindow(x=x, eps_prime=eps_prime.epsilon, entries=entries)


@dataclass(frozen=True)
class HPropertiesReport:
    nesting_ok: bool
    volume_ratios: tuple
    sandwich_ok: bool
    identity_entourage_ok: bool
    mu_values: tuple
    passed: bool


def verify_H_properties(phi: Action, psi: Action, x, h: GroupElement,
                        radii, mu: LebesgueMeasure,
                        eps_prime: MetricEntourage,
                        outer: MetricEntourage = None) -> HPropertiesReport:
    """Nesting, volume decay, the equivariance sandwich, and (Id, H) in E.

    The sandwich H_{m+l}(Psi_h x) within Phi_h(H_m(x)) within H_{m-l}(Psi_h x)
    is the exact finite-window form of equivariance, with l the word
    length of h.
    """
    radii = sorted(radii)
    if outer is None:
        outer = eps_prime
    x = as_point(x)
    l_h = len(h.word)
    big = cayley_ball(phi.genset, max(radii) + l_h)
    orbit = _orbit_table(psi, big, x)
    hw_x = build_H_window(phi, psi, eps_prime, x,
                          list(range(max(radii) + 1)), ball=big, orbit=orbit)
    z = orbit[h.key]
    hw_z = build_H_window(phi, psi, eps_prime, z,
                          list(range(max(radii) + 1)), ball=big, orbit=orbit,
                          shift=h)

    nesting_ok = True
    prev = None
    for m in radii:
        box = hw_x.box_at(m)
        if prev is not None and not prev.contains_boxset(box):
            nesting_ok = False
        prev = box

    vols = [mu.measure(hw_x.box_at(m)) for m in radii]
    ratios = tuple(
        float(b / a) if a != 0 else float("nan") for a, b in zip(vols, vols[1:])
    )

    h_scales = composite_scales(phi, h)
    sandwich_ok = True
    for m in radii:
        if m - l_h < 0 or m + l_h > max(radii):
            continue
        image = hw_x.box_at(m).linear_image([Fraction(float(s)) for s in h_scales])
        inner = hw_z.box_at(m + l_h)
        outer_box = hw_z.box_at(m - l_h)
        if not image.contains_boxset(inner):
            sandwich_ok = False
        if not outer_box.contains_boxset(image):
            sandwich_ok = False

    identity_ok = all(
        cross_section(outer, x).contains_boxset(hw_x.box_at(m)) for m in radii
    )

    return HPropertiesReport(
        nesting_ok=nesting_ok,
        volume_ratios=ratios,
        sandwich_ok=sandwich_ok,
        identity_entourage_ok=identity_ok,
        mu_values=tuple(float(v) for v in vols),
        passed=nesting_ok and sandwich_ok and identity_ok,
    )


# ---------------------------------------------------------------------------
# singleton H from a semiconjugacy, and the persistence witness


@dataclass(frozen=True)
class SingletonHReport:
    domain_complete: bool
    null_values: bool
    near_identity: bool
    equivariant: bool
    failing_rows: tuple

    @property
    def passed(self) -> bool:
        return (
            self.domain_complete
            and self.null_values
            and self.near_identity
            and self.equivariant
        )


def singleton_H_from_map(table: SemiconjugacyTable, mu: LebesgueMeasure,
                         entourage: MetricEntourage,
                         residual_tol: float) -> SingletonHReport:
    """H(x) = {f(x)}: the four measured-stability conditions on the samples.

    (a) domain covers every sample, (b) each singleton is mu-null,
    (c) distance(x, f(x)) within the entourage, (d) equivariance residuals
    (filled by verify_semiconjugacy) within tolerance.
    """
    failing = tuple(
        i for i, row in enumerate(table.rows) if not row.solved
    )
    domain_complete = not failing
    null_values = mu.singleton_measure() == 0
    near_identity = all(
        dmax(row.x, row.fx) <= entourage.epsilon
        for row in table.rows if row.solved
    )
    residuals = table.equivariance_residuals
    equivariant = bool(residuals) and all(
        v <= residual_tol for v in residuals.values()
    )
    return SingletonHReport(
        domain_complete=domain_complete,
        null_values=null_values,
        near_identity=near_identity,
        equivariant=equivariant,
        failing_rows=failing,
    )


@dataclass(frozen=True)
class WitnessReport:
    y: np.ndarray
    depth: int
    max_distance: float
    tolerance: float
    passed: bool


def extract_persistence_witness(hw: HWindow, phi: Action, psi: Action,
                                ball: CayleyBall = None):
    """A tracing point pulled out of the deepest nonempty window.

    Returns None when every window is empty.  The audit checks
    distance(Psi_g x, Phi_g y) <= eps' + slack over the radius-m ball,
    where slack is the half-width of the window box.
    """
    deepest = hw.deepest_nonempty()
    if deepest is None:
        return None
    m, box = deepest
    if ball is None or ball.radius < m:
        ball = cayley_ball(phi.genset, m)
    los, his = box.bounding_box()
    y = np.array([float((lo + hi) / 2) for lo, hi in zip(los, his)])
    slack = max(float((hi - lo) / 2) for lo, hi in zip(los, his))
    worst = 0.0
    for g in ball.elements:
        if ball.length_of(g) > m:
            continue
        d = dmax(evaluate(psi, g, hw.x), evaluate(phi, g, y))
        worst = max(worst, d)
    tol = hw.eps_prime + slack + 1e-12
    return WitnessReport(
        y=y, depth=m, max_distance=worst, tolerance=tol, passed=worst <= tol
    )
