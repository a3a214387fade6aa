"""Shadowing-point solvers, uniqueness certification and persistence checks.

The closed-form solver handles all-diagonal-linear actions coordinate by
coordinate via the extreme-exponent rule; the grid solver is an independent
brute-force oracle minimizing the max tracing distance.  Every result is
self-audited: the stored tracing radius is recomputed from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .actions import Action, composite_scales, evaluate
from .errors import InputError, SolverError
from .groups import CayleyBall
from .pseudo_orbits import PseudoOrbit, orbit_of_nearby_action
from .uniformity import MetricEntourage, as_point, dmax


@dataclass(eq=False)
class ShadowResult:
    point: np.ndarray
    tracing_radius: float
    method: str                      # "closed_form" | "brute_force"
    uniqueness: object = None
    boundary_warning: bool = False


def tracing_radius(action: Action, po: PseudoOrbit, y) -> float:
    """max over the ball of distance(x_g, Phi_g(y))."""
    y = as_point(y)
    worst = 0.0
    for g in po.ball.elements:
        d = dmax(po.points[g.key], evaluate(action, g, y))
        if d > worst:
            worst = d
    return worst


def _scale_table(action: Action, ball: CayleyBall) -> np.ndarray:
    """Composite scales of every ball element, elements in ball order."""
    return np.array([composite_scales(action, g) for g in ball.elements])


def shadow_diagonal_linear(po: PseudoOrbit, action: Action) -> ShadowResult:
    """Closed-form tracing point for all-diagonal-linear actions.

    Per coordinate, the shadow is read off from the ball element with the
    most extreme composite scale: pull the pseudo-orbit point there back to
    time zero.  Ties break by word length, then normal-form key (ball order).
    """
    if not action.all_diagonal_linear():
        raise SolverError(
            "closed-form solver needs an all-diagonal-linear action; "
            "use shadow_generic instead"
        )
    elements = po.ball.elements
    scales = _scale_table(action, po.ball)
    y = np.empty(action.dimension)
    for i in range(action.dimension):
        col = np.abs(scales[:, i])
        if np.max(col) > 1.0:
            idx = int(np.argmax(col))        # first max in ball order
        elif np.min(col) < 1.0:
            idx = int(np.argmin(col))
        else:
            raise SolverError(
                f"coordinate {i} has no hyperbolic witness in the ball "
                "(all composite scales are 1); use shadow_generic"
            )
        g_star = elements[idx]
        y[i] = po.points[g_star.key][i] / scales[idx, i]
    return ShadowResult(
        point=y,
        tracing_radius=tracing_radius(action, po, y),
        method="closed_form",
    )


def default_search_box(po: PseudoOrbit):
    """A box around x_e that contains the presumptive shadow.

    The shadow satisfies distance(x_e, y) <= tracing radius, so a few
    declared epsilons around the base point suffice.
    """
    hw = max(4.0 * po.declared_epsilon, 1e-4)
    x0 = po.base_point
    return x0 - hw, x0 + hw


def shadow_generic(po: PseudoOrbit, action: Action, search_box=None,
                   cells: int = 64, rounds: int = 4,
                   shrink: float = 8.0) -> ShadowResult:
    """Brute-force oracle: grid min-max refinement of the tracing radius.

    Each round scans a full grid over the current box and re-centers a box
    shrunk by ``shrink`` on the incumbent, clipped to the original bounds.
    """
    if search_box is None:
        lo, hi = default_search_box(po)
    else:
        lo, hi = (np.asarray(b, dtype=float) for b in search_box)
    lo0, hi0 = lo.copy(), hi.copy()
    n = action.dimension
    if cells ** n > 1_000_000:
        raise InputError("grid too large; lower cells or dimension")
    diagonal = action.all_diagonal_linear()
    if diagonal:
        scales = _scale_table(action, po.ball)                    # (m, n)
        pts = np.array([po.points[g.key] for g in po.ball.elements])
    incumbent = None
    incumbent_val = np.inf
    for _ in range(rounds):
        axes = [np.linspace(lo[i], hi[i], cells) for i in range(n)]
        mesh = np.stack(
            [m.ravel() for m in np.meshgrid(*axes, indexing="ij")], axis=-1
        )                                                          # (cells^n, n)
        if diagonal:
            # |pts[e,i] - scales[e,i] * y[k,i]| max over e, i
            diff = np.abs(
                pts[None, :, :] - scales[None, :, :] * mesh[:, None, :]
            )
            vals = diff.max(axis=(1, 2))
        else:
            vals = np.array(
                [tracing_radius(action, po, y) for y in mesh]
            )
        k = int(np.argmin(vals))
        incumbent = mesh[k]
        incumbent_val = float(vals[k])
        half = (hi - lo) / (2.0 * shrink)
        lo = np.maximum(incumbent - half, lo0)
        hi = np.minimum(incumbent + half, hi0)
    final_cell = (hi - lo) / (cells - 1)
    on_boundary = bool(
        np.any(incumbent - lo0 <= final_cell) or np.any(hi0 - incumbent <= final_cell)
    )
    return ShadowResult(
        point=incumbent,
        tracing_radius=tracing_radius(action, po, incumbent),
        method="brute_force",
        boundary_warning=on_boundary,
    )


def shadow(po: PseudoOrbit, action: Action) -> ShadowResult:
    """Closed form when available, otherwise the grid oracle."""
    if action.all_diagonal_linear():
        return shadow_diagonal_linear(po, action)
    return shadow_generic(po, action)


@dataclass(frozen=True)
class PersistenceRow:
    x: tuple
    y: tuple
    radius: float
    passed: bool


@dataclass(frozen=True)
class PersistenceReport:
    rows: tuple
    epsilon: float
    ball_radius: int

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def max_radius(self) -> float:
        return max((r.radius for r in self.rows), default=0.0)


def check_persistence(phi: Action, psi: Action, ball: CayleyBall, samples,
                      entourage: MetricEntourage,
                      certified_bound: float) -> PersistenceReport:
    """For each sample x, trace Psi's orbit by a true Phi-orbit within eps."""
    rows = []
    for x in samples:
        po = orbit_of_nearby_action(psi, ball, x, phi, certified_bound)
        result = shadow(po, phi)
        rows.append(
            PersistenceRow(
                x=tuple(as_point(x).tolist()),
                y=tuple(result.point.tolist()),
                radius=result.tracing_radius,
                passed=result.tracing_radius <= entourage.epsilon,
            )
        )
    return PersistenceReport(
        rows=tuple(rows), epsilon=entourage.epsilon, ball_radius=ball.radius
    )


@dataclass(frozen=True)
class UniquenessCertificate:
    status: str                       # "coincide" | "separated" | "inconclusive"
    separating_element: object = None
    attained_distance: float = 0.0
    searched_radius: int = 0


def shadow_uniqueness(y1, y2, phi: Action, expansivity_entourage: MetricEntourage,
                      ball: CayleyBall, tol: float = 1e-9) -> UniquenessCertificate:
    """Certify that two shadow candidates coincide or are dynamically separated.

    A separating g witnesses that two distinct shadows of the same orbit
    would contradict expansivity of the composed entourage.
    """
    from .expansivity import separation_search

    y1 = as_point(y1)
    y2 = as_point(y2)
    if dmax(y1, y2) <= tol:
        return UniquenessCertificate(status="coincide")
    found = separation_search(
        phi, y1, y2, expansivity_entourage, max_radius=ball.radius
    )
    if found is None:
        return UniquenessCertificate(
            status="inconclusive", searched_radius=ball.radius
        )
    return UniquenessCertificate(
        status="separated",
        separating_element=found.g,
        attained_distance=found.attained_distance,
        searched_radius=found.searched_radius,
    )
