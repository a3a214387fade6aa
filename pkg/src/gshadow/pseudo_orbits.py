"""Pseudo-orbits over Cayley balls and the generating-set conversion.

A pseudo-orbit assigns a point to every element of a finite ball; its
realized epsilon is the largest edge defect distance(x_{sg}, Phi_s(x_g))
over the ball's adjacency, recomputed by validation.  Every constructor
carries a certified declared epsilon that must dominate the realized one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .actions import Action, evaluate
from .errors import InputError
from .groups import CayleyBall, cayley_ball, geodesic_word, \
    generator_elements
from .uniformity import as_point, dmax


@dataclass(eq=False)
class PseudoOrbit:
    """Finite assignment ball element -> point with edge-defect bookkeeping."""

    ball: CayleyBall
    points: dict                 # element key -> np.ndarray
    declared_epsilon: float
    realized_epsilon: float = float("nan")

    def point_of(self, g) -> np.ndarray:
        return self.points[g.key]

    @property
    def base_point(self) -> np.ndarray:
        # x_e; the "through B" predicate of a pseudo-orbit looks at this point
        for g in self.ball.elements:
            if not g.word:
                return self.points[g.key]
        raise InputError("ball does not contain the identity")

    def goes_through(self, box) -> bool:
        return box.contains_point(self.base_point)

    def bounding_halfwidth(self) -> float:
        return max(float(np.max(np.abs(p))) for p in self.points.values())

    def to_jsonable(self):
        return {
            "radius": self.ball.radius,
            "declared_epsilon": self.declared_epsilon,
            "realized_epsilon": self.realized_epsilon,
            "points": {
                g.key: self.points[g.key].tolist() for g in self.ball.elements
            },
        }


def validate(po: PseudoOrbit, action: Action) -> float:
    """Recompute the max edge defect; fills and returns realized_epsilon."""
    worst = 0.0
    for g, sym, sg in po.ball.edges:
        defect = dmax(po.points[sg.key], action.map(sym).apply(po.points[g.key]))
        if defect > worst:
            worst = defect
    po.realized_epsilon = worst
    return worst


def true_orbit(action: Action, ball: CayleyBall, x) -> PseudoOrbit:
    """The exact orbit of x as a degenerate pseudo-orbit."""
    x = as_point(x)
    points = {g.key: evaluate(action, g, x) for g in ball.elements}
    scale = max(1.0, max(float(np.max(np.abs(p))) for p in points.values()))
    po = PseudoOrbit(
        ball=ball,
        points=points,
        # rounding allowance so that realized <= declared still holds
        declared_epsilon=1e-12 * scale,
    )
    validate(po, action)
    return po


def perturbed_orbit(action: Action, ball: CayleyBall, x, eta: float,
                    seed=None) -> PseudoOrbit:
    """True orbit plus per-element uniform noise in [-eta, eta] per coordinate.

    The declared epsilon is the analytic bound eta*(1 + L) with L the max
    generator Lipschitz constant; per-element noise keeps defects controlled
    on every edge, cycles included.
    """
    if eta < 0:
        raise InputError("noise bound must be >= 0")
    x = as_point(x)
    if eta == 0.0:
        return true_orbit(action, ball, x)
    rng = np.random.default_rng(seed)
    points = {}
    for g in ball.elements:   # deterministic (length, key) order
        noise = rng.uniform(-eta, eta, size=action.dimension)
        points[g.key] = evaluate(action, g, x) + noise
    lip = action.max_lipschitz()
    po = PseudoOrbit(
        ball=ball,
        points=points,
        declared_epsilon=eta * (1.0 + lip),
    )
    validate(po, action)
    return po


def orbit_of_nearby_action(psi: Action, ball: CayleyBall, x, phi: Action,
                           certified_bound: float) -> PseudoOrbit:
    """Psi's orbit of x viewed as a pseudo-orbit for Phi.

    This is the pseudo-orbit whose Phi-shadow defines the semiconjugacy
    value at x; declared epsilon is the certified generator distance.
    """
    if psi.dimension != phi.dimension:
        raise InputError("actions must share a dimension")
    x = as_point(x)
    points = {g.key: evaluate(psi, g, x) for g in ball.elements}
    scale = max(1.0, max(float(np.max(np.abs(p))) for p in points.values()))
    po = PseudoOrbit(
        ball=ball,
        points=points,
        declared_epsilon=max(certified_bound, 1e-12 * scale),
    )
    validate(po, phi)
    return po


def conversion_stretch(t_action: Action, m: int) -> float:
    """Epsilon growth factor of the generating-set conversion.

    With L the max generator Lipschitz constant of the source action, a
    chain of m source edges costs eps*(1 + L + ... + L^(m-1)).
    """
    lip = t_action.max_lipschitz()
    if lip == 1.0:
        return float(m)
    return (lip ** m - 1.0) / (lip - 1.0)


def convert_generating_set(po: PseudoOrbit, t_action: Action, s_action: Action,
                           target_radius=None) -> PseudoOrbit:
    """Restrict a pseudo-orbit wrt T to a ball wrt S, with enlarged epsilon.

    Every generator of S is spelled geodesically over T (length <= m), so an
    S-ball of radius N needs the T-ball of radius at least m*N.
    """
    t_genset = po.ball.genset
    s_genset = s_action.genset
    if t_genset.family.name != s_genset.family.name:
        raise InputError("generating sets must belong to the same group family")
    m = max(
        len(geodesic_word(s, t_genset)) for s in generator_elements(s_genset)
    )
    if target_radius is None:
        target_radius = po.ball.radius // m
    if m * target_radius > po.ball.radius:
        raise InputError(
            f"source ball radius {po.ball.radius} too small: need >= "
            f"{m * target_radius} for S-radius {target_radius} (m={m})"
        )
    s_ball = cayley_ball(s_genset, target_radius)
    points = {}
    for g in s_ball.elements:
        if g.key not in po.points:
            raise InputError(
                f"element {g.key} of the S-ball is missing from the source orbit"
            )
        points[g.key] = po.points[g.key]
    eps = po.declared_epsilon * conversion_stretch(t_action, m)
    converted = PseudoOrbit(ball=s_ball, points=points, declared_epsilon=eps)
    validate(converted, s_action)
    return converted


def transport_orbit(po: PseudoOrbit, h_scales, conjugated: Action) -> PseudoOrbit:
    """Push a pseudo-orbit through a diagonal-linear conjugacy h.

    A valid eps-pseudo-orbit of Phi becomes a valid (Lip(h)*eps)-pseudo-orbit
    of h Phi h^-1.
    """
    h = np.asarray(h_scales, dtype=float)
    if np.any(h == 0.0):
        raise InputError("conjugacy scales must be nonzero")
    points = {key: p * h for key, p in po.points.items()}
    out = PseudoOrbit(
        ball=po.ball,
        points=points,
        declared_epsilon=po.declared_epsilon * float(np.max(np.abs(h))),
    )
    validate(out, conjugated)
    return out
