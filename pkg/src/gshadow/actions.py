"""Group actions on R^n generated by invertible maps.

Generator maps come in three flavors: diagonal-linear, one-dimensional
affine, and diagonal-linear with a bounded sine perturbation.  Actions carry
a generating set and one map per symbol; maps for inverse symbols default to
the functional inverse of the positive symbol's map but can be overridden
(useful for testing broken inputs).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericError
from .groups import (
    FreeAbelian,
    GeneratingSet,
    GroupElement,
    SolvableBS,
    inverse_symbol,
)
from .uniformity import as_point, dmax

_NEWTON_TOL = 1e-14
_NEWTON_MAX_ITER = 200


class GeneratorMap:
    """Invertible map of R^n assigned to one generator symbol."""

    is_diagonal_linear = False

    def apply(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply_inverse(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def lipschitz(self) -> float:
        """A global Lipschitz constant of the forward map."""
        raise NotImplementedError

    def inverse_lipschitz(self) -> float:
        raise NotImplementedError


class DiagonalLinear(GeneratorMap):
    """x_i -> scale_i * x_i with nonzero scales."""

    is_diagonal_linear = True

    def __init__(self, scales):
        scales = np.asarray(scales, dtype=float)
        if scales.ndim != 1 or np.any(scales == 0.0):
            raise InputError("diagonal-linear scales must be a nonzero vector")
        self.scales = scales

    def apply(self, x):
        return x * self.scales

    def apply_inverse(self, x):
        return x / self.scales

    def lipschitz(self):
        return float(np.max(np.abs(self.scales)))

    def inverse_lipschitz(self):
        return float(1.0 / np.min(np.abs(self.scales)))

    def __repr__(self):
        return f"DiagonalLinear({self.scales.tolist()})"


class Affine1D(GeneratorMap):
    """x -> scale * x + offset on R."""

    is_diagonal_linear = False

    def __init__(self, scale: float, offset: float):
        if scale == 0.0:
            raise InputError("affine scale must be nonzero")
        self.scale = float(scale)
        self.offset = float(offset)

    def apply(self, x):
        return x * self.scale + self.offset

    def apply_inverse(self, x):
        return (x - self.offset) / self.scale

    def lipschitz(self):
        return abs(self.scale)

    def inverse_lipschitz(self):
        return 1.0 / abs(self.scale)

    def __repr__(self):
        return f"Affine1D({self.scale}, {self.offset})"


class PerturbedDiagonal(GeneratorMap):
    """x_i -> scale_i * x_i + alpha_i * sin(omega_i * x_i).

    Invertibility needs |alpha_i * omega_i| < |scale_i| - margin so the
    derivative never vanishes; the inverse is solved by Newton iteration
    with a certified residual tolerance.
    """

    is_diagonal_linear = False

    def __init__(self, scales, alpha, omega, margin=0.05):
        scales = np.asarray(scales, dtype=float)
        alpha = np.broadcast_to(np.asarray(alpha, dtype=float), scales.shape).copy()
        omega = np.broadcast_to(np.asarray(omega, dtype=float), scales.shape).copy()
        if np.any(scales == 0.0):
            raise InputError("base scales must be nonzero")
        if np.any(np.abs(alpha * omega) >= np.abs(scales) - margin):
            raise InputError(
                "perturbation violates invertibility margin: need "
                "|alpha*omega| < |scale| - margin"
            )
        self.scales = scales
        self.alpha = alpha
        self.omega = omega
        self.margin = margin

    def apply(self, x):
        return x * self.scales + self.alpha * np.sin(self.omega * x)

    def apply_inverse(self, x):
        y = x / self.scales
        for _ in range(_NEWTON_MAX_ITER):
            f = y * self.scales + self.alpha * np.sin(self.omega * y) - x
            if np.max(np.abs(f)) <= _NEWTON_TOL * max(1.0, float(np.max(np.abs(x)))):
                return y
            df = self.scales + self.alpha * self.omega * np.cos(self.omega * y)
            y = y - f / df
        raise NumericError(
            "perturbed-map inverse failed to converge",
            residual=float(np.max(np.abs(f))),
        )

    def amplitude_bound(self) -> float:
        """Analytic sup distance to the unperturbed diagonal map."""
        return float(np.max(np.abs(self.alpha)))

    def lipschitz(self):
        return float(np.max(np.abs(self.scales) + np.abs(self.alpha * self.omega)))

    def inverse_lipschitz(self):
        return float(1.0 / np.min(np.abs(self.scales) - np.abs(self.alpha * self.omega)))

    def __repr__(self):
        return (
            f"PerturbedDiagonal({self.scales.tolist()}, alpha={self.alpha.tolist()}, "
            f"omega={self.omega.tolist()})"
        )


class _InverseMap(GeneratorMap):
    def __init__(self, base: GeneratorMap):
        self.base = base
        self.is_diagonal_linear = base.is_diagonal_linear
        if base.is_diagonal_linear:
            self.scales = 1.0 / base.scales

    def apply(self, x):
        return self.base.apply_inverse(x)

    def apply_inverse(self, x):
        return self.base.apply(x)

    def lipschitz(self):
        return self.base.inverse_lipschitz()

    def inverse_lipschitz(self):
        return self.base.lipschitz()


@dataclass(eq=False)
class Action:
    """Assignment of invertible maps of R^n to the generators of a group."""

    genset: GeneratingSet
    maps: dict
    dimension: int

    def __post_init__(self):
        filled = dict(self.maps)
        for sym in self.genset.symbols:
            if sym in filled:
                continue
            inv = inverse_symbol(sym)
            if inv not in filled:
                raise InputError(f"no map for symbol {sym!r} or its inverse")
            filled[sym] = _InverseMap(filled[inv])
        self.maps = filled

    def map(self, sym: str) -> GeneratorMap:
        try:
            return self.maps[sym]
        except KeyError:
            raise InputError(f"no map for symbol {sym!r}") from None

    def all_diagonal_linear(self) -> bool:
        return all(self.maps[s].is_diagonal_linear for s in self.genset.symbols)

    def max_lipschitz(self) -> float:
        return max(self.maps[s].lipschitz() for s in self.genset.symbols)


def composite_scales(action: Action, g: GroupElement) -> np.ndarray:
    """Per-coordinate scale of Phi_g for an all-diagonal-linear action.

    Uses exact power laws per symbol instead of folding the word.
    """
    if not action.all_diagonal_linear():
        raise InputError("composite scales require an all-diagonal-linear action")
    scales = np.ones(action.dimension)
    for sym, count in Counter(g.word).items():
        scales = scales * action.map(sym).scales ** count
    return scales


def evaluate(action: Action, g: GroupElement, x) -> np.ndarray:
    """Phi_g(x), composing generator maps along g's reduced word."""
    x = as_point(x)
    if x.size != action.dimension:
        raise InputError(
            f"point dimension {x.size} != action dimension {action.dimension}"
        )
    if action.all_diagonal_linear():
        return x * composite_scales(action, g)
    y = x
    for sym in reversed(g.word):
        y = action.map(sym).apply(y)
    return y


@dataclass(frozen=True)
class ActionReport:
    max_relation_defect: float
    max_inverse_defect: float
    tolerance: float
    sample_count: int

    @property
    def passed(self) -> bool:
        return (
            self.max_relation_defect <= self.tolerance
            and self.max_inverse_defect <= self.tolerance
        )


def _family_relations(genset: GeneratingSet):
    """Defining relations as pairs of words that must act identically."""
    fam = genset.family
    pos = [s for s in genset.symbols if not s.endswith("^-1")]
    relations = []
    if isinstance(fam, FreeAbelian):
        for i, s in enumerate(pos):
            for t in pos[i + 1:]:
                relations.append(((s, t), (t, s)))
    elif isinstance(fam, SolvableBS):
        relations.append((("b", "a"), ("a", "a", "b")))
    return relations


def _apply_word(action: Action, word, x):
    y = x
    for sym in reversed(word):
        y = action.map(sym).apply(y)
    return y


def validate_action(action: Action, samples, tol: float) -> ActionReport:
    """Check relation and inverse consistency on sample points."""
    samples = [as_point(s) for s in samples]
    if not samples:
        raise InputError("validate_action needs a nonempty sample list")
    rel_defect = 0.0
    inv_defect = 0.0
    relations = _family_relations(action.genset)
    for x in samples:
        for left, right in relations:
            rel_defect = max(
                rel_defect,
                dmax(_apply_word(action, left, x), _apply_word(action, right, x)),
            )
        for sym in action.genset.symbols:
            fwd = action.map(sym).apply(x)
            back = action.map(inverse_symbol(sym)).apply(fwd)
            inv_defect = max(inv_defect, dmax(back, x))
    return ActionReport(
        max_relation_defect=rel_defect,
        max_inverse_defect=inv_defect,
        tolerance=tol,
        sample_count=len(samples),
    )


def perturb_action(action: Action, amplitude: float, omega=1.0, seed=None,
                   symbols=None, margin=0.05):
    """A nearby action with certified generator distance.

    Replaces the maps of the chosen positive symbols (default: all of them,
    except that for the solvable family only ``b`` is touched) by
    scale*x + amplitude*sin(omega*x).  Returns (psi, bound) where bound is
    the analytic sup distance over all symbols, including inverses.
    """
    if amplitude < 0:
        raise InputError("perturbation amplitude must be >= 0")
    pos = [s for s in action.genset.symbols if not s.endswith("^-1")]
    if symbols is None:
        if isinstance(action.genset.family, SolvableBS):
            # perturbing a would break the relation through the identity map
            symbols = [s for s in pos if s == "b"]
        else:
            symbols = pos
    if amplitude == 0.0:
        return action, 0.0
    rng = np.random.default_rng(seed)
    new_maps = {}
    bound = 0.0
    for sym in pos:
        base = action.map(sym)
        if sym not in symbols:
            new_maps[sym] = base
            continue
        if not base.is_diagonal_linear:
            raise InputError("can only perturb diagonal-linear generator maps")
        if omega is None:
            w = rng.uniform(0.5, 2.0, size=base.scales.shape)
        else:
            w = np.broadcast_to(np.asarray(omega, dtype=float), base.scales.shape)
        pert = PerturbedDiagonal(base.scales, amplitude, w, margin=margin)
        new_maps[sym] = pert
        # forward distance is exactly alpha; the inverse symbol picks up 1/|scale|
        bound = max(
            bound,
            amplitude,
            amplitude / float(np.min(np.abs(base.scales))),
        )
    psi = Action(genset=action.genset, maps=new_maps, dimension=action.dimension)
    return psi, bound


def conjugate_action(action: Action, h_scales) -> Action:
    """The action Psi_g = h o Phi_g o h^-1 for diagonal-linear h."""
    h = np.asarray(h_scales, dtype=float)
    if h.size != action.dimension or np.any(h == 0.0):
        raise InputError("conjugating map must be diagonal-linear and invertible")
    new_maps = {}
    for sym in action.genset.symbols:
        if sym.endswith("^-1") and inverse_symbol(sym) in new_maps:
            continue
        m = action.map(sym)
        if isinstance(m, DiagonalLinear):
            new_maps[sym] = DiagonalLinear(m.scales)
        elif isinstance(m, Affine1D):
            new_maps[sym] = Affine1D(m.scale, float(h[0]) * m.offset)
        elif isinstance(m, PerturbedDiagonal):
            new_maps[sym] = PerturbedDiagonal(
                m.scales, h * m.alpha, m.omega / h, margin=m.margin
            )
        elif isinstance(m, _InverseMap):
            continue
        else:
            raise InputError(f"cannot conjugate generator map {m!r}")
    return Action(genset=action.genset, maps=new_maps, dimension=action.dimension)


def apply_conjugacy(h_scales, x) -> np.ndarray:
    """h(x) for the diagonal-linear change of coordinates."""
    return as_point(x) * np.asarray(h_scales, dtype=float)
