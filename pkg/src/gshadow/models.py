"""Builtin model actions: the example systems the checks run on."""

from __future__ import annotations

import numpy as np

from .actions import Action, DiagonalLinear
from .errors import InputError
from .groups import (
    FreeAbelian,
    GeneratingSet,
    SolvableBS,
    generating_set,
    standard_generating_set,
)


def doubling_on_line(lam: float = 2.0) -> Action:
    """Z acting on R, generated by x -> lam * x (default lam = 2)."""
    family = FreeAbelian(1)
    genset = generating_set(family, {"b": (1,)})
    return Action(genset=genset, maps={"b": DiagonalLinear([lam])}, dimension=1)


def lattice_dilations(k: int = 2, base: float = 2.0) -> Action:
    """Z^k on R^k: generator e_i scales coordinate i by base, fixes the rest."""
    family = FreeAbelian(k)
    genset = standard_generating_set(family)
    maps = {}
    for i in range(k):
        scales = np.ones(k)
        scales[i] = base
        maps[f"e{i + 1}"] = DiagonalLinear(scales)
    return Action(genset=genset, maps=maps, dimension=k)


def freeabelian_diagonal_action(genset: GeneratingSet, base: float = 2.0,
                                dimension=None) -> Action:
    """Diagonal action of Z^k through an arbitrary generating set.

    The symbol with exponent vector v acts by scales base**v_i per
    coordinate, so the action agrees with lattice_dilations on the group.
    """
    family = genset.family
    if not isinstance(family, FreeAbelian):
        raise InputError("genset must generate a free abelian group")
    k = dimension if dimension is not None else family.rank
    maps = {}
    for sym in genset.symbols:
        vec = genset.values[sym]
        scales = np.array([float(base) ** v for v in vec[:k]])
        maps[sym] = DiagonalLinear(scales)
    return Action(genset=genset, maps=maps, dimension=k)


def solvable_dilation(m: float = 2.0, n: int = 1) -> Action:
    """The solvable group <a, b | ba = a^2 b> acting on R^n.

    a acts as the identity and b as x -> m*x with m > 1.
    """
    if not m > 1:
        raise InputError("the dilation factor must satisfy m > 1")
    family = SolvableBS()
    genset = standard_generating_set(family)
    maps = {
        "a": DiagonalLinear(np.ones(n)),
        "b": DiagonalLinear(m * np.ones(n)),
    }
    return Action(genset=genset, maps=maps, dimension=n)


BUILTIN_MODELS = {
    "doubling-line": {
        "description": "Z acting on R by x -> lam*x (default lam=2)",
        "params": {"lam": 2.0},
        "build": lambda params: doubling_on_line(float(params.get("lam", 2.0))),
        "experiments": [
            "shadowing", "persistence", "expansivity", "mu-expansivity",
            "stability", "mu-stability", "conjugacy-transport",
        ],
    },
    "lattice-dilations": {
        "description": "Z^k on R^k, generator e_i doubles coordinate i (default k=2)",
        "params": {"k": 2, "base": 2.0},
        "build": lambda params: lattice_dilations(
            int(params.get("k", 2)), float(params.get("base", 2.0))
        ),
        "experiments": [
            "shadowing", "expansivity", "mu-expansivity", "genset-conversion",
        ],
    },
    "solvable-dilation": {
        "description": "solvable group <a,b|ba=a^2b> on R^n, b dilates by m>1 (default m=2, n=1)",
        "params": {"m": 2.0, "n": 1},
        "build": lambda params: solvable_dilation(
            float(params.get("m", 2.0)), int(params.get("n", 1))
        ),
        "experiments": ["shadowing", "expansivity"],
    },
}


def build_model(name: str, params=None) -> Action:
    if name not in BUILTIN_MODELS:
        raise InputError(
            f"unknown model {name!r}; available: {sorted(BUILTIN_MODELS)}"
        )
    return BUILTIN_MODELS[name]["build"](params or {})
