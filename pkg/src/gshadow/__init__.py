"""Numerical shadowing, expansivity and stability checks for finitely
generated group actions on R^n."""

__version__ = "0.1.0"

from .errors import (
    GShadowError,
    InputError,
    NumericError,
    ResourceBudgetError,
    SolverError,
)
from .groups import (
    CayleyBall,
    Free,
    FreeAbelian,
    GeneratingSet,
    GroupElement,
    SolvableBS,
    cayley_ball,
    generating_set,
    geodesic_word,
    identity_element,
    invert_element,
    multiply_elements,
    reduce_word,
    rewrite_generator,
    standard_generating_set,
    word_length,
)
from .uniformity import (
    BoxSet,
    LebesgueMeasure,
    MetricEntourage,
    compose,
    contains,
    cross_section,
    dmax,
    intersect,
    linear_image,
    volume,
)
from .actions import (
    Action,
    Affine1D,
    DiagonalLinear,
    PerturbedDiagonal,
    conjugate_action,
    evaluate,
    perturb_action,
    validate_action,
)
from .models import BUILTIN_MODELS, build_model
from .pseudo_orbits import (
    PseudoOrbit,
    convert_generating_set,
    orbit_of_nearby_action,
    perturbed_orbit,
    transport_orbit,
    true_orbit,
)
from .shadowing import (
    ShadowResult,
    check_persistence,
    shadow,
    shadow_diagonal_linear,
    shadow_generic,
    shadow_uniqueness,
    tracing_radius,
)
from .expansivity import (
    dynamical_ball,
    mu_expansivity_report,
    separation_search,
)
from .stability import (
    HWindow,
    SemiconjugacyTable,
    build_H_window,
    build_semiconjugacy,
    extract_persistence_witness,
    singleton_H_from_map,
    verify_H_properties,
    verify_semiconjugacy,
)
