import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gshadow import (
    Action,
    Affine1D,
    DiagonalLinear,
    InputError,
    PerturbedDiagonal,
    conjugate_action,
    evaluate,
    perturb_action,
    reduce_word,
    validate_action,
)
from gshadow.actions import apply_conjugacy, composite_scales
from gshadow.models import (
    doubling_on_line,
    lattice_dilations,
    solvable_dilation,
)


def test_diagonal_linear_roundtrip():
    m = DiagonalLinear([2.0, -0.5])
    x = np.array([1.0, 3.0])
    assert np.allclose(m.apply_inverse(m.apply(x)), x)
    assert m.lipschitz() == 2.0
    assert m.inverse_lipschitz() == 2.0


def test_diagonal_linear_rejects_zero_scale():
    with pytest.raises(InputError):
        DiagonalLinear([1.0, 0.0])


def test_affine_roundtrip():
    m = Affine1D(3.0, -1.0)
    x = np.array([2.0])
    assert np.allclose(m.apply_inverse(m.apply(x)), x)
    with pytest.raises(InputError):
        Affine1D(0.0, 1.0)


def test_perturbed_margin_enforced():
    with pytest.raises(InputError):
        PerturbedDiagonal([2.0], alpha=2.0, omega=1.0)
    # just inside the margin is fine
    PerturbedDiagonal([2.0], alpha=1.9, omega=1.0, margin=0.05)


def test_perturbed_newton_inverse():
    m = PerturbedDiagonal([2.0], alpha=0.3, omega=1.7)
    for v in [-5.0, -0.1, 0.0, 2.0, 40.0]:
        x = np.array([v])
        assert np.max(np.abs(m.apply_inverse(m.apply(x)) - x)) < 1e-12
    assert m.amplitude_bound() == 0.3


def test_action_fills_inverse_maps():
    phi = doubling_on_line()
    x = np.array([3.0])
    assert np.allclose(phi.map("b^-1").apply(x), [1.5])
    assert phi.all_diagonal_linear()
    assert phi.max_lipschitz() == 2.0


def test_action_requires_some_map():
    phi = doubling_on_line()
    with pytest.raises(InputError):
        Action(genset=phi.genset, maps={}, dimension=1)


def test_evaluate_powers():
    phi = doubling_on_line()
    g = reduce_word(("b", "b", "b"), phi.genset)
    assert np.allclose(evaluate(phi, g, [1.0]), [8.0])
    ginv = reduce_word(("b^-1",), phi.genset)
    assert np.allclose(evaluate(phi, ginv, [1.0]), [0.5])


def test_evaluate_dimension_mismatch():
    phi = doubling_on_line()
    g = reduce_word(("b",), phi.genset)
    with pytest.raises(InputError):
        evaluate(phi, g, [1.0, 2.0])


def test_composite_scales_match_folding():
    phi = lattice_dilations(2)
    for word in [("e1",), ("e1", "e2^-1", "e1"), ("e2", "e2")]:
        g = reduce_word(word, phi.genset)
        x = np.array([1.3, -0.7])
        folded = x.copy()
        for sym in reversed(g.word):
            folded = phi.map(sym).apply(folded)
        assert np.allclose(x * composite_scales(phi, g), folded)


def test_validate_builtin_models():
    samples = [np.array([v]) for v in (-2.0, 0.5, 3.0)]
    for phi in (doubling_on_line(), solvable_dilation()):
        report = validate_action(phi, samples, tol=1e-12)
        assert report.passed
        assert report.max_relation_defect == 0.0
    phi2 = lattice_dilations(2)
    report = validate_action(phi2, [np.array([1.0, 2.0])], tol=1e-12)
    assert report.passed


def test_validate_catches_broken_inverse():
    phi = doubling_on_line()
    broken = Action(
        genset=phi.genset,
        maps={"b": DiagonalLinear([2.0]), "b^-1": DiagonalLinear([0.7])},
        dimension=1,
    )
    report = validate_action(broken, [np.array([1.0])], tol=1e-9)
    assert not report.passed
    assert report.max_inverse_defect > 0.1


def test_validate_needs_samples():
    with pytest.raises(InputError):
        validate_action(doubling_on_line(), [], tol=1e-9)


def test_perturb_action_bound():
    phi = doubling_on_line()
    psi, bound = perturb_action(phi, 0.01, omega=1.0)
    assert bound == pytest.approx(0.01)
    x = np.array([0.7])
    b = reduce_word(("b",), phi.genset)
    assert float(np.max(np.abs(evaluate(psi, b, x) - evaluate(phi, b, x)))) <= 0.01
    # amplitude 0 is the identity perturbation
    same, zero = perturb_action(phi, 0.0)
    assert same is phi and zero == 0.0
    with pytest.raises(InputError):
        perturb_action(phi, -0.1)


def test_perturb_contracting_scale_inflates_bound():
    phi = Action(
        genset=doubling_on_line().genset,
        maps={"b": DiagonalLinear([0.5])},
        dimension=1,
    )
    _, bound = perturb_action(phi, 0.01, omega=1.0)
    assert bound == pytest.approx(0.02)   # alpha / min|scale|


def test_perturb_solvable_keeps_relation():
    phi = solvable_dilation(2.0, 1)
    psi, _ = perturb_action(phi, 0.01, omega=1.0, seed=0)
    # only b is perturbed; a stays the identity so the relation is exact
    assert isinstance(psi.map("a"), DiagonalLinear)
    report = validate_action(psi, [np.array([0.3]), np.array([-2.0])], tol=1e-12)
    assert report.passed


def test_perturb_random_omega_is_seeded():
    phi = doubling_on_line()
    p1, _ = perturb_action(phi, 0.01, omega=None, seed=5)
    p2, _ = perturb_action(phi, 0.01, omega=None, seed=5)
    assert np.array_equal(p1.map("b").omega, p2.map("b").omega)


def test_conjugate_diagonal_linear_unchanged():
    phi = doubling_on_line()
    psi = conjugate_action(phi, [3.0])
    assert np.allclose(psi.map("b").scales, [2.0])


def test_conjugate_perturbed_matches_pointwise():
    phi = doubling_on_line()
    psi, _ = perturb_action(phi, 0.01, omega=1.0)
    conj = conjugate_action(psi, [3.0])
    b = reduce_word(("b",), phi.genset)
    for v in (-1.0, 0.4, 2.5):
        x = np.array([v])
        expected = apply_conjugacy(
            [3.0], evaluate(psi, b, apply_conjugacy([1 / 3], x))
        )
        assert np.allclose(evaluate(conj, b, x), expected, atol=1e-14)


def test_conjugate_rejects_singular():
    with pytest.raises(InputError):
        conjugate_action(doubling_on_line(), [0.0])


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=-3, max_value=3, allow_nan=False))
def test_doubling_orbit_identity(v):
    phi = doubling_on_line()
    g = reduce_word(("b", "b^-1"), phi.genset)
    assert np.allclose(evaluate(phi, g, [v]), [v])
