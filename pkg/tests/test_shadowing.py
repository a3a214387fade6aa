import numpy as np
import pytest

from gshadow import (
    Action,
    DiagonalLinear,
    MetricEntourage,
    SolverError,
    cayley_ball,
    check_persistence,
    perturb_action,
    perturbed_orbit,
    shadow,
    shadow_diagonal_linear,
    shadow_generic,
    shadow_uniqueness,
    tracing_radius,
)
from gshadow.models import doubling_on_line, lattice_dilations, solvable_dilation
from gshadow.pseudo_orbits import PseudoOrbit, validate


def _hand_orbit():
    """Radius-2 doubling-map pseudo-orbit with a single bumped endpoint."""
    phi = doubling_on_line()
    ball = cayley_ball(phi.genset, 2)
    values = {-2: 0.25, -1: 0.5, 0: 1.0, 1: 2.0, 2: 4.1}
    points = {}
    for g in ball.elements:
        (n,) = g.normal_form
        points[g.key] = np.array([values[n]])
    po = PseudoOrbit(ball=ball, points=points, declared_epsilon=0.1)
    validate(po, phi)
    return phi, po


def test_closed_form_extreme_exponent_rule():
    # the witness is b^2 (scale 4), so y = 4.1 / 4 and the worst tracing
    # distance sits at the identity and b points
    phi, po = _hand_orbit()
    result = shadow_diagonal_linear(po, phi)
    assert result.method == "closed_form"
    assert result.point[0] == pytest.approx(1.025, abs=1e-15)
    assert result.tracing_radius == pytest.approx(0.05, abs=1e-15)


def test_tracing_radius_is_recomputable():
    phi, po = _hand_orbit()
    result = shadow_diagonal_linear(po, phi)
    assert tracing_radius(phi, po, result.point) == result.tracing_radius


def test_closed_form_telescoping_bound():
    # derived bound: radius <= declared eps / (lambda - 1) = declared here
    phi = doubling_on_line()
    ball = cayley_ball(phi.genset, 20)
    for seed in range(10):
        po = perturbed_orbit(phi, ball, [0.5], eta=1e-3 / 3, seed=seed)
        result = shadow_diagonal_linear(po, phi)
        assert result.tracing_radius <= 1e-3


def test_oracle_agrees_with_closed_form():
    phi = doubling_on_line()
    ball = cayley_ball(phi.genset, 25)
    po = perturbed_orbit(phi, ball, [0.2], eta=1e-3 / 3, seed=7)
    cf = shadow_diagonal_linear(po, phi)
    bf = shadow_generic(po, phi)
    assert bf.method == "brute_force"
    assert abs(float(cf.point[0] - bf.point[0])) <= 1e-6
    assert not bf.boundary_warning


def test_no_hyperbolic_witness_raises():
    phi = doubling_on_line()
    flat = Action(genset=phi.genset, maps={"b": DiagonalLinear([1.0])}, dimension=1)
    ball = cayley_ball(phi.genset, 3)
    po = perturbed_orbit(flat, ball, [0.4], eta=1e-3, seed=0)
    with pytest.raises(SolverError):
        shadow_diagonal_linear(po, flat)
    # the grid oracle still produces a point
    assert shadow_generic(po, flat).tracing_radius < 1.0


def test_dispatcher_picks_solver():
    phi = doubling_on_line()
    ball = cayley_ball(phi.genset, 10)
    po = perturbed_orbit(phi, ball, [0.9], eta=1e-3, seed=2)
    assert shadow(po, phi).method == "closed_form"


def test_multigenerator_per_coordinate_bound():
    phi = lattice_dilations(2)
    ball = cayley_ball(phi.genset, 6)
    eta = 1e-3 / 3
    for seed in range(5):
        po = perturbed_orbit(phi, ball, [0.3, -0.5], eta=eta, seed=seed)
        result = shadow_diagonal_linear(po, phi)
        # per-element noise keeps each coordinate within 2*eta
        for g in ball.elements:
            from gshadow.actions import evaluate

            diff = np.abs(po.points[g.key] - evaluate(phi, g, result.point))
            assert np.all(diff <= 2 * eta + 1e-15)


def test_solvable_brute_force():
    phi = solvable_dilation(2.0, 1)
    ball = cayley_ball(phi.genset, 4)
    po = perturbed_orbit(phi, ball, [0.6], eta=1e-3 / 3, seed=11)
    result = shadow_generic(po, phi)
    assert result.tracing_radius <= 2 * po.declared_epsilon


def test_check_persistence():
    phi = doubling_on_line()
    psi, bound = perturb_action(phi, 0.01, omega=1.0)
    ball = cayley_ball(phi.genset, 15)
    report = check_persistence(
        phi, psi, ball, [np.array([v]) for v in (-1.0, 0.2, 1.5)],
        MetricEntourage(0.011), bound,
    )
    assert report.all_pass
    assert report.max_radius <= 0.011


def test_shadow_uniqueness():
    phi = doubling_on_line()
    ball = cayley_ball(phi.genset, 30)
    e = MetricEntourage(1.0)
    same = shadow_uniqueness([0.5], [0.5 + 1e-12], phi, e, ball)
    assert same.status == "coincide"
    apart = shadow_uniqueness([0.5], [0.6], phi, e, ball)
    assert apart.status == "separated"
    assert apart.attained_distance > 1.0
    shallow = shadow_uniqueness([0.5], [0.5 + 1e-6], phi, e, cayley_ball(phi.genset, 2))
    assert shallow.status == "inconclusive"
