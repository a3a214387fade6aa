from fractions import Fraction

import numpy as np
import pytest

from gshadow import (
    InputError,
    LebesgueMeasure,
    MetricEntourage,
    dynamical_ball,
    mu_expansivity_report,
    perturb_action,
    separation_search,
)
from gshadow.expansivity import per_step_contraction
from gshadow.models import doubling_on_line, lattice_dilations


def test_separation_search_rejects_equal_points():
    phi = doubling_on_line()
    with pytest.raises(InputError):
        separation_search(phi, [0.3], [0.3], MetricEntourage(1.0), 5)


def test_separation_word_length():
    # 0.1 apart, doubling: four doublings reach 1.6 > 1
    phi = doubling_on_line()
    cert = separation_search(phi, [0.0], [0.1], MetricEntourage(1.0), 10)
    assert cert is not None
    assert cert.searched_radius == 4
    assert cert.attained_distance == pytest.approx(1.6)


def test_separation_exhausted_returns_none():
    phi = doubling_on_line()
    assert separation_search(phi, [0.0], [0.1], MetricEntourage(1.0), 2) is None


def test_dynamical_ball_exact_volume():
    phi = doubling_on_line()
    ball = dynamical_ball(phi, [0.7], MetricEntourage(1.0), m=5)
    # the widest composite scale in the radius-5 ball is 2^5
    assert ball.volume() == Fraction(1, 16)
    assert ball.contains_point([0.7])


def test_dynamical_ball_exact_center():
    phi = doubling_on_line()
    ball = dynamical_ball(
        phi, [0.7], MetricEntourage(1.0), m=3, exact_center=[Fraction(7, 10)]
    )
    lo, hi = ball.bounding_box()
    assert lo[0] == Fraction(7, 10) - Fraction(1, 8)


def test_dynamical_ball_needs_diagonal_linear():
    phi = doubling_on_line()
    psi, _ = perturb_action(phi, 0.01, omega=1.0)
    with pytest.raises(InputError):
        dynamical_ball(psi, [0.0], MetricEntourage(1.0), m=2)


def test_per_step_contraction():
    assert per_step_contraction(doubling_on_line()) == pytest.approx(0.5)
    assert per_step_contraction(lattice_dilations(2)) == pytest.approx(0.25)


def test_mu_expansivity_report():
    phi = doubling_on_line()
    mu = LebesgueMeasure(1)
    samples = [np.array([v]) for v in (-2.0, 0.0, 3.5)]
    report = mu_expansivity_report(
        phi, MetricEntourage(1.0), samples, radii=range(2, 26, 2), mu=mu,
        threshold=1e-6,
    )
    assert report.passed
    assert report.analytic_ratio == pytest.approx(0.5)
    observed = {r for rs in report.ratios for r in rs}
    assert observed == {0.25}     # radius step of 2 halves the width twice
    # volumes are exact fractions, strictly decreasing
    for vols in report.volumes:
        assert all(b == a / 4 for a, b in zip(vols, vols[1:]))


def test_mu_expansivity_fails_on_large_threshold_violation():
    phi = doubling_on_line()
    mu = LebesgueMeasure(1)
    report = mu_expansivity_report(
        phi, MetricEntourage(1.0), [np.array([0.0])], radii=[1, 2], mu=mu,
        threshold=1e-6,
    )
    assert not report.passed      # final volume 1/2 is nowhere near the threshold
