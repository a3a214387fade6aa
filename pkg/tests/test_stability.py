from fractions import Fraction

import numpy as np
import pytest

from gshadow import (
    LebesgueMeasure,
    MetricEntourage,
    build_H_window,
    build_semiconjugacy,
    cayley_ball,
    extract_persistence_witness,
    perturb_action,
    reduce_word,
    singleton_H_from_map,
    verify_H_properties,
    verify_semiconjugacy,
)
from gshadow.models import doubling_on_line
from gshadow.stability import HWindow, continuity_modulus
from gshadow.uniformity import BoxSet


@pytest.fixture(scope="module")
def setup():
    phi = doubling_on_line()
    psi, bound = perturb_action(phi, 0.01, omega=1.0)
    return phi, psi, bound


@pytest.fixture(scope="module")
def table(setup):
    phi, psi, bound = setup
    ball = cayley_ball(phi.genset, 20)
    rng = np.random.default_rng(0)
    samples = [rng.uniform(-2, 2, size=1) for _ in range(40)]
    table = build_semiconjugacy(phi, psi, ball, MetricEntourage(0.011),
                                samples, bound)
    hs = [reduce_word(w, phi.genset) for w in (("b",), ("b^-1",), ("b", "b"))]
    report = verify_semiconjugacy(table, phi, psi, ball, hs, tol=1e-6,
                                  certified_bound=bound)
    return table, report


def test_semiconjugacy_traces_within_entourage(table):
    tbl, report = table
    assert tbl.all_pass
    assert tbl.max_radius <= 0.011
    assert report.max_identity_distance <= 0.011


def test_semiconjugacy_equivariance(table):
    tbl, report = table
    assert report.passed
    assert report.max_equivariance_residual <= 1e-6
    assert set(tbl.equivariance_residuals) == {"1", "-1", "2"}


def test_continuity_modulus_monotone(table):
    tbl, _ = table
    assert continuity_modulus(tbl, 0.05) <= continuity_modulus(tbl, 1.0)


def test_singleton_H(table):
    tbl, _ = table
    mu = LebesgueMeasure(1)
    report = singleton_H_from_map(tbl, mu, MetricEntourage(0.011),
                                  residual_tol=1e-6)
    assert report.passed
    assert report.failing_rows == ()


def test_singleton_H_requires_verified_residuals(setup):
    phi, psi, bound = setup
    ball = cayley_ball(phi.genset, 15)
    tbl = build_semiconjugacy(phi, psi, ball, MetricEntourage(0.011),
                              [np.array([0.4])], bound)
    report = singleton_H_from_map(tbl, LebesgueMeasure(1),
                                  MetricEntourage(0.011), residual_tol=1e-6)
    assert not report.equivariant       # residuals never filled in


def test_H_window_halving(setup):
    phi, psi, _ = setup
    hw = build_H_window(phi, psi, MetricEntourage(0.02), [0.3], range(0, 13))
    eps = Fraction(0.02)
    for m, box in hw.entries:
        assert box.volume() == 2 * eps / 2 ** m     # width is exactly 2eps/2^m
    deepest_m, deepest = hw.deepest_nonempty()
    assert deepest_m == 12
    assert not deepest.is_empty()


def test_H_properties(setup):
    phi, psi, _ = setup
    h = reduce_word(("b",), phi.genset)
    mu = LebesgueMeasure(1)
    report = verify_H_properties(phi, psi, [0.5], h, range(0, 13), mu,
                                 MetricEntourage(0.02))
    assert report.passed
    assert report.nesting_ok and report.sandwich_ok
    assert report.identity_entourage_ok
    assert all(abs(r - 0.5) <= 1e-12 for r in report.volume_ratios)


def test_H_properties_longer_h(setup):
    phi, psi, _ = setup
    h = reduce_word(("b", "b"), phi.genset)
    report = verify_H_properties(phi, psi, [-0.8], h, range(0, 11),
                                 LebesgueMeasure(1), MetricEntourage(0.02))
    assert report.sandwich_ok


def test_witness_extraction(setup):
    phi, psi, _ = setup
    hw = build_H_window(phi, psi, MetricEntourage(0.02), [0.3], range(0, 13))
    witness = extract_persistence_witness(hw, phi, psi)
    assert witness is not None
    assert witness.depth == 12
    assert witness.passed
    assert witness.max_distance <= witness.tolerance


def test_witness_empty_window_returns_none(setup):
    phi, psi, _ = setup
    hw = HWindow(x=np.array([0.3]), eps_prime=0.02,
                 entries=[(0, BoxSet.empty(1))])
    assert extract_persistence_witness(hw, phi, psi) is None


def test_window_box_at_missing_radius(setup):
    phi, psi, _ = setup
    hw = build_H_window(phi, psi, MetricEntourage(0.02), [0.3], [0, 2])
    from gshadow import InputError

    with pytest.raises(InputError):
        hw.box_at(1)
