from fractions import Fraction

import numpy as np
import pytest

from holderbound.errors import PrerequisiteError, StageError
from holderbound.expression_parser import parse_defining_function
from holderbound.holder_pipeline import (
    BetaFit, CutoffProfile, HolomorphicWitness, beta_soundness, beta_sup_norm_fit, build_test_form, check_witness,
    circle_average_H, circle_points, conclude, conclude_krantz, constant_witness, demo_witness, linear_witness,
    mean_value_self_test, shell_points, witness_factory, witness_gap_check,
)
from holderbound.numerics import fit_row, geometric_sweep
from holderbound.slice_analysis import slice_normalize

DELTAS = geometric_sweep('1e-2:1e-6:9')
E1 = parse_defining_function('Re(z3) + abs2(z2) + abs2(z1)^2')


def e1_norm(delta):
    return slice_normalize(E1, (delta ** 0.25, 0, -delta), 2, 4, delta)


def cubic(points):
    pts = np.atleast_2d(points)
    return pts[:, 0] ** 3 - 2 * pts[:, 0] * pts[:, 2]


def test_cutoff_profile_values():
    """1 below the inner radius, 0 beyond the outer, 1/2 in the middle"""
    phi = CutoffProfile()
    assert float(phi(0.4)) == 1
    assert float(phi(0.8)) == 0
    assert float(phi(0.625)) == pytest.approx(0.5)
    assert phi.derivative_bound == pytest.approx(8, rel=1e-6)


def test_cutoff_derivative_matches_finite_difference():
    """The closed-form derivative agrees with central differences"""
    phi = CutoffProfile()
    t = np.linspace(0.52, 0.73, 15)
    numeric = (phi(t + 1e-7) - phi(t - 1e-7)) / 2e-7
    assert np.allclose(phi.derivative(t), numeric, atol=1e-5)


def test_cutoff_profile_ordering():
    """inner must be below outer"""
    with pytest.raises(ValueError):
        CutoffProfile(0.75, 0.5)


@pytest.mark.parametrize('delta', [1e-2, 1e-4, 1e-6])
def test_demo_witness_gap_and_derivative(delta):
    """The gap is 1/6 and the derivative 1/(2.25 delta) at every scale"""
    w = demo_witness(delta)
    gap = abs(w(0, -delta) - w(0, -delta / 2))
    assert float(gap) == pytest.approx(1 / 6)
    assert abs(w.dz3(0, -delta / 2)) == pytest.approx(1 / (2.25 * delta), rel=1e-6)
    assert abs(w.dz3(0, -delta / 2)) >= w.declared_derivative_floor(delta)


def test_demo_witness_range_of_b():
    """b outside (0, 2) is rejected"""
    with pytest.raises(ValueError):
        demo_witness(1e-4, b=2)


def test_witness_factory():
    """Built-in names resolve and unknown names fail"""
    assert witness_factory('linear') is linear_witness
    with pytest.raises(StageError, match='Unknown witness'):
        witness_factory('cauchy')


def test_gap_check_accepts_demo():
    """Bounded-below gap and derivative above the floor"""
    table = witness_gap_check([demo_witness(d) for d in DELTAS])
    assert table.passed
    assert table.slope == pytest.approx(0, abs=1e-6)
    assert min(table.gaps) == pytest.approx(1 / 6)


def test_gap_check_rejects_constant():
    """A constant witness has no gap"""
    table = witness_gap_check([constant_witness(d) for d in DELTAS])
    assert not table.passed
    assert table.reason == 'gap vanishes'


def test_gap_check_rejects_linear():
    """f = zeta3 gives a gap decaying like delta"""
    table = witness_gap_check([linear_witness(d) for d in DELTAS])
    assert not table.passed
    assert table.slope == pytest.approx(1, abs=1e-6)
    assert 'decays' in table.reason


def test_check_witness_on_e1():
    """The demo witness is bounded and holomorphic on the pushed-out slice"""
    norm = e1_norm(1e-4)
    check = check_witness(demo_witness(1e-4), norm, 0.25, 0.1, samples=4000)
    assert check.bound_ok
    assert check.holomorphic_ok
    assert check.passed


def test_check_witness_flags_non_holomorphic():
    """conj(zeta3) fails the Cauchy-Riemann residual"""
    norm = e1_norm(1e-4)
    bad = HolomorphicWitness('conj', 1e-4, lambda z2, z3: np.conj(z3), 1.0, lambda d: 0.0)
    check = check_witness(bad, norm, 0.25, 0.1, samples=2000)
    assert not check.holomorphic_ok


def test_test_form_needs_witness_on_support():
    """A witness tabulated on a smaller box cannot be cut off at a/2"""
    short = HolomorphicWitness('short', 1e-4, lambda z2, z3: z3, 1.0, lambda d: 0.0, extent=0.01)
    with pytest.raises(StageError, match='cutoff support'):
        build_test_form(short, e1_norm(1e-4), 0.25, 0.1)


def test_test_form_matches_product_rule():
    """beta coefficients agree with a finite-difference dbar of the cut-off product"""
    form = build_test_form(demo_witness(1e-4), e1_norm(1e-4), 0.25, 0.1)
    pts = shell_points(form, 2000)
    assert len(pts) > 0
    beta = form.coefficients(pts)
    assert beta.shape == (len(pts), 3)
    assert beta_soundness(form, pts[:500]) < 1e-5


def test_beta_sup_norm_scaling():
    """||beta||_inf grows like delta^(-1/4) for the E1 model"""
    forms = [build_test_form(demo_witness(d), e1_norm(d), 0.25, 0.1) for d in DELTAS]
    fit = beta_sup_norm_fit(forms, samples=4000, soundness_points=500)
    assert fit.slope == pytest.approx(-0.25, abs=0.1)
    assert fit.soundness_error < 1e-5
    assert fit.derivative_bound == pytest.approx(8, rel=1e-6)
    assert fit.passed


def test_mean_value_property():
    """A function holomorphic in zeta1 equals its circle mean"""
    assert mean_value_self_test(cubic, (0.3, 0, -0.01), 0.05) < 1e-12


def test_circle_average_H():
    """For h = zeta1^3 - 2 zeta1 zeta3 the circle means differ by zeta1 b delta"""
    delta = 1e-4
    norm = e1_norm(delta)
    assert circle_average_H(cubic, norm, 1.0, 0.1) == pytest.approx(delta ** 0.25 * delta, rel=1e-9)


def test_circle_average_rejects_non_finite():
    """NaN at a node is a stage failure"""
    with pytest.raises(StageError):
        circle_average_H(lambda p: np.full(len(p), np.nan), e1_norm(1e-4), 1.0, 0.1)


def test_circle_points_radius():
    """Nodes sit on the zeta1 circle, the other coordinates fixed"""
    pts = circle_points((1, 2, 3), 0.5, 16)
    assert np.allclose(np.abs(pts[:, 0] - 1), 0.5)
    assert np.all(pts[:, 2] == 3)


def passing_fit():
    row = fit_row('beta', DELTAS, [d ** -0.25 for d in DELTAS], -0.25, relative_band=True)
    return BetaFit(row, (), (), 0.0, 8.0)


def test_conclude_bound():
    """Both prerequisites give epsilon <= 1/eta"""
    verdict = conclude(4, passing_fit(), witness_gap_check([demo_witness(d) for d in DELTAS]), [0.1])
    assert verdict.bound == Fraction(1, 4)
    assert verdict.conclusion == 'epsilon <= 1/4'
    assert verdict.branch == 'newton_diagram'
    assert len(verdict.reasoning) == 5


def test_conclude_requires_gap():
    """A rejected witness blocks the conclusion"""
    with pytest.raises(PrerequisiteError, match='witness gap'):
        conclude(4, passing_fit(), witness_gap_check([constant_witness(d) for d in DELTAS]))


def test_conclude_krantz():
    """The Krantz branch skips the test forms"""
    verdict = conclude_krantz(4)
    assert verdict.bound == Fraction(1, 4)
    assert verdict.branch == 'krantz'
    assert verdict.beta_norm_fit is None
