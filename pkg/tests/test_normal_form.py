from fractions import Fraction

import numpy as np
import pytest

from holderbound.errors import CurveError, KrantzBranch, MissingNormalDirectionError, StageError
from holderbound.expression_parser import parse_curve, parse_defining_function
from holderbound.normal_form import (
    absorb_curve, bloom_graham_normalize, certify, certify_special_coordinates, reparametrize_curve,
    shape_violations, shear_candidates,
)
from holderbound.polynomial_core import ComplexRational, CurveJet, MixedMonomial, compose, evaluate_many


def special(domain, curve, eta):
    R = parse_defining_function(domain)
    return R, certify_special_coordinates(R, parse_curve(curve, 64), eta)


def test_e1_already_special():
    """|z2|^2 is the witness and no shear is needed"""
    _, coords = special('Re(z3) + abs2(z2) + abs2(z1)^2', 't, 0, 0', 4)
    assert coords.m == 2
    assert coords.h == ComplexRational(0)
    assert coords.shear_attempts == 1
    assert coords.certificate.passed
    assert coords.certificate.witness == MixedMonomial((0, 1, 0), (0, 1, 0))
    assert coords.certificate.axis_order == 4
    assert coords.contact_order == 4
    assert not coords.swapped


def test_e2_coordinates_reproduce_domain():
    """r is R composed with the certified change of coordinates"""
    R, coords = special('Re(z3) + abs2(z1)^2*abs2(z2) + abs2(z2)^3 + abs2(z1)^5', 't, 0, 0', 10)
    assert coords.m == 6
    assert compose(R, coords.psi) == coords.r
    assert coords.certificate.witness == MixedMonomial((0, 3, 0), (0, 3, 0))


def test_shear_needed_when_lowest_mixed_term_lacks_z2():
    """|z1|^2 alone at order m forces the shear z1 -> z1 + z2"""
    _, coords = special('Re(z3) + abs2(z1) + abs2(z2)^2', 't, 0, 0', 2)
    assert coords.h == ComplexRational(1)
    assert coords.shear_attempts == 2
    assert coords.certificate.passed


def test_parabola_absorbed_into_z2():
    """(t, t^2, 0) is straightened by z2 -> z2 + z1^2"""
    R, coords = special('Re(z3) + abs2(z2)', 't, t^2, 0', 4)
    assert coords.contact_order == 4
    assert coords.r.coefficient(MixedMonomial((2, 0, 0), (2, 0, 0))) == 1
    assert coords.r.coefficient(MixedMonomial((0, 1, 0), (2, 0, 0))) == 1
    assert compose(R, coords.psi) == coords.r


def test_curve_along_z2_is_swapped():
    """A curve leaving along z2 swaps the first two coordinates"""
    _, coords = special('Re(z3) + abs2(z1) + abs2(z2)^2', '0, t, 0', 4)
    assert coords.swapped
    assert coords.r == parse_defining_function('Re(z3) + abs2(z2) + abs2(z1)^2')


def test_half_space_is_krantz_branch():
    """No mixed term at all"""
    with pytest.raises(KrantzBranch) as excinfo:
        special('Re(z3)', 't, 0, 0', 4)
    assert excinfo.value.stage == 'normal_form'


def test_low_contact_curve_rejected():
    """|z1|^2 meets the z1 axis only to order 2"""
    with pytest.raises(CurveError, match='contact order'):
        special('Re(z3) + abs2(z2) + abs2(z1)', 't, 0, 0', 4)


def test_singular_curve_rejected():
    """t -> (t^2, 0, 0) is not smooth"""
    with pytest.raises(CurveError, match='smooth'):
        special('Re(z3) + abs2(z2) + abs2(z1)^2', 't^2, 0, 0', 4)


def test_third_component_below_eta_rejected():
    """g3 vanishing below eta cannot lie in the boundary to order eta"""
    with pytest.raises(CurveError):
        special('Re(z3) + abs2(z2) + abs2(z1)^2', 't, 0, t^2', 4)


def test_missing_normal_direction():
    """Without a Re z3 term there is no normal direction"""
    with pytest.raises(MissingNormalDirectionError):
        bloom_graham_normalize(parse_defining_function('abs2(z1) + abs2(z2)'), 4)


def test_nonzero_constant_rejected():
    """R must vanish at the origin"""
    with pytest.raises(StageError, match='vanish'):
        bloom_graham_normalize(parse_defining_function('1 + Re(z3) + abs2(z2)'), 4)


def test_bloom_graham_removes_pure_terms():
    """Re(z1^2) and Re(z1^3) are absorbed into z3"""
    R = parse_defining_function('2*Re(z3) + Re(z1^2) + Re(z1^3) + abs2(z2) + abs2(z1)^2')
    bg = bloom_graham_normalize(R, 4)
    pure = bg.normalized.filter(lambda m, c: not m.involves_z3 and m.degree <= 4 and not m.is_mixed)
    assert pure.is_zero
    assert bg.m == 2
    assert bg.map.is_vertical()
    assert compose(R, bg.map) == bg.normalized
    assert bg.normalized.coefficient(MixedMonomial((0, 0, 1))) == Fraction(1, 2)


def test_normalized_defining_function_pointwise():
    """Numerical values agree with R evaluated at psi(z)"""
    R, coords = special('Re(z3) + abs2(z2) + abs2(z1)^2', 't, t^2, 0', 4)
    pts = [[0.1 + 0.05j, -0.2j, 0.03], [0.3, 0.1, -0.01j]]
    assert np.allclose(evaluate_many(coords.r, pts), evaluate_many(R, coords.psi.evaluate(pts)))


def test_reparametrize_to_unit_speed():
    """(2t + t^2, t^3, 0) becomes (t, g2, 0) with g2 = t^3/8 + ..."""
    curve = parse_curve('2*t + t^2, t^3, 0', 12)
    straight, swapped = reparametrize_curve(curve)
    assert not swapped
    assert straight.components[0] == parse_curve('t, 0, 0', 12).components[0]
    assert straight.coefficient(1, 3) == ComplexRational(1) / 8


def test_absorb_requires_straight_curve():
    """Absorption expects g1(t) = t"""
    r = parse_defining_function('Re(z3) + abs2(z2)')
    with pytest.raises(CurveError):
        absorb_curve(r, parse_curve('2*t, 0, 0', 64), 4)


def test_shape_violations_reports_pure_terms():
    """A leftover pure term is a shape violation"""
    r = parse_defining_function('Re(z3) + Re(z1^3) + abs2(z2)')
    problems = shape_violations(r, 2, 4)
    assert any('pure term' in p for p in problems)
    assert not certify(r, 2, 4).passed


def test_shear_candidates_start_at_zero():
    """h = 0 comes first, then budget points on the unit circle"""
    candidates = list(shear_candidates(50))
    assert len(candidates) == 51
    assert candidates[0] == ComplexRational(0)
    assert candidates[1] == ComplexRational(1)
    assert all(abs(abs(h) - 1) < 1e-5 for h in candidates[1:])


def test_curve_jet_axis_order():
    """The z1 axis is smooth"""
    assert CurveJet.axis(8).order() == 1
