"""
Special holomorphic coordinates at a boundary point.

Pipeline: Bloom-Graham elimination of pure terms, transport of the curve into
the normalized chart, reparametrization so the curve reads (t, g2(t), g3(t)),
absorption of g2 into z2, and a shear z1 -> z1 + h z2 that makes the lowest
mixed part carry a term mixed in z2 alone.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple, Union

from .errors import (
    CurveError, KrantzBranch, MissingNormalDirectionError, NotRealValuedError, ShearExhaustedError, StageError,
)
from .polynomial_core import (
    Z1, Z2, Z3, ComplexRational, CurveJet, HoloPolyMap, MixedMonomial, MixedPolynomial,
    compose, restrict_to_curve, vanishing_order,
)

Z3_UNIT = MixedMonomial((0, 0, 1))
ZBAR3_UNIT = MixedMonomial((0, 0, 0), (0, 0, 1))
HALF = ComplexRational(Fraction(1, 2))
GOLDEN_ANGLE_FRACTION = (math.sqrt(5) - 1) / 2
SHEAR_DENOMINATOR = 10 ** 6


@dataclass(frozen=True)
class BloomGrahamResult:
    normalized: MixedPolynomial
    map: HoloPolyMap
    m: int
    witness: MixedMonomial
    eta: int


@dataclass(frozen=True)
class CurveCheck:
    passed: bool
    along_order: Union[int, float]
    contact_order: Union[Fraction, float]
    gamma3_order: Union[int, float]
    curve: CurveJet
    message: str = ''


@dataclass(frozen=True)
class Certificate:
    shape_violations: Tuple[str, ...]
    axis_order: Union[int, float]
    eta: int
    witness: Optional[MixedMonomial]
    witness_coefficient: Optional[ComplexRational]

    @property
    def shape_ok(self) -> bool:
        return not self.shape_violations

    @property
    def axis_ok(self) -> bool:
        return self.axis_order >= self.eta

    @property
    def witness_ok(self) -> bool:
        return self.witness is not None and bool(self.witness_coefficient)

    @property
    def passed(self) -> bool:
        return self.shape_ok and self.axis_ok and self.witness_ok


@dataclass(frozen=True)
class SpecialCoordinates:
    r: MixedPolynomial
    psi: HoloPolyMap
    h: ComplexRational
    eta: int
    m: int
    certificate: Certificate
    bloom_graham: BloomGrahamResult
    contact_order: Union[Fraction, float]
    swapped: bool = False
    shear_attempts: int = 1
    notes: List[str] = field(default_factory=list)

    @property
    def truncated(self) -> bool:
        return self.r.truncated or self.psi.truncated


def _coordinates(cap: int) -> Tuple[MixedPolynomial, MixedPolynomial, MixedPolynomial]:
    return tuple(MixedPolynomial.variable(i, cap) for i in (Z1, Z2, Z3))


def _is_z_prime(mono: MixedMonomial) -> bool:
    return not mono.involves_z3


def lowest_mixed_order(r: MixedPolynomial, eta: int) -> Optional[Tuple[int, MixedMonomial]]:
    """Lowest total order of a mixed (z1, z2) term of degree <= eta, with its first monomial"""
    for mono in r:
        if _is_z_prime(mono) and mono.is_mixed and mono.degree <= eta:
            return mono.degree, mono
    return None


def bloom_graham_normalize(R: MixedPolynomial, eta: int) -> BloomGrahamResult:
    """Kill pure (z1, z2) terms order by order by substituting z3 -> z3 - 2 P(z')"""
    if not R.real_valued:
        raise NotRealValuedError('Defining function must be real-valued')
    if R.constant_term():
        raise StageError('Defining function must vanish at the origin', stage='normal_form')
    lead = R.coefficient(Z3_UNIT)
    if not lead:
        raise MissingNormalDirectionError('No Re z3 leading term', {'eta': eta})
    cap = R.degree_cap
    z1, z2, z3 = _coordinates(cap)
    psi = HoloPolyMap.identity(cap)
    current = R
    if lead != HALF:
        psi = HoloPolyMap([z1, z2, z3.scale(1 / (2 * lead))])
        current = compose(R, psi)
        logging.info(f"Rescaled z3 by 1/(2*({lead}))")
    for order in range(1, eta + 1):
        pure = current.filter(lambda m, c: _is_z_prime(m) and m.degree == order and not sum(m.beta))
        if pure.is_zero:
            continue
        correction = pure.with_cap(cap).scale(2)
        phi = HoloPolyMap([z1, z2, z3 - correction])
        current = compose(current, phi)
        psi = psi.compose(phi)
        logging.debug(f"Absorbed {len(pure)} pure terms of order {order}")
    found = lowest_mixed_order(current, eta)
    if found is None:
        raise KrantzBranch(f"No mixed term up to order {eta}; Bloom-Graham type exceeds eta",
                           {'eta': eta, 'normalized_terms': len(current)})
    m, witness = found
    logging.info(f"Bloom-Graham type m={m}, witness {witness}")
    return BloomGrahamResult(current, psi, m, witness, eta)


def check_curve_vanishing(r_ambient: MixedPolynomial, curve: CurveJet, eta: int, m: int) -> CurveCheck:
    """Contact order of the curve and the order of its third component"""
    if curve.order() != 1:
        raise CurveError('Curve must be smooth (nonzero derivative at 0)', {'order': curve.order()})
    along = vanishing_order(restrict_to_curve(r_ambient, curve))
    contact = math.inf if along == math.inf else Fraction(along, 1)
    gamma3 = curve.component_order(2)
    cap = curve.jet_order
    truncated = CurveJet((curve.components[0], curve.components[1], MixedPolynomial.zero(cap)), cap)
    if along < eta:
        return CurveCheck(False, along, contact, gamma3, curve,
                          f"contact order {along} is below eta={eta}")
    if gamma3 < eta:
        # Re(a t^l) from Re z3 is pure of order l and mixed terms cannot cancel it
        pure = restrict_to_curve(r_ambient, curve).coefficient(MixedMonomial((gamma3, 0, 0)))
        raise CurveError(f"Third component vanishes to order {gamma3} < eta={eta} while contact order is {along}",
                         {'gamma3_order': gamma3, 'pure_coefficient': str(pure), 'm': m})
    return CurveCheck(True, along, contact, gamma3, truncated)


def _series_reversion(g1: MixedPolynomial, order: int) -> MixedPolynomial:
    """s(t) with g1(s(t)) = t modulo t^(order+1)"""
    lead = g1.coefficient(MixedMonomial((1, 0, 0)))
    t = MixedPolynomial.variable(Z1, order)
    higher = g1.with_cap(order).filter(lambda m, c: m.degree >= 2)
    s = t.scale(1 / lead)
    for _ in range(order):
        substituted = compose(higher, HoloPolyMap([s, MixedPolynomial.variable(Z2, order),
                                                   MixedPolynomial.variable(Z3, order)]))
        s = (t - substituted).scale(1 / lead)
    return s


SWAP_Z1_Z2 = (Z2, Z1, Z3)


def swap_map(cap: int) -> HoloPolyMap:
    return HoloPolyMap([MixedPolynomial.variable(i, cap) for i in SWAP_Z1_Z2])


def reparametrize_curve(curve: CurveJet) -> Tuple[CurveJet, bool]:
    """Bring the curve to the form (t, g2(t), g3(t)); swaps z1 and z2 when g1'(0) = 0"""
    components = list(curve.components)
    swapped = False
    if not curve.coefficient(0, 1):
        if not curve.coefficient(1, 1):
            raise CurveError('Neither g1 nor g2 has a linear term', {})
        components[0], components[1] = components[1], components[0]
        swapped = True
        logging.info('Swapped z1 and z2 so that the curve leaves along z1')
    order = curve.jet_order
    s = _series_reversion(components[0], order)
    reparam = HoloPolyMap([s, MixedPolynomial.variable(Z2, order), MixedPolynomial.variable(Z3, order)])
    components = [compose(c.with_cap(order), reparam) for c in components]
    return CurveJet(tuple(components), order), swapped


def absorb_curve(r: MixedPolynomial, curve: CurveJet, eta: int) -> Tuple[HoloPolyMap, MixedPolynomial]:
    """Psi1(v) = (v1, v2 + g2(v1), v3) and r1 = r o Psi1"""
    cap = r.degree_cap
    z1, z2, z3 = _coordinates(cap)
    if curve.components[0].with_cap(cap) != z1:
        raise CurveError('Curve must be reparametrized so that g1(t) = t', {})
    if not curve.components[2].is_zero:
        raise CurveError('Curve third component must be dropped before absorption', {})
    psi1 = HoloPolyMap([z1, z2 + curve.components[1].with_cap(cap), z3])
    r1 = compose(r, psi1)
    logging.debug(f"Absorbed curve; r1 has {len(r1)} terms")
    return psi1, r1


def shear_map(h, cap: int) -> HoloPolyMap:
    z1, z2, z3 = _coordinates(cap)
    return HoloPolyMap([z1 + z2.scale(h), z2, z3])


def shear_candidates(count: int = 50) -> Iterator[ComplexRational]:
    """h = 0, then golden-angle points on the unit circle rationalized to denominator <= 10^6"""
    yield ComplexRational(0)
    for k in range(count):
        angle = 2 * math.pi * k * GOLDEN_ANGLE_FRACTION
        yield ComplexRational(Fraction(math.cos(angle)).limit_denominator(SHEAR_DENOMINATOR),
                              Fraction(math.sin(angle)).limit_denominator(SHEAR_DENOMINATOR))


def z2_mixed_terms(r: MixedPolynomial, m: int) -> List[MixedMonomial]:
    """Monomials z2^a zbar2^b with a, b > 0 and a + b = m"""
    return [mono for mono in r
            if mono.degree == m and not mono.involves_z3 and mono.alpha[0] == 0 and mono.beta[0] == 0
            and mono.alpha[1] > 0 and mono.beta[1] > 0]


def _shear_search(r1: MixedPolynomial, m: int, budget: int) -> Tuple[ComplexRational, int]:
    lowest = r1.filter(lambda mono, c: _is_z_prime(mono) and mono.is_mixed and mono.degree == m)
    if lowest.is_zero:
        raise StageError(f"No mixed term of order m={m} to shear", stage='normal_form')
    attempts = 0
    for h in shear_candidates(budget):
        attempts += 1
        sheared = compose(lowest, shear_map(h, lowest.degree_cap))
        if z2_mixed_terms(sheared, m):
            logging.info(f"Shear direction h={h} accepted after {attempts} candidates")
            return h, attempts
    raise ShearExhaustedError(f"No admissible shear among {attempts} candidates",
                              {'m': m, 'candidates': attempts})


def find_shear_direction(r1: MixedPolynomial, m: int, budget: int = 50) -> ComplexRational:
    return _shear_search(r1, m, budget)[0]


def shape_violations(r: MixedPolynomial, m: int, eta: int) -> List[str]:
    """Term scan: Re z3 + mixed z' terms of order m..eta + O(|z3||z| + |z'|^(eta+1))"""
    problems = []
    for mono, coeff in r.items():
        if mono.degree == 0:
            problems.append('nonzero constant term')
        elif mono in (Z3_UNIT, ZBAR3_UNIT):
            if coeff != HALF:
                problems.append(f"Re z3 coefficient {coeff} != 1/2")
        elif mono.involves_z3:
            if mono.degree < 2:
                problems.append(f"linear z3 term {mono}")
        elif mono.degree <= eta:
            if not mono.is_mixed:
                problems.append(f"pure term {mono} of order {mono.degree}")
            elif mono.degree < m:
                problems.append(f"mixed term {mono} below order m={m}")
    return problems


def certify(r: MixedPolynomial, m: int, eta: int) -> Certificate:
    axis = CurveJet.axis(r.degree_cap)
    axis_order = vanishing_order(restrict_to_curve(r, axis))
    witnesses = z2_mixed_terms(r, m)
    witness = witnesses[0] if witnesses else None
    coefficient = r.coefficient(witness) if witness else None
    return Certificate(tuple(shape_violations(r, m, eta)), axis_order, eta, witness, coefficient)


def certify_special_coordinates(R: MixedPolynomial, curve: CurveJet, eta: int,
                                shear_budget: int = 50) -> SpecialCoordinates:
    """Normalize, check the curve, absorb it, shear, and certify the result"""
    bg = bloom_graham_normalize(R, eta)
    cap = R.degree_cap
    inverse = bg.map.invert_vertical()
    moved = CurveJet(tuple(compose(c, curve.as_map()).with_cap(curve.jet_order) for c in inverse.components),
                     curve.jet_order)
    check = check_curve_vanishing(bg.normalized, moved, eta, bg.m)
    if not check.passed:
        raise CurveError(check.message, {'contact_order': str(check.contact_order), 'eta': eta})
    straight, swapped = reparametrize_curve(check.curve)
    r_current, psi = bg.normalized, bg.map
    if swapped:
        swap = swap_map(cap)
        r_current, psi = compose(r_current, swap), psi.compose(swap)
    psi1, r1 = absorb_curve(r_current, straight, eta)
    h, attempts = _shear_search(r1, bg.m, shear_budget)
    psi2 = shear_map(h, cap)
    r = compose(r1, psi2)
    psi = psi.compose(psi1).compose(psi2)
    certificate = certify(r, bg.m, eta)
    notes = []
    if r.truncated or psi.truncated:
        notes.append(f"terms above jet order {cap} were truncated")
    if not certificate.passed:
        raise StageError('Special coordinate certificate failed', {
            'shape_violations': list(certificate.shape_violations),
            'axis_order': str(certificate.axis_order),
            'witness': str(certificate.witness),
        }, stage='normal_form')
    logging.info(f"Special coordinates certified: m={bg.m}, eta={eta}, h={h}")
    return SpecialCoordinates(r, psi, h, eta, bg.m, certificate, bg, check.contact_order,
                              swapped, attempts, notes)
