"""
Exact sparse polynomials in (z1, z2, z3) and their conjugates.

Coefficients are Gaussian rationals (``ComplexRational``) for all symbolic work.
The same containers also accept plain ``complex`` coefficients; the slice
machinery uses that to carry double-precision data through the exact same
composition and differentiation code.

Terms are kept in a dict keyed by ``MixedMonomial`` in graded-lexicographic
order, zero coefficients are never stored, and every product is truncated at
the polynomial's ``degree_cap`` (its jet order).  Dropping terms sets the
``truncated`` flag instead of raising, unless a caller asks for ``strict``
composition.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import CapMismatchError, CapOverflowError, CurveError

DEFAULT_DEGREE_CAP = 64

Z1, Z2, Z3, ZBAR1, ZBAR2, ZBAR3 = range(6)
T = Z1  # curve parameter lives in the z1 slot
VARIABLE_NAMES = ('z1', 'z2', 'z3', 'zbar1', 'zbar2', 'zbar3')


class ComplexRational:
    """Gaussian rational re + i*im with Fraction parts"""

    __slots__ = ('re', 'im')

    def __init__(self, re: Union[int, Fraction, str] = 0, im: Union[int, Fraction, str] = 0):
        object.__setattr__(self, 're', Fraction(re))
        object.__setattr__(self, 'im', Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError('ComplexRational is immutable')

    @classmethod
    def coerce(cls, value) -> 'ComplexRational':
        if isinstance(value, ComplexRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        if isinstance(value, float):
            return cls(Fraction(value))
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        raise TypeError(f"Cannot convert {type(value).__name__} to ComplexRational")

    @staticmethod
    def _exact(other) -> Optional['ComplexRational']:
        if isinstance(other, ComplexRational):
            return other
        if isinstance(other, (int, Fraction)):
            return ComplexRational(other)
        return None

    def __add__(self, other):
        o = self._exact(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return complex(self) + other
            return NotImplemented
        return ComplexRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._exact(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return complex(self) - other
            return NotImplemented
        return ComplexRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._exact(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return complex(self) * other
            return NotImplemented
        return ComplexRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._exact(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return complex(self) / other
            return NotImplemented
        norm = o.abs2()
        if norm == 0:
            raise ZeroDivisionError('division by zero ComplexRational')
        return self * ComplexRational(o.re / norm, -o.im / norm)

    def __rtruediv__(self, other):
        o = self._exact(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return other / complex(self)
            return NotImplemented
        return o / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return ComplexRational(1) / (self ** -exponent)
        result = ComplexRational(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        o = self._exact(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return complex(self) == other
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self) -> float:
        return abs(complex(self))

    def conjugate(self) -> 'ComplexRational':
        return ComplexRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __repr__(self):
        return f"ComplexRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = '+' if self.im > 0 else '-'
        return f"{self.re}{sign}{abs(self.im)}i"


Coefficient = Union[ComplexRational, complex]


def _coefficient(value) -> Coefficient:
    if isinstance(value, (ComplexRational, int, Fraction)):
        return ComplexRational.coerce(value)
    return complex(value)


def _conj(value):
    return value.conjugate()


def _is_exact(value) -> bool:
    return isinstance(value, ComplexRational)


class MixedMonomial(NamedTuple):
    """Exponents alpha of (z1, z2, z3) and beta of (zbar1, zbar2, zbar3)"""

    alpha: Tuple[int, int, int] = (0, 0, 0)
    beta: Tuple[int, int, int] = (0, 0, 0)

    @classmethod
    def from_exponents(cls, exponents: Sequence[int]) -> 'MixedMonomial':
        exponents = tuple(int(e) for e in exponents)
        if len(exponents) != 6 or min(exponents) < 0:
            raise ValueError(f"Invalid exponent vector {exponents}")
        return cls(exponents[:3], exponents[3:])

    def exponents(self) -> Tuple[int, ...]:
        return self.alpha + self.beta

    @property
    def degree(self) -> int:
        return sum(self.alpha) + sum(self.beta)

    @property
    def is_mixed(self) -> bool:
        return sum(self.alpha) > 0 and sum(self.beta) > 0

    @property
    def is_pure(self) -> bool:
        return self.degree > 0 and not self.is_mixed

    @property
    def involves_z3(self) -> bool:
        return bool(self.alpha[2] or self.beta[2])

    @property
    def projection(self) -> Tuple[int, int]:
        """(alpha1 + beta1, alpha2 + beta2)"""
        return self.alpha[0] + self.beta[0], self.alpha[1] + self.beta[1]

    def swapped(self) -> 'MixedMonomial':
        return MixedMonomial(self.beta, self.alpha)

    def sort_key(self):
        return self.degree, self.exponents()

    def times(self, other: 'MixedMonomial') -> 'MixedMonomial':
        return MixedMonomial(
            (self.alpha[0] + other.alpha[0], self.alpha[1] + other.alpha[1], self.alpha[2] + other.alpha[2]),
            (self.beta[0] + other.beta[0], self.beta[1] + other.beta[1], self.beta[2] + other.beta[2]),
        )


ONE = MixedMonomial()

Terms = Dict[MixedMonomial, Coefficient]


def _mul_terms(left: Mapping[MixedMonomial, Coefficient], right: Mapping[MixedMonomial, Coefficient],
               cap: int) -> Tuple[Terms, bool]:
    product: Terms = {}
    cut = False
    for m1, c1 in left.items():
        d1 = m1.degree
        for m2, c2 in right.items():
            if d1 + m2.degree > cap:
                cut = True
                continue
            mono = m1.times(m2)
            product[mono] = product.get(mono, 0) + c1 * c2
    return product, cut


class MixedPolynomial:
    """Immutable sparse polynomial in z and zbar with a degree cap"""

    __slots__ = ('_terms', 'degree_cap', 'real_valued', 'truncated', '_compiled')

    def __init__(self, terms: Optional[Mapping] = None, degree_cap: int = DEFAULT_DEGREE_CAP,
                 real_valued: Optional[bool] = None, truncated: bool = False):
        cleaned: Terms = {}
        for mono, coeff in (terms or {}).items():
            if not isinstance(mono, MixedMonomial):
                mono = MixedMonomial.from_exponents(mono)
            if not coeff:
                continue
            if mono.degree > degree_cap:
                truncated = True
                continue
            cleaned[mono] = _coefficient(coeff)
        self._terms = dict(sorted(cleaned.items(), key=lambda item: item[0].sort_key()))
        self.degree_cap = degree_cap
        self.truncated = truncated
        self._compiled = None
        self.real_valued = self.is_hermitian() if real_valued is None else real_valued

    # construction helpers

    @classmethod
    def zero(cls, degree_cap: int = DEFAULT_DEGREE_CAP) -> 'MixedPolynomial':
        return cls({}, degree_cap, real_valued=True)

    @classmethod
    def constant(cls, value, degree_cap: int = DEFAULT_DEGREE_CAP) -> 'MixedPolynomial':
        return cls({ONE: value}, degree_cap)

    @classmethod
    def variable(cls, index: Union[int, str], degree_cap: int = DEFAULT_DEGREE_CAP) -> 'MixedPolynomial':
        exps = [0] * 6
        exps[variable_index(index)] = 1
        return cls({MixedMonomial.from_exponents(exps): 1}, degree_cap, real_valued=False)

    @classmethod
    def monomial(cls, alpha=(0, 0, 0), beta=(0, 0, 0), coefficient=1,
                 degree_cap: int = DEFAULT_DEGREE_CAP) -> 'MixedPolynomial':
        return cls({MixedMonomial(tuple(alpha), tuple(beta)): coefficient}, degree_cap)

    # mapping protocol

    @property
    def terms(self) -> Mapping[MixedMonomial, Coefficient]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __iter__(self) -> Iterator[MixedMonomial]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, mono) -> bool:
        return mono in self._terms

    def coefficient(self, mono: MixedMonomial) -> Coefficient:
        return self._terms.get(mono, ComplexRational(0))

    def constant_term(self) -> Coefficient:
        return self.coefficient(ONE)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_exact(self) -> bool:
        return all(_is_exact(c) for c in self._terms.values())

    def is_holomorphic(self) -> bool:
        return all(sum(m.beta) == 0 for m in self._terms)

    def is_hermitian(self, tolerance: float = 1e-12) -> bool:
        """coeff(alpha, beta) == conj(coeff(beta, alpha)) for every stored term"""
        for mono, coeff in self._terms.items():
            partner = self._terms.get(mono.swapped())
            if partner is None:
                if _is_exact(coeff) or abs(coeff) > tolerance:
                    return False
                continue
            diff = coeff - _conj(partner)
            if _is_exact(diff):
                if diff:
                    return False
            elif abs(diff) > tolerance * max(1.0, abs(coeff)):
                return False
        return True

    @property
    def max_degree(self) -> int:
        return max((m.degree for m in self._terms), default=-1)

    def vanishing_order(self) -> Union[int, float]:
        return min((m.degree for m in self._terms), default=math.inf)

    # arithmetic

    def _lift(self, other) -> 'MixedPolynomial':
        if isinstance(other, MixedPolynomial):
            return other
        return MixedPolynomial.constant(other, self.degree_cap)

    def __add__(self, other) -> 'MixedPolynomial':
        other = self._lift(other)
        if other.degree_cap != self.degree_cap:
            raise CapMismatchError(f"Cannot add polynomials with caps {self.degree_cap} and {other.degree_cap}")
        terms = dict(self._terms)
        for mono, coeff in other._terms.items():
            terms[mono] = terms.get(mono, 0) + coeff
        return MixedPolynomial(terms, self.degree_cap,
                               real_valued=True if self.real_valued and other.real_valued else None,
                               truncated=self.truncated or other.truncated)

    __radd__ = __add__

    def __neg__(self) -> 'MixedPolynomial':
        return MixedPolynomial({m: -c for m, c in self._terms.items()}, self.degree_cap,
                               real_valued=self.real_valued, truncated=self.truncated)

    def __sub__(self, other) -> 'MixedPolynomial':
        return self + (-self._lift(other))

    def __rsub__(self, other) -> 'MixedPolynomial':
        return self._lift(other) - self

    def scale(self, factor) -> 'MixedPolynomial':
        factor = _coefficient(factor)
        keeps_real = self.real_valued and (factor.is_real if _is_exact(factor) else factor.imag == 0)
        return MixedPolynomial({m: c * factor for m, c in self._terms.items()}, self.degree_cap,
                               real_valued=True if keeps_real else None, truncated=self.truncated)

    def __mul__(self, other) -> 'MixedPolynomial':
        if not isinstance(other, MixedPolynomial):
            return self.scale(other)
        cap = min(self.degree_cap, other.degree_cap)
        terms, cut = _mul_terms(self._terms, other._terms, cap)
        return MixedPolynomial(terms, cap,
                               real_valued=True if self.real_valued and other.real_valued else None,
                               truncated=self.truncated or other.truncated or cut)

    __rmul__ = __mul__

    def __truediv__(self, other) -> 'MixedPolynomial':
        if isinstance(other, MixedPolynomial):
            if other.max_degree > 0 or other.is_zero:
                raise ZeroDivisionError('division only by nonzero constants')
            other = other.constant_term()
        other = _coefficient(other)
        return self.scale(1 / other)

    def __pow__(self, exponent: int) -> 'MixedPolynomial':
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError('polynomial powers need a nonnegative integer exponent')
        result = MixedPolynomial.constant(1, self.degree_cap)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, MixedPolynomial):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction, complex, float, ComplexRational)):
            return self == MixedPolynomial.constant(other, self.degree_cap)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def conjugate(self) -> 'MixedPolynomial':
        return MixedPolynomial({m.swapped(): _conj(c) for m, c in self._terms.items()}, self.degree_cap,
                               real_valued=self.real_valued, truncated=self.truncated)

    def real_part(self) -> 'MixedPolynomial':
        half = (self + self.conjugate()).scale(Fraction(1, 2))
        return MixedPolynomial(half._terms, self.degree_cap, real_valued=True, truncated=self.truncated)

    # term selection

    def filter(self, predicate: Callable[[MixedMonomial, Coefficient], bool]) -> 'MixedPolynomial':
        return MixedPolynomial({m: c for m, c in self._terms.items() if predicate(m, c)}, self.degree_cap,
                               truncated=self.truncated)

    def homogeneous_part(self, degree: int) -> 'MixedPolynomial':
        return self.filter(lambda m, c: m.degree == degree)

    def with_cap(self, degree_cap: int) -> 'MixedPolynomial':
        return MixedPolynomial(self._terms, degree_cap, truncated=self.truncated)

    def to_numeric(self) -> 'MixedPolynomial':
        return MixedPolynomial({m: complex(c) for m, c in self._terms.items()}, self.degree_cap,
                               real_valued=self.real_valued, truncated=self.truncated)

    def chop(self, tolerance: float) -> 'MixedPolynomial':
        return MixedPolynomial({m: c for m, c in self._terms.items() if abs(c) >= tolerance}, self.degree_cap,
                               real_valued=self.real_valued, truncated=self.truncated)

    def compiled(self) -> Tuple[np.ndarray, np.ndarray]:
        """Exponent matrix (k, 6) and complex coefficient vector (k,)"""
        if self._compiled is None:
            exps = np.array([m.exponents() for m in self._terms], dtype=np.int64).reshape(-1, 6)
            coeffs = np.array([complex(c) for c in self._terms.values()], dtype=complex)
            object.__setattr__(self, '_compiled', (exps, coeffs))
        return self._compiled

    def __repr__(self):
        return f"MixedPolynomial({len(self._terms)} terms, degree_cap={self.degree_cap})"


def variable_index(var: Union[int, str]) -> int:
    if isinstance(var, str):
        try:
            return VARIABLE_NAMES.index(var)
        except ValueError:
            raise ValueError(f"Unknown variable {var!r}") from None
    if not 0 <= var < 6:
        raise ValueError(f"Variable index {var} out of range")
    return var


def add(p: MixedPolynomial, q: MixedPolynomial) -> MixedPolynomial:
    return p + q


def mul(p: MixedPolynomial, q: MixedPolynomial) -> MixedPolynomial:
    return p * q


def conjugate(p: MixedPolynomial) -> MixedPolynomial:
    return p.conjugate()


def wirtinger_derivative(p: MixedPolynomial, var: Union[int, str], order: int = 1) -> MixedPolynomial:
    """Formal partial derivative treating z and zbar as independent"""
    index = variable_index(var)
    if order < 1:
        raise ValueError('derivative order must be at least 1')
    terms: Terms = {}
    for mono, coeff in p.items():
        exps = list(mono.exponents())
        power = exps[index]
        if power < order:
            continue
        exps[index] = power - order
        terms[MixedMonomial.from_exponents(exps)] = coeff * math.perm(power, order)
    return MixedPolynomial(terms, p.degree_cap, truncated=p.truncated)


def derivative(p: MixedPolynomial, alpha: Sequence[int] = (0, 0, 0), beta: Sequence[int] = (0, 0, 0)) -> MixedPolynomial:
    """Mixed partial d^alpha/dz^alpha d^beta/dzbar^beta"""
    result = p
    for index, order in enumerate(tuple(alpha) + tuple(beta)):
        if order:
            result = wirtinger_derivative(result, index, order)
    return result


def evaluate_many(p: MixedPolynomial, points, chunk: int = 4096) -> np.ndarray:
    """Evaluate at an (n, 3) array of complex points, substituting zbar = conj(z)"""
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    if pts.shape[-1] != 3:
        raise ValueError(f"points must have shape (n, 3), got {pts.shape}")
    exps, coeffs = p.compiled()
    out = np.zeros(len(pts), dtype=complex)
    if not len(coeffs):
        return out
    top = int(exps.max())
    for start in range(0, len(pts), chunk):
        block = pts[start:start + chunk]
        channels = np.concatenate([block, block.conj()], axis=1).T
        table = np.ones((top + 1, 6, block.shape[0]), dtype=complex)
        for k in range(1, top + 1):
            table[k] = table[k - 1] * channels
        values = np.ones((len(coeffs), block.shape[0]), dtype=complex)
        for v in range(6):
            values *= table[exps[:, v], v, :]
        out[start:start + block.shape[0]] = coeffs @ values
    return out


def evaluate(p: MixedPolynomial, point: Sequence[complex]) -> complex:
    return complex(evaluate_many(p, [point])[0])


class HoloPolyMap:
    """Holomorphic polynomial map C^3 -> C^3 given by three component polynomials"""

    __slots__ = ('components',)

    def __init__(self, components: Sequence[MixedPolynomial]):
        components = tuple(components)
        if len(components) != 3:
            raise ValueError('a HoloPolyMap has exactly three components')
        for comp in components:
            if not comp.is_holomorphic():
                raise ValueError('map components must not contain conjugate variables')
        object.__setattr__(self, 'components', components)

    def __setattr__(self, name, value):
        raise AttributeError('HoloPolyMap is immutable')

    @classmethod
    def identity(cls, degree_cap: int = DEFAULT_DEGREE_CAP) -> 'HoloPolyMap':
        return cls([MixedPolynomial.variable(i, degree_cap) for i in range(3)])

    @property
    def degree_cap(self) -> int:
        return max(c.degree_cap for c in self.components)

    @property
    def truncated(self) -> bool:
        return any(c.truncated for c in self.components)

    def __eq__(self, other):
        if not isinstance(other, HoloPolyMap):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def compose(self, inner: 'HoloPolyMap') -> 'HoloPolyMap':
        """self after inner: z -> self(inner(z))"""
        return HoloPolyMap([compose(c, inner) for c in self.components])

    def evaluate(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        return np.stack([evaluate_many(c, pts) for c in self.components], axis=1)

    def linear_part(self) -> List[List[Coefficient]]:
        units = [MixedMonomial(tuple(int(i == j) for i in range(3))) for j in range(3)]
        return [[comp.coefficient(u) for u in units] for comp in self.components]

    def translation(self) -> Tuple[Coefficient, ...]:
        return tuple(c.constant_term() for c in self.components)

    def jacobian_determinant(self) -> Coefficient:
        (a, b, c), (d, e, f), (g, h, k) = self.linear_part()
        return a * (e * k - f * h) - b * (d * k - f * g) + c * (d * h - e * g)

    def is_invertible(self) -> bool:
        return bool(self.jacobian_determinant())

    def is_vertical(self) -> bool:
        """Shape (z1, z2, lam*z3 + F(z1, z2)) with lam != 0"""
        z1 = MixedPolynomial.variable(Z1, self.components[0].degree_cap)
        z2 = MixedPolynomial.variable(Z2, self.components[1].degree_cap)
        if self.components[0] != z1 or self.components[1] != z2:
            return False
        unit = MixedMonomial((0, 0, 1))
        third = self.components[2]
        return bool(third.coefficient(unit)) and all(
            m == unit or not m.involves_z3 for m in third)

    def invert_vertical(self) -> 'HoloPolyMap':
        """Exact inverse of a map of the form (z1, z2, lam*z3 + F(z1, z2))"""
        if not self.is_vertical():
            raise ValueError('only maps of the form (z1, z2, lam*z3 + F(z1, z2)) are inverted exactly')
        third = self.components[2]
        unit = MixedMonomial((0, 0, 1))
        lam = third.coefficient(unit)
        rest = third.filter(lambda m, c: m != unit)
        z3 = MixedPolynomial.variable(Z3, third.degree_cap)
        return HoloPolyMap([self.components[0], self.components[1], (z3 - rest).scale(1 / lam)])

    def __repr__(self):
        return f"HoloPolyMap(degree_cap={self.degree_cap})"


def composition_degree(p: MixedPolynomial, mapping: HoloPolyMap) -> int:
    """Degree of p after substitution when nothing is truncated"""
    degrees = [max(c.max_degree, 0) for c in mapping.components] * 2
    return max((sum(e * d for e, d in zip(m.exponents(), degrees)) for m in p), default=0)


def compose(p: MixedPolynomial, mapping: HoloPolyMap, degree_cap: Optional[int] = None,
            strict: bool = False) -> MixedPolynomial:
    """Substitute mapping components into the z slots and their conjugates into the zbar slots"""
    cap = p.degree_cap if degree_cap is None else degree_cap
    channels: List[Terms] = [dict(c.with_cap(cap).items()) for c in mapping.components]
    channels += [{m.swapped(): _conj(c) for m, c in ch.items()} for ch in channels]
    truncated = any(c.with_cap(cap).truncated for c in mapping.components)
    cache: Dict[Tuple[int, int], Terms] = {}

    def power(v: int, k: int) -> Terms:
        nonlocal truncated
        if k == 1:
            return channels[v]
        if (v, k) not in cache:
            terms, cut = _mul_terms(power(v, k - 1), channels[v], cap)
            truncated = truncated or cut
            cache[(v, k)] = terms
        return cache[(v, k)]

    result: Terms = {}
    for mono, coeff in p.items():
        term: Terms = {ONE: coeff}
        for v, e in enumerate(mono.exponents()):
            if e:
                term, cut = _mul_terms(term, power(v, e), cap)
                truncated = truncated or cut
        for m, c in term.items():
            result[m] = result.get(m, 0) + c
    if strict and truncated:
        raise CapOverflowError(f"composition exceeds degree cap {cap}; jet order insufficient")
    if truncated:
        logging.debug(f"Composition truncated at degree {cap}")
    return MixedPolynomial(result, cap, real_valued=True if p.real_valued else None,
                           truncated=p.truncated or truncated)


def vanishing_order(p: MixedPolynomial) -> Union[int, float]:
    return p.vanishing_order()


@dataclass(frozen=True)
class CurveJet:
    """Holomorphic curve t -> (g1(t), g2(t), g3(t)) through 0, stored as polynomials in the z1 slot"""

    components: Tuple[MixedPolynomial, MixedPolynomial, MixedPolynomial]
    jet_order: int

    def __post_init__(self):
        if len(self.components) != 3:
            raise ValueError('a curve has exactly three components')
        for comp in self.components:
            if any(sum(m.beta) or m.alpha[1] or m.alpha[2] for m in comp):
                raise ValueError('curve components must be polynomials in t alone')
            if comp.constant_term():
                raise ValueError('curve must pass through the origin')

    @classmethod
    def from_coefficients(cls, coefficients: Sequence[Mapping[int, object]], jet_order: int) -> 'CurveJet':
        comps = []
        for coeffs in coefficients:
            terms = {MixedMonomial((k, 0, 0)): c for k, c in coeffs.items()}
            comps.append(MixedPolynomial(terms, jet_order, real_valued=False))
        return cls(tuple(comps), jet_order)

    @classmethod
    def axis(cls, jet_order: int) -> 'CurveJet':
        return cls.from_coefficients([{1: 1}, {}, {}], jet_order)

    def coefficient(self, index: int, power: int) -> Coefficient:
        return self.components[index].coefficient(MixedMonomial((power, 0, 0)))

    def component_order(self, index: int) -> Union[int, float]:
        return self.components[index].vanishing_order()

    def order(self) -> Union[int, float]:
        return min(self.component_order(i) for i in range(3))

    def as_map(self) -> HoloPolyMap:
        return HoloPolyMap(self.components)


def restrict_to_curve(p: MixedPolynomial, curve: CurveJet) -> MixedPolynomial:
    """p(g(t)) as a polynomial in (t, tbar) stored in the z1 slot"""
    return compose(p, curve.as_map())


def contact_order(p: MixedPolynomial, curve: CurveJet) -> Union[Fraction, float]:
    """nu0(p o g) / nu0(g); infinity when p o g vanishes to the jet order"""
    if curve.order() == math.inf:
        raise CurveError('Curve vanishes identically up to its jet order', {'jet_order': curve.jet_order})
    along = vanishing_order(restrict_to_curve(p, curve))
    if along == math.inf:
        return math.inf
    return Fraction(along, curve.order())


def univariate_terms(p: MixedPolynomial) -> Iterable[Tuple[int, int, Coefficient]]:
    """(power of t, power of tbar, coefficient) for a polynomial living in the z1 slot"""
    for mono, coeff in p.items():
        yield mono.alpha[0], mono.beta[0], coeff
