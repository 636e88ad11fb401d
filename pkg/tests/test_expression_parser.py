from fractions import Fraction

import pytest

from holderbound.corpus import get_entry, names
from holderbound.errors import CapOverflowError, NotRealValuedError, ParseError
from holderbound.expression_parser import (
    format_curve, format_polynomial, parse_curve, parse_defining_function, tokenize,
)
from holderbound.polynomial_core import ComplexRational, MixedMonomial, MixedPolynomial


def test_parse_model_domain():
    """abs2 and Re expand into mixed monomials"""
    r = parse_defining_function('Re(z3) + abs2(z2) + abs2(z1)^2')
    assert r.coefficient(MixedMonomial((0, 0, 1))) == Fraction(1, 2)
    assert r.coefficient(MixedMonomial((0, 0, 0), (0, 0, 1))) == Fraction(1, 2)
    assert r.coefficient(MixedMonomial((0, 1, 0), (0, 1, 0))) == 1
    assert r.coefficient(MixedMonomial((2, 0, 0), (2, 0, 0))) == 1
    assert len(r) == 4
    assert r.real_valued


def test_exact_rational_literals():
    """Decimals and fractions parse to exact coefficients"""
    r = parse_defining_function('0.25*abs2(z1) + (15/7)*abs2(z2) + Re(z3)')
    assert r.coefficient(MixedMonomial((1, 0, 0), (1, 0, 0))) == Fraction(1, 4)
    assert r.coefficient(MixedMonomial((0, 1, 0), (0, 1, 0))) == Fraction(15, 7)


def test_imaginary_part_and_unit():
    """Im(z1) is (z1 - conj(z1)) / 2i"""
    r = parse_defining_function('Im(z1)')
    assert r.coefficient(MixedMonomial((1, 0, 0))) == ComplexRational(0, Fraction(-1, 2))
    assert r.coefficient(MixedMonomial((0, 0, 0), (1, 0, 0))) == ComplexRational(0, Fraction(1, 2))


def test_non_real_expression_rejected():
    """z1 alone is not real-valued"""
    with pytest.raises(NotRealValuedError):
        parse_defining_function('Re(z3) + z1')


def test_cap_overflow_rejected():
    """Terms above the degree cap are an error, not a silent truncation"""
    with pytest.raises(CapOverflowError):
        parse_defining_function('Re(z3) + abs2(z1)^5', degree_cap=8)


def test_parse_error_position():
    """A stray operator reports its line and column"""
    with pytest.raises(ParseError) as excinfo:
        parse_defining_function('Re(z3) + * z1')
    assert excinfo.value.line == 1
    assert excinfo.value.column == 10


def test_unexpected_character_on_second_line():
    """Tokenizer errors carry the line number"""
    with pytest.raises(ParseError) as excinfo:
        tokenize('Re(z3)\n+ $')
    assert excinfo.value.line == 2
    assert excinfo.value.column == 3


def test_unknown_name():
    """Unknown identifiers are rejected"""
    with pytest.raises(ParseError, match='Unknown name'):
        parse_defining_function('Re(w3)')


def test_division_by_polynomial_rejected():
    """Only constants may divide"""
    with pytest.raises(ParseError, match='Division'):
        parse_defining_function('Re(z3) / z1')


def test_non_integer_exponent_rejected():
    """Exponents are nonnegative integer literals"""
    with pytest.raises(ParseError, match='Exponent'):
        parse_defining_function('abs2(z1)^1.5')


def test_parse_curve_components():
    """A curve is three expressions in t"""
    curve = parse_curve('t, t^2, 0', 16)
    assert curve.coefficient(0, 1) == 1
    assert curve.coefficient(1, 2) == 1
    assert curve.components[2].is_zero
    assert curve.order() == 1


def test_parse_curve_newline_separated():
    """Components may also sit on separate lines"""
    curve = parse_curve('t\n2*t^3\n0\n', 16)
    assert curve.coefficient(1, 3) == 2


def test_curve_needs_three_components():
    """Two components are a parse error"""
    with pytest.raises(ParseError, match='three components'):
        parse_curve('t, 0', 16)


def test_curve_through_origin():
    """A constant term is reported as a parse error"""
    with pytest.raises(ParseError, match='origin'):
        parse_curve('1 + t, 0, 0', 16)


def test_printed_polynomial_parses_back():
    """format_polynomial output is accepted by the parser"""
    r = parse_defining_function('Re(z3) + abs2(z1)^4 + (15/7)*abs2(z1)*Re(z1^6) + abs2(z2)')
    assert parse_defining_function(format_polynomial(r)) == r
    assert format_polynomial(MixedPolynomial.zero()) == '0'


def test_printed_curve_parses_back():
    """format_curve output is accepted by parse_curve"""
    curve = parse_curve('t, t^2, 0', 16)
    again = parse_curve(format_curve(curve), 16)
    assert again.components == curve.components


@pytest.mark.parametrize('name', names())
def test_parse_corpus_entry(name):
    """Every corpus domain and curve parses through to the end of input"""
    entry = get_entry(name)
    r = parse_defining_function(entry.domain)
    curve = parse_curve(entry.curve, 12)
    assert r.real_valued
    assert r.coefficient(MixedMonomial((0, 0, 1))) == Fraction(1, 2)
    assert len(curve.components) == 3


def test_single_token_input():
    """The parser stops on the final token"""
    assert parse_defining_function('0').is_zero


def test_trailing_tokens_rejected():
    """Anything after a complete expression is an error"""
    with pytest.raises(ParseError, match='EOF'):
        parse_defining_function('Re(z3) )')
