"""
Parser and printer for defining functions and curves.

Grammar (whitespace-insensitive)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('+' | '-') unary | power
    power   := factor ('^' INTEGER)?
    factor  := NUMBER | 'i' | VARIABLE | FUNC '(' expr ')' | '(' expr ')'
    FUNC    := conj | Re | Im | abs2

Variables are z1, z2, z3 for defining functions and t for curves.  Division
is only allowed by nonzero constants, so "3/7" and "0.25" are exact rationals.
"""
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from .errors import CapOverflowError, NotRealValuedError, ParseError
from .polynomial_core import (
    T, VARIABLE_NAMES, ComplexRational, CurveJet, MixedMonomial, MixedPolynomial,
)

TOKEN_PATTERN = re.compile(r"""
    (?P<NUMBER>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<NAME>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<OP>[-+*/^(),])
  | (?P<NEWLINE>\n)
  | (?P<SKIP>[ \t\r]+)
  | (?P<MISMATCH>.)
""", re.VERBOSE)

FUNCTIONS = ('conj', 'Re', 'Im', 'abs2')


@dataclass(frozen=True)
class Token:
    type: str
    value: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, line_start = 1, 0
    for match in TOKEN_PATTERN.finditer(text):
        kind = match.lastgroup
        value = match.group()
        column = match.start() - line_start + 1
        if kind == 'NEWLINE':
            line += 1
            line_start = match.end()
            continue
        if kind == 'SKIP':
            continue
        if kind == 'MISMATCH':
            raise ParseError(f"Unexpected character {value!r}", line, column)
        tokens.append(Token(kind, value, line, column))
    end_column = len(text) - line_start + 1
    tokens.append(Token('EOF', '', line, end_column))
    return tokens


class Parser:
    """Recursive descent parser producing MixedPolynomial values directly"""

    def __init__(self, tokens: Sequence[Token], variables: Sequence[str], degree_cap: int):
        self.tokens = list(tokens)
        self.pos = 0
        self.current_token = self.tokens[0]
        self.variables = {name: index for name, index in variables}
        self.degree_cap = degree_cap

    def error(self, message: str, token: Optional[Token] = None):
        token = token or self.current_token
        raise ParseError(message, token.line, token.column)

    def eat(self, token_type: str, value: Optional[str] = None) -> Token:
        tok = self.current_token
        if tok.type != token_type or (value is not None and tok.value != value):
            expected = value or token_type
            found = tok.value or tok.type
            self.error(f"Expected {expected!r}, got {found!r}")
        self.pos = min(self.pos + 1, len(self.tokens) - 1)
        self.current_token = self.tokens[self.pos]
        return tok

    def at(self, value: str) -> bool:
        return self.current_token.type == 'OP' and self.current_token.value == value

    def constant(self, value) -> MixedPolynomial:
        return MixedPolynomial.constant(value, self.degree_cap)

    def factor(self) -> MixedPolynomial:
        tok = self.current_token
        if tok.type == 'NUMBER':
            self.eat('NUMBER')
            return self.constant(Fraction(tok.value))
        if tok.type == 'NAME':
            self.eat('NAME')
            if tok.value == 'i':
                return self.constant(ComplexRational(0, 1))
            if tok.value in self.variables:
                return MixedPolynomial.variable(self.variables[tok.value], self.degree_cap)
            if tok.value in FUNCTIONS:
                self.eat('OP', '(')
                inner = self.expr()
                self.eat('OP', ')')
                return self.apply(tok.value, inner)
            self.error(f"Unknown name {tok.value!r}", tok)
        if self.at('('):
            self.eat('OP', '(')
            node = self.expr()
            self.eat('OP', ')')
            return node
        self.error(f"Unexpected token {tok.value or tok.type!r}", tok)

    @staticmethod
    def apply(name: str, inner: MixedPolynomial) -> MixedPolynomial:
        if name == 'conj':
            return inner.conjugate()
        if name == 'Re':
            return inner.real_part()
        if name == 'Im':
            return (inner - inner.conjugate()).scale(ComplexRational(0, Fraction(-1, 2)))
        return inner * inner.conjugate()

    def power(self) -> MixedPolynomial:
        base = self.factor()
        if self.at('^'):
            self.eat('OP', '^')
            tok = self.current_token
            if tok.type != 'NUMBER' or not tok.value.isdigit():
                self.error('Exponent must be a nonnegative integer literal')
            self.eat('NUMBER')
            return base ** int(tok.value)
        return base

    def unary(self) -> MixedPolynomial:
        if self.at('-'):
            self.eat('OP', '-')
            return -self.unary()
        if self.at('+'):
            self.eat('OP', '+')
            return self.unary()
        return self.power()

    def term(self) -> MixedPolynomial:
        result = self.unary()
        while self.at('*') or self.at('/'):
            op = self.eat('OP')
            right = self.unary()
            if op.value == '*':
                result = result * right
            else:
                if right.is_zero or right.max_degree > 0:
                    self.error('Division is only allowed by nonzero constants', op)
                result = result / right.constant_term()
        return result

    def expr(self) -> MixedPolynomial:
        result = self.term()
        while self.at('+') or self.at('-'):
            op = self.eat('OP')
            right = self.term()
            result = result + right if op.value == '+' else result - right
        return result

    def expression_list(self) -> List[MixedPolynomial]:
        items = [self.expr()]
        while self.at(','):
            self.eat('OP', ',')
            items.append(self.expr())
        self.eat('EOF')
        return items


DOMAIN_VARIABLES = [(name, index) for index, name in enumerate(VARIABLE_NAMES[:3])]
CURVE_VARIABLES = [('t', T)]


def parse_defining_function(text: str, degree_cap: int = 64) -> MixedPolynomial:
    """Parse R(z); rejects expressions that are not real-valued or exceed the cap"""
    parser = Parser(tokenize(text), DOMAIN_VARIABLES, degree_cap)
    items = parser.expression_list()
    if len(items) != 1:
        raise ParseError('A defining function is a single expression', 1, 1)
    poly = items[0]
    if poly.truncated:
        raise CapOverflowError(f"Expression has terms above degree cap {degree_cap}")
    if not poly.is_hermitian():
        raise NotRealValuedError('Defining function is not real-valued (Hermitian scan failed)')
    return MixedPolynomial(poly.terms, degree_cap, real_valued=True)


def parse_curve(text: str, jet_order: int) -> CurveJet:
    """Parse three comma- or newline-separated holomorphic expressions in t"""
    source = text.strip()
    if ',' not in source:
        source = ','.join(line for line in source.splitlines() if line.strip())
    parser = Parser(tokenize(source), CURVE_VARIABLES, jet_order)
    items = parser.expression_list()
    if len(items) != 3:
        raise ParseError(f"A curve needs three components, got {len(items)}", 1, 1)
    try:
        return CurveJet(tuple(items), jet_order)
    except ValueError as e:
        raise ParseError(str(e), 1, 1) from e


def format_coefficient(coeff) -> str:
    exact = ComplexRational.coerce(coeff)
    if exact.im == 0:
        return f"({exact.re})"
    if exact.re == 0:
        return f"({exact.im})*i"
    return f"(({exact.re}) + ({exact.im})*i)"


def format_monomial(mono: MixedMonomial, names: Sequence[str] = ('z1', 'z2', 'z3')) -> str:
    factors = []
    for name, power in zip(names, mono.alpha):
        if power:
            factors.append(name if power == 1 else f"{name}^{power}")
    for name, power in zip(names, mono.beta):
        if power:
            factors.append(f"conj({name})" if power == 1 else f"conj({name})^{power}")
    return '*'.join(factors)


def format_polynomial(poly: MixedPolynomial, names: Sequence[str] = ('z1', 'z2', 'z3')) -> str:
    """Text form accepted by parse_defining_function (exact coefficients only)"""
    if poly.is_zero:
        return '0'
    parts = []
    for mono, coeff in poly.items():
        body = format_monomial(mono, names)
        coeff_text = format_coefficient(coeff)
        parts.append(f"{coeff_text}*{body}" if body else coeff_text)
    return ' + '.join(parts)


def format_curve(curve: CurveJet) -> str:
    return ', '.join(format_polynomial(c, ('t', 't', 't')) for c in curve.components)
