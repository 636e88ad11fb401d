import json
import math
from fractions import Fraction

import numpy as np
import pytest

from holderbound.expression_parser import parse_defining_function
from holderbound.holder_pipeline import BetaFit, WitnessCheck
from holderbound.newton_diagram import build_diagram
from holderbound.numerics import fit_row, geometric_sweep
from holderbound.polynomial_core import ComplexRational, MixedMonomial
from holderbound.report import (
    REPORT_FIELDS, diagram_section, dumps, format_float, report_id, to_jsonable, validate_report, verdict_properties,
)
from holderbound.slice_analysis import SliceNormalization


def test_format_float_keeps_full_precision():
    """'.17g' survives a float round trip"""
    value = 0.1 + 0.2
    assert float(format_float(value)) == value
    assert format_float(math.inf) == 'inf'
    assert format_float(-math.inf) == '-inf'
    assert format_float(math.nan) == 'nan'


def test_exact_values():
    """Fractions and Gaussian rationals become strings"""
    assert to_jsonable(Fraction(10, 3)) == '10/3'
    assert to_jsonable(ComplexRational(Fraction(1, 2), -1)) == ['1/2', '-1']
    assert to_jsonable(MixedMonomial((1, 0, 0), (0, 2, 0))) == 'z1*conj(z2)^2'
    assert to_jsonable(MixedMonomial()) == '1'


def test_numpy_and_containers():
    """numpy scalars, complex values and tuple keys are converted"""
    data = {(1, 1): np.float64(0.5), 'flag': np.bool_(True), 'z': 1 + 2j, 'n': np.int64(3), 'xs': (1, 2.0)}
    assert to_jsonable(data) == {'1,1': '0.5', 'flag': True, 'z': ['1', '2'], 'n': 3, 'xs': [1, '2']}


def test_polynomial_summary():
    """Exact polynomials carry their text"""
    summary = to_jsonable(parse_defining_function('Re(z3) + abs2(z2)'))
    assert summary['terms'] == 3
    assert summary['truncated'] is False
    assert 'conj(z2)' in summary['text']


def test_dataclass_rows():
    """Fit rows serialize field by field"""
    deltas = geometric_sweep('1e-2:1e-6:5')
    row = to_jsonable(fit_row('x', deltas, [d ** 0.5 for d in deltas], 0.5))
    assert row['label'] == 'x'
    assert row['passed'] is True
    assert float(row['slope']) == pytest.approx(0.5)


def test_unserializable_value():
    """Unknown objects are rejected"""
    with pytest.raises(TypeError):
        to_jsonable(object())


def test_diagram_section():
    """Weights and the t table are exact strings"""
    r = parse_defining_function('Re(z3) + abs2(z1)^2*abs2(z2) + abs2(z2)^3 + abs2(z1)^5')
    section = diagram_section(build_diagram(r, 6, 10), 'rule')
    assert section['vertices'] == [[10, 0], [4, 2], [0, 6]]
    assert section['weights'][0] == {'eta_nu': '10', 'lambda_nu': '10/3'}
    assert section['t_table']['1'] == '7'
    assert all(section['conditions'].values())


def test_report_id_is_stable():
    """Same inputs give the same id; the id is 16 hex characters"""
    first = report_id('Re(z3)', 't, 0, 0', 4, 'abc')
    assert first == report_id('Re(z3)', 't, 0, 0', 4, 'abc')
    assert first != report_id('Re(z3)', 't, 0, 0', 6, 'abc')
    assert len(first) == 16
    int(first, 16)


def test_dumps_sorted_and_parsable():
    """Output is sorted JSON with a trailing newline"""
    text = dumps({'b': 1, 'a': [1, 2]})
    assert text.endswith('\n')
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {'a': [1, 2], 'b': 1}


def test_validate_report():
    """Every documented key must be present"""
    report = {key: None for key in REPORT_FIELDS}
    assert validate_report(report) == []
    del report['verdict']
    assert validate_report(report) == ['verdict']


def test_verdict_properties_are_serialized():
    """Computed pass/fail flags are written next to the fields"""
    data = to_jsonable(WitnessCheck(1e-4, 0.5, True, 0.0, True, 10))
    assert data['passed'] is True
    assert data['bound_ok'] is True
    failing = to_jsonable(WitnessCheck(1e-4, 5.0, False, 0.0, True, 10))
    assert failing['passed'] is False


def test_verdict_properties_skip_other_properties():
    """Only passed and *_ok properties count as verdicts"""
    assert verdict_properties(BetaFit) == ['passed']
    assert verdict_properties(SliceNormalization) == ['shape_ok']
