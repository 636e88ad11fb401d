"""
JSON rendering of analysis reports.

Exact rationals are written as "p/q" strings, floats as '.17g' strings, integers as
integers and infinities as "inf", so exactness survives the round trip.
"""
import dataclasses
import hashlib
import json
import math
from fractions import Fraction
from typing import Any, Dict, Iterable, List

import numpy as np

from .expression_parser import format_monomial, format_polynomial
from .newton_diagram import NewtonDiagram, PshVerdict, SliceDecomposition
from .numerics import FitRow
from .polynomial_core import ComplexRational, HoloPolyMap, MixedMonomial, MixedPolynomial

REPORT_FIELDS = (
    'id', 'version', 'config_hash', 'config', 'input', 'status', 'passed', 'failed_stage', 'error', 'notes',
    'normal_form', 'newton_diagram', 'psh', 'slice_analysis', 'domain_geometry', 'holder', 'verdict',
)


def format_float(value: float) -> str:
    if math.isnan(value):
        return 'nan'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return format(value, '.17g')


def to_jsonable(value: Any) -> Any:
    """Recursively convert library values into JSON-ready structures"""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if isinstance(value, ComplexRational):
        return [str(value.re), str(value.im)]
    if isinstance(value, (complex, np.complexfloating)):
        return [format_float(value.real), format_float(value.imag)]
    if isinstance(value, MixedMonomial):
        return format_monomial(value) or '1'
    if isinstance(value, MixedPolynomial):
        return polynomial_summary(value)
    if isinstance(value, HoloPolyMap):
        return [polynomial_summary(c) for c in value.components]
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        data = {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)
                if not callable(getattr(value, f.name))}
        for name in verdict_properties(type(value)):
            data[name] = to_jsonable(getattr(value, name))
        return data
    if isinstance(value, dict):
        return {_key(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in value]
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def verdict_properties(cls: type) -> List[str]:
    """Computed pass/fail flags: properties named `passed` or ending in `_ok`"""
    return sorted({name for klass in cls.__mro__ for name, attr in vars(klass).items()
                   if isinstance(attr, property) and (name == 'passed' or name.endswith('_ok'))})


def _key(key: Any) -> str:
    if isinstance(key, tuple):
        return ','.join(str(k) for k in key)
    return str(key)


def polynomial_summary(poly: MixedPolynomial) -> Dict:
    summary = {'terms': len(poly), 'truncated': poly.truncated}
    if poly.is_exact:
        summary['text'] = format_polynomial(poly)
    return summary


def fit_rows(rows: Iterable[FitRow]) -> List[Dict]:
    return [to_jsonable(row) for row in rows]


def diagram_section(diagram: NewtonDiagram, gamma_rule: str) -> Dict:
    return {
        'gamma_rule': gamma_rule,
        'gamma': [to_jsonable(m) for m in diagram.gamma],
        'gamma_L': [to_jsonable(m) for m in diagram.gamma_L],
        'lambda': [to_jsonable(m) for m in diagram.lambda_set],
        's_points': [list(p) for p in diagram.s_points],
        'vertices': [list(v) for v in diagram.vertices],
        'weights': [{'eta_nu': str(e), 'lambda_nu': str(l)} for e, l in diagram.weights],
        't_table': {str(l): str(t) for l, t in enumerate(diagram.t_table)},
        'conditions': diagram.conditions(),
    }


def decomposition_section(decomp: SliceDecomposition) -> Dict:
    return {
        'core_terms': len(decomp.core_terms),
        'm_polynomials': {_key(k): {'segment': decomp.m_segments[k], 'text': format_polynomial(p)}
                          for k, p in decomp.m_polynomials.items()},
        'tail_terms': len(decomp.tail_terms),
        'tail_bound_exponents': [list(b) for b in decomp.tail_bound_exponents],
    }


def psh_section(label: str, verdict: PshVerdict) -> Dict:
    section = to_jsonable(verdict)
    section['polynomial'] = label
    return section


def report_id(domain: str, curve: str, eta: int, config_hash: str) -> str:
    payload = json.dumps([domain, curve, int(eta), config_hash])
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()[:16]


def dumps(report: Dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + '\n'


def validate_report(report: Dict) -> List[str]:
    """Missing top-level keys; an empty list means the report has the documented shape"""
    return [key for key in REPORT_FIELDS if key not in report]
