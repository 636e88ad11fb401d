from dataclasses import dataclass, field
from typing import Dict, Optional

from holderbound.config import AnalysisConfig
from holderbound.corpus import get_entry
from holderbound.errors import ConfigError, ParseError
from holderbound.expression_parser import format_polynomial, parse_curve, parse_defining_function
from holderbound.polynomial_core import CurveJet, MixedPolynomial


@dataclass(frozen=True)
class DomainSpec:
    domain_text: str
    curve_text: str
    eta: int
    config: AnalysisConfig
    polynomial: MixedPolynomial = field(repr=False)
    curve: CurveJet = field(repr=False)
    name: Optional[str] = None

    @staticmethod
    def create(domain_text, curve_text, eta, config=None, name=None):
        """Parse both inputs and check the printed polynomial parses back to the same terms"""
        config = config or AnalysisConfig()
        try:
            eta = int(eta)
        except (TypeError, ValueError):
            raise ConfigError(f"eta must be an integer, got {eta!r}")
        if eta < 1:
            raise ConfigError(f"eta must be positive, got {eta}")
        polynomial = parse_defining_function(domain_text, config.jet_order)
        if parse_defining_function(format_polynomial(polynomial), config.jet_order).terms != polynomial.terms:
            raise ParseError('Printed polynomial does not parse back to the same terms')
        curve = parse_curve(curve_text, config.jet_order)
        return DomainSpec(domain_text.strip(), curve_text.strip(), eta, config, polynomial, curve, name)

    @staticmethod
    def from_corpus(name, config=None):
        entry = get_entry(name)
        return DomainSpec.create(entry.domain, entry.curve, entry.eta, config, name=entry.name)


@dataclass(frozen=True)
class ReportRecord:
    id: str
    name: Optional[str]
    eta: int
    status: str
    passed: bool
    bound: Optional[str]

    @staticmethod
    def create(report: Dict):
        """Summary row for a stored report"""
        verdict = report.get('verdict') or {}
        return ReportRecord(report['id'], report['input'].get('name'), report['input']['eta'], report['status'],
                            bool(report['passed']), verdict.get('bound'))

    def to_dict(self) -> Dict:
        return {'id': self.id, 'name': self.name, 'eta': self.eta, 'status': self.status,
                'passed': self.passed, 'bound': self.bound}
