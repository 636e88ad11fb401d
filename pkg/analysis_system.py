import json
import os
import logging
from typing import Dict, List, Optional

import boto3
import numpy as np
from werkzeug.utils import secure_filename

from api.s3_storage import S3ReportStorage
from holderbound import __version__
from holderbound.domain_geometry import (
    slab_variation, verify_containment, verify_interpolation, verify_Jnu_dominated, verify_polydisc_containment,
)
from holderbound.errors import KrantzBranch, PrerequisiteError, StageError
from holderbound.expression_parser import format_curve, format_polynomial
from holderbound.holder_pipeline import (
    HolomorphicWitness, beta_sup_norm_fit, build_test_form, check_witness, circle_average_H, conclude, conclude_krantz,
    mean_value_self_test, witness_factory, witness_gap_check,
)
from holderbound.newton_diagram import (
    GAMMA_RULE, build_diagram, decompose, iterated_truncation, levi_psh_check, mixed_witness,
    truncation_defect, weighted_truncation,
)
from holderbound.normal_form import certify_special_coordinates
from holderbound.polynomial_core import contact_order
from holderbound.report import (
    decomposition_section, diagram_section, dumps, fit_rows, psh_section, report_id, to_jsonable,
    validate_report,
)
from holderbound.slice_analysis import (
    chain_rule_residual, choose_direction, normalize_sweep, tau_monotone, verify_r_derivative_scaling,
    verify_rho_derivative_scaling,
)
from models import DomainSpec, ReportRecord

logging.basicConfig(level=logging.INFO, format='%(asctime)s %(levelname)s %(message)s')

STAGES = ('normal_form', 'newton_diagram', 'slice_analysis', 'domain_geometry', 'holder_pipeline')
CHAIN_RULE_TOLERANCE = 1e-10
MEAN_VALUE_TOLERANCE = 1e-10


class AnalysisSystem:
    def __init__(self, reports_dir='reports', s3_bucket=None, s3_region=None, aws_access_key_id=None,
                 aws_secret_access_key=None, s3_client=None):
        self.reports_dir = reports_dir
        self.s3 = None
        if s3_bucket:
            session = None
            if s3_client is None:
                session = boto3.Session(
                    aws_access_key_id=aws_access_key_id,
                    aws_secret_access_key=aws_secret_access_key,
                    region_name=s3_region
                )
            self.s3 = S3ReportStorage(bucket_name=s3_bucket, session=session, client=s3_client)

    # pipeline

    def run_analysis(self, spec: DomainSpec, until: str = 'holder_pipeline',
                     witness: Optional[HolomorphicWitness] = None) -> Dict:
        """Run the stages up to and including `until` and assemble the report

        A tabulated witness is validated at its own delta once the stages have run.
        """
        if until not in STAGES:
            raise ValueError(f"Unknown stage {until!r}")
        if witness is not None and STAGES.index(until) < STAGES.index('slice_analysis'):
            raise ValueError('Witness validation needs the slice_analysis stage')
        config = spec.config
        report = {key: None for key in ('normal_form', 'newton_diagram', 'psh', 'slice_analysis',
                                        'domain_geometry', 'holder', 'verdict', 'failed_stage', 'error')}
        report.update({
            'id': report_id(spec.domain_text, spec.curve_text, spec.eta, config.config_hash()),
            'version': __version__,
            'config_hash': config.config_hash(),
            'config': to_jsonable(config.to_dict()),
            'input': {'name': spec.name, 'domain': spec.domain_text, 'curve': spec.curve_text, 'eta': spec.eta,
                      'parsed_domain': format_polynomial(spec.polynomial), 'parsed_curve': format_curve(spec.curve),
                      'jet_order': config.jet_order},
            'notes': [],
            'status': 'complete',
        })
        stages = STAGES[:STAGES.index(until) + 1]
        state: Dict = {}
        logging.info(f"Running analysis {report['id']} ({spec.name or 'custom domain'}, eta={spec.eta})")
        try:
            for stage in stages:
                getattr(self, f"_stage_{stage}")(spec, state, report)
                if state.get('krantz'):
                    break
            if witness is not None and not state.get('krantz'):
                self._verify_witness(spec, state, report, witness)
        except StageError as e:
            logging.error(f"Error in stage {e.stage}: {str(e)}")
            report['status'] = 'error'
            report['failed_stage'] = e.stage
            report['error'] = {'type': type(e).__name__, 'message': e.message,
                               'diagnostics': to_jsonable(e.diagnostics)}
        sections = [report[name] for name in ('normal_form', 'newton_diagram', 'psh', 'slice_analysis',
                                               'domain_geometry', 'holder') if report[name] is not None]
        report['passed'] = report['status'] == 'complete' and all(s.get('passed', True) for s in sections)
        if report['status'] == 'complete' and not report['passed']:
            report['status'] = 'failed'
        missing = validate_report(report)
        if missing:
            raise RuntimeError(f"Report is missing fields: {missing}")
        return report

    def _stage_normal_form(self, spec: DomainSpec, state: Dict, report: Dict):
        config = spec.config
        try:
            coords = certify_special_coordinates(spec.polynomial, spec.curve, spec.eta, config.shear_candidates)
        except KrantzBranch as e:
            logging.info(f"Krantz branch: {e.message}")
            report['normal_form'] = {'branch': 'krantz', 'message': e.message, 'passed': True,
                                     'contact_order': to_jsonable(contact_order(spec.polynomial, spec.curve))}
            report['verdict'] = to_jsonable(conclude_krantz(spec.eta))
            report['notes'].append(f"skipped stages: {', '.join(STAGES[1:])} (no mixed term up to eta)")
            state['krantz'] = True
            return
        certificate = coords.certificate
        report['normal_form'] = {
            'branch': 'newton_diagram',
            'm': coords.m,
            'eta': coords.eta,
            'h': to_jsonable(coords.h),
            'shear_attempts': coords.shear_attempts,
            'swapped': coords.swapped,
            'contact_order': to_jsonable(coords.contact_order),
            'bloom_graham': {'m': coords.bloom_graham.m, 'witness': to_jsonable(coords.bloom_graham.witness)},
            'certificate': {
                'shape_violations': list(certificate.shape_violations),
                'axis_order': to_jsonable(certificate.axis_order),
                'witness': to_jsonable(certificate.witness),
                'witness_coefficient': to_jsonable(certificate.witness_coefficient),
                'passed': certificate.passed,
            },
            'r': to_jsonable(coords.r),
            'truncated': coords.truncated,
            'passed': certificate.passed,
        }
        report['notes'].extend(coords.notes)
        state['coords'] = coords

    def _stage_newton_diagram(self, spec: DomainSpec, state: Dict, report: Dict):
        config = spec.config
        r = state['coords'].r
        diagram = build_diagram(r, state['coords'].m, spec.eta)
        truncations = {nu: weighted_truncation(r, diagram, nu) for nu in range(1, diagram.N + 1)}
        iterated = {nu: iterated_truncation(r, diagram, nu) for nu in range(1, diagram.N)}
        checks = [psh_section('r', levi_psh_check(r, config.grid_points, config.grid_radius, config.psh_tolerance))]
        for nu, poly in truncations.items():
            checks.append(psh_section(f"r~{nu}", levi_psh_check(poly, config.grid_points, config.grid_radius,
                                                                config.psh_tolerance)))
        for nu, poly in iterated.items():
            checks.append(psh_section(f"r~{nu},{nu + 1}", levi_psh_check(poly, config.grid_points,
                                                                         config.grid_radius, config.psh_tolerance)))
        witnesses = []
        for nu in range(1, diagram.N + 1):
            found = mixed_witness(diagram, iterated.get(nu, truncations[nu]), nu, config.psh_tolerance)
            witnesses.append({'nu': nu, 'vertex': list(found.vertex), 'found': found.found,
                              'monomial': to_jsonable(found.monomial),
                              'refutation': to_jsonable(found.refutation)})
        defects = [to_jsonable(truncation_defect(r, diagram, nu)) for nu in truncations]
        decomp = decompose(r, diagram)
        section = diagram_section(diagram, GAMMA_RULE)
        section.update({
            'N': diagram.N,
            'mixed_witnesses': witnesses,
            'truncation_defects': defects,
            'decomposition': decomposition_section(decomp),
        })
        section['passed'] = (all(section['conditions'].values()) and all(w['found'] for w in witnesses)
                             and all(d['passed'] for d in defects))
        report['newton_diagram'] = section
        report['psh'] = {'checks': checks, 'passed': all(c['passed'] for c in checks)}
        state.update(diagram=diagram, decomp=decomp)

    def _stage_slice_analysis(self, spec: DomainSpec, state: Dict, report: Dict):
        config = spec.config
        r, diagram = state['coords'].r, state['diagram']
        choice = choose_direction(state['decomp'], config.theta_samples)
        norms = normalize_sweep(r, choice, config.delta_sweep, diagram.m, spec.eta, config.e_delta_constant)
        rng = np.random.default_rng(config.seed)
        rows = []
        for norm in norms:
            points = np.column_stack([
                norm.z1 + 0.1 * norm.delta ** (1.0 / spec.eta) * rng.uniform(-1, 1, 100),
                config.a * (rng.uniform(-1, 1, 100) + 1j * rng.uniform(-1, 1, 100)) / 2,
                config.a * (rng.uniform(-1, 1, 100) + 1j * rng.uniform(-1, 1, 100)) / 2,
            ])
            rows.append({
                'delta': norm.delta, 'e_delta': norm.e_delta, 'e_delta_constant': abs(norm.e_delta) / norm.delta,
                'tau': norm.tau, 'tau_constant': norm.tau_constant, 'A': norm.A, 'c': norm.c,
                'shape_residual': norm.shape_residual, 'unit_error': norm.unit_error, 'shape_ok': norm.shape_ok,
                'chain_rule_residual': chain_rule_residual(r, norm, points),
            })
        fit_kwargs = dict(slope_tolerance=config.slope_tolerance, r2_min=config.r2_min,
                          band_limit=config.fit_band_constant)
        r_rows = verify_r_derivative_scaling(r, diagram, choice, config.delta_sweep, config.e_delta_constant,
                                             **fit_kwargs)
        rho_rows = verify_rho_derivative_scaling(norms, diagram, **fit_kwargs)
        monotone = tau_monotone(norms)
        passed = (all(row.passed for row in r_rows + rho_rows) and monotone
                  and all(row['shape_ok'] and row['chain_rule_residual'] < CHAIN_RULE_TOLERANCE for row in rows))
        report['slice_analysis'] = {
            'direction': {'theta0': choice.theta0, 'd': choice.d, 'margin': choice.margin,
                          'min_modulus_profile': choice.min_modulus_profile},
            'sweep': rows,
            'r_derivative_fits': fit_rows(r_rows),
            'rho_derivative_fits': fit_rows(rho_rows),
            'tau_monotone': monotone,
            'passed': passed,
        }
        report['slice_analysis'] = to_jsonable(report['slice_analysis'])
        report['notes'].append('the lower bound on mixed derivatives is checked as a two-sided fit, '
                               'not through the displayed inequality with a difference on both sides')
        state.update(choice=choice, norms=norms)

    def _stage_domain_geometry(self, spec: DomainSpec, state: Dict, report: Dict):
        config = spec.config
        r, diagram, choice = state['coords'].r, state['diagram'], state['choice']
        norms = normalize_sweep(r, choice, config.containment_sweep, diagram.m, spec.eta, config.e_delta_constant)
        containment, halved, domination, polydiscs = [], [], [], []
        for norm in norms:
            full = verify_containment(norm, config.c, config.epsilon0, config.a, config.samples, config.seed,
                                      config.containment_constant)
            half = float(np.max(slab_variation(norm, config.c / 2, config.epsilon0, config.a, config.samples,
                                               config.seed)[1]))
            containment.append(full)
            halved.append({'delta': norm.delta, 'sup_ratio': half,
                           'linear_ratio': half / full.sup_ratio if full.sup_ratio > 0 else None})
            domination.append(verify_Jnu_dominated(norm, diagram, config.a, config.samples, config.seed,
                                                   config.jnu_constant))
            polydiscs.append(verify_polydisc_containment(norm, config.a1, config.epsilon0, config.b,
                                                         min(config.samples, 10000), config.seed))
        interpolation = verify_interpolation(diagram, config.samples, config.seed)
        slab_c = min(v.inclusion_c for v in containment)
        passed = (all(v.passed for v in containment) and all(v.passed for v in domination)
                  and all(v.passed for v in polydiscs) and interpolation.passed)
        report['domain_geometry'] = to_jsonable({
            'containment': containment,
            'slab_c': slab_c,
            'containment_half_c': halved,
            'interpolation': interpolation,
            'jnu_domination': domination,
            'polydisc': polydiscs,
            'passed': passed,
        })
        state['slab_c'] = slab_c

    def _stage_holder_pipeline(self, spec: DomainSpec, state: Dict, report: Dict):
        config = spec.config
        norms = state['norms']
        factory = witness_factory(config.witness)
        witnesses = [factory(norm.delta, config.b, config.epsilon0) for norm in norms]
        checks = [check_witness(w, norm, config.a, config.epsilon0, min(config.samples, 20000), config.seed)
                  for w, norm in zip(witnesses, norms)]
        section = {'witness': config.witness, 'witness_checks': to_jsonable(checks)}
        report['holder'] = section
        if not all(check.passed for check in checks):
            section['passed'] = False
            raise PrerequisiteError(f"Witness {config.witness!r} fails its declared bound or holomorphy",
                                    {'checks': section['witness_checks']})
        slab_c = state.get('slab_c', config.c)
        forms = [build_test_form(w, norm, config.a, slab_c) for w, norm in zip(witnesses, norms)]
        beta = beta_sup_norm_fit(forms, config.samples, config.seed, config.beta_slope_tolerance,
                                 config.fit_band_constant, config.r2_min)
        gap = witness_gap_check(witnesses, config.b)
        H = [circle_average_H(w.on_points, norm, config.b, slab_c, config.quadrature_nodes)
             for w, norm in zip(witnesses, norms)]
        norm = norms[-1]
        center = (norm.z1, 0, -config.b * norm.delta / 2)
        mean_value = mean_value_self_test(lambda pts: pts[:, 0] ** 3 - 2 * pts[:, 0] * pts[:, 2], center,
                                          0.8 * config.c * norm.delta ** (1.0 / spec.eta), config.quadrature_nodes)
        section.update(to_jsonable({
            'slab_c': slab_c,
            'beta_fit': beta.row,
            'beta_passed': beta.passed,
            'beta_sups': beta.sups,
            'beta_worst_points': beta.worst_points,
            'beta_soundness_error': beta.soundness_error,
            'cutoff_derivative_bound': beta.derivative_bound,
            'witness_gap': gap,
            'H_delta': H,
            'mean_value_residual': mean_value,
        }))
        section['passed'] = beta.passed and gap.passed and mean_value < MEAN_VALUE_TOLERANCE
        verdict = conclude(spec.eta, beta, gap, H)
        report['verdict'] = to_jsonable(verdict)

    def _verify_witness(self, spec: DomainSpec, state: Dict, report: Dict, witness: HolomorphicWitness):
        """Bound, holomorphy, gap and derivative floor of one witness at its own delta"""
        config = spec.config
        r, diagram = state['coords'].r, state['diagram']
        delta = witness.delta
        norm = normalize_sweep(r, state['choice'], [delta], diagram.m, spec.eta, config.e_delta_constant)[0]
        check = check_witness(witness, norm, config.a, config.epsilon0, min(config.samples, 20000), config.seed)
        gap = float(abs(witness(0, -config.b * delta) - witness(0, -config.b * delta / 2)))
        derivative = abs(witness.dz3(0, -config.b * delta / 2))
        floor = witness.declared_derivative_floor(delta)
        logging.info(f"Witness {witness.name}: gap {gap:.6g}, derivative {derivative:.4e} (floor {floor:.4e})")
        report['holder'] = to_jsonable({
            'witness': witness.name,
            'witness_checks': [check],
            'gap': gap,
            'derivative': derivative,
            'derivative_floor': floor,
        })
        report['holder']['passed'] = check.passed and gap > 0 and derivative >= floor

    # storage

    def _report_path(self, report_id: str) -> str:
        return os.path.join(self.reports_dir, f"{secure_filename(report_id)}.json")

    def save_report(self, report: Dict) -> str:
        """Write the report locally and archive it to S3 when configured"""
        body = dumps(report)
        os.makedirs(self.reports_dir, exist_ok=True)
        path = self._report_path(report['id'])
        with open(path, 'w', encoding='utf-8') as f:
            f.write(body)
        logging.info(f"Saved report to {path}")
        if self.s3:
            try:
                self.s3.upload_report(report['id'], body)
            except Exception as e:
                logging.error(f"Error archiving report {report['id']}: {str(e)}")
                logging.info("Report kept in the local directory only")
        return report['id']

    def get_report(self, report_id: str) -> Optional[Dict]:
        """Load a report from the local directory, falling back to S3"""
        path = self._report_path(report_id)
        if os.path.exists(path):
            try:
                with open(path, 'r', encoding='utf-8') as f:
                    return json.load(f)
            except json.JSONDecodeError as e:
                logging.error(f"Error reading report {report_id}: {str(e)}")
        if self.s3:
            try:
                body = self.s3.download_report(secure_filename(report_id))
                return json.loads(body) if body else None
            except Exception as e:
                logging.error(f"Error fetching report {report_id} from S3: {str(e)}")
        return None

    def list_reports(self) -> List[Dict]:
        """Summaries of every stored report"""
        ids = set()
        if os.path.isdir(self.reports_dir):
            ids.update(name[:-len('.json')] for name in os.listdir(self.reports_dir) if name.endswith('.json'))
        if self.s3:
            try:
                ids.update(self.s3.list_reports())
            except Exception as e:
                logging.error(f"Error listing S3 reports: {str(e)}")
        records = []
        for report_id in sorted(ids):
            report = self.get_report(report_id)
            if report:
                records.append(ReportRecord.create(report).to_dict())
        return records

    def delete_report(self, report_id: str) -> bool:
        """Remove a report locally and from S3"""
        path = self._report_path(report_id)
        found = os.path.exists(path)
        if found:
            os.remove(path)
        if self.s3:
            try:
                self.s3.delete_report(secure_filename(report_id))
                found = True
            except Exception as e:
                logging.error(f"Error deleting report {report_id} from S3: {str(e)}")
        return found
