import json

import pytest

from analysis_system import AnalysisSystem
from holderbound.config import AnalysisConfig
from holderbound.corpus import get_entry, names
from holderbound.holder_pipeline import linear_witness
from holderbound.report import REPORT_FIELDS, dumps
from models import DomainSpec


@pytest.fixture
def system(tmp_path):
    return AnalysisSystem(reports_dir=str(tmp_path / 'reports'))


def test_krantz_branch(system, fast_config):
    """The half-space has no mixed term and goes straight to the bound"""
    report = system.run_analysis(DomainSpec.from_corpus('half_space', fast_config))
    assert report['normal_form']['branch'] == 'krantz'
    assert report['verdict']['bound'] == '1/4'
    assert report['verdict']['branch'] == 'krantz'
    assert report['newton_diagram'] is None
    assert any('skipped stages' in note for note in report['notes'])
    assert report['passed']


def test_stage_error_is_reported(system, fast_config):
    """A curve of lower contact than eta fails the normal-form stage"""
    entry = get_entry('e1_k1')
    report = system.run_analysis(DomainSpec.create(entry.domain, entry.curve, 4, fast_config))
    assert report['status'] == 'error'
    assert report['failed_stage'] == 'normal_form'
    assert report['error']['message']
    assert not report['passed']
    assert set(REPORT_FIELDS) <= set(report)


def test_normal_form_only(system, e1_spec):
    """until stops after the requested stage"""
    report = system.run_analysis(e1_spec, until='normal_form')
    assert report['normal_form']['m'] == 2
    assert report['normal_form']['passed']
    assert report['newton_diagram'] is None
    assert report['verdict'] is None


def test_e2_diagram(system, e2_spec):
    """Three vertices, two segments and witnesses at every vertex"""
    report = system.run_analysis(e2_spec, until='newton_diagram')
    section = report['newton_diagram']
    assert section['vertices'] == [[10, 0], [4, 2], [0, 6]]
    assert section['N'] == 2
    assert all(w['found'] for w in section['mixed_witnesses'])
    assert report['psh']['passed']


def test_e1_full_run(system, e1_spec):
    """Every stage passes and the bound is 1/eta"""
    report = system.run_analysis(e1_spec)
    assert report['status'] == 'complete'
    assert report['slice_analysis']['tau_monotone']
    assert report['holder']['passed']
    assert report['verdict']['bound'] == '1/4'
    assert report['verdict']['conclusion'] == 'epsilon <= 1/4'


def test_reports_are_deterministic(system, e1_spec):
    """Same input and config give byte-identical reports"""
    first = dumps(system.run_analysis(e1_spec, until='slice_analysis'))
    second = dumps(system.run_analysis(e1_spec, until='slice_analysis'))
    assert first == second


def test_unknown_stage(system, e1_spec):
    """until must name a stage"""
    with pytest.raises(ValueError, match='Unknown stage'):
        system.run_analysis(e1_spec, until='everything')


def test_witness_needs_slices(system, e1_spec):
    """A tabulated witness cannot be checked before the slices exist"""
    with pytest.raises(ValueError, match='slice_analysis'):
        system.run_analysis(e1_spec, until='normal_form', witness=linear_witness(1e-4))


def test_witness_verification(system, e1_spec):
    """A linear witness is bounded and holomorphic but has no derivative floor to meet"""
    report = system.run_analysis(e1_spec, until='slice_analysis', witness=linear_witness(1e-4))
    holder = report['holder']
    assert holder['witness'] == 'linear'
    assert holder['witness_checks'][0]['passed']
    assert float(holder['gap']) == pytest.approx(0.5e-4)


def test_save_get_list_delete(system, fast_config):
    """Local storage round trip"""
    report = system.run_analysis(DomainSpec.from_corpus('half_space', fast_config))
    report_id = system.save_report(report)
    assert system.get_report(report_id) == json.loads(dumps(report))
    records = system.list_reports()
    assert [r['id'] for r in records] == [report_id]
    assert records[0]['bound'] == '1/4'
    assert system.delete_report(report_id)
    assert system.get_report(report_id) is None
    assert not system.delete_report(report_id)


def test_missing_report(system):
    """Unknown ids without S3 are None"""
    assert system.get_report('0123456789abcdef') is None
    assert system.list_reports() == []


class FailingStorage:
    def upload_report(self, report_id, body):
        raise RuntimeError('bucket unreachable')

    def download_report(self, report_id):
        raise RuntimeError('bucket unreachable')

    def list_reports(self):
        raise RuntimeError('bucket unreachable')

    def delete_report(self, report_id):
        raise RuntimeError('bucket unreachable')


def test_s3_failures_fall_back_to_local(system, fast_config):
    """Archive errors are logged and the local copy is still served"""
    system.s3 = FailingStorage()
    report = system.run_analysis(DomainSpec.from_corpus('half_space', fast_config))
    report_id = system.save_report(report)
    assert system.get_report(report_id)['id'] == report_id
    assert len(system.list_reports()) == 1
    assert system.delete_report(report_id)


@pytest.mark.parametrize('name', names())
def test_corpus_end_to_end(system, name):
    """Every corpus domain completes with the bound 1/eta"""
    entry = get_entry(name)
    report = system.run_analysis(DomainSpec.from_corpus(name, AnalysisConfig(samples=20000)))
    assert report['status'] == 'complete', report['error']
    assert report['passed']
    assert report['verdict']['bound'] == f"1/{entry.eta}"
    if report['normal_form']['branch'] == 'newton_diagram':
        assert report['normal_form']['certificate']['passed']
        assert report['psh']['passed']
        assert all(float(check['min_eigenvalue']) >= -1e-9 for check in report['psh']['checks'])
        assert report['holder']['beta_passed']


@pytest.mark.parametrize('name', [name for name in names() if name != 'half_space'])
def test_corpus_containment(system, name):
    """Tracked constant at most 10 and no sampled inclusion failures at every containment delta"""
    report = system.run_analysis(DomainSpec.from_corpus(name), until='domain_geometry')
    verdicts = report['domain_geometry']['containment']
    assert [float(v['delta']) for v in verdicts] == pytest.approx([1e-3, 1e-4, 1e-5])
    for verdict in verdicts:
        assert verdict['samples'] > 90000
        assert float(verdict['constant']) <= 10
        assert verdict['violations'] == 0
        assert float(verdict['inclusion_sup_ratio']) <= 0.05
        assert verdict['passed']
    assert float(report['domain_geometry']['slab_c']) < 0.1


def test_kohn_nirenberg_beta_growth(system):
    """The test-form sup norm grows like delta^(-1/8) on the shrunk slab"""
    report = system.run_analysis(DomainSpec.from_corpus('kohn_nirenberg', AnalysisConfig(samples=20000)))
    holder = report['holder']
    assert float(holder['slab_c']) < 0.1
    assert float(holder['beta_fit']['slope']) == pytest.approx(-1 / 8, abs=0.1)
    assert holder['beta_passed']
    assert report['verdict']['bound'] == '1/8'


@pytest.mark.parametrize('name', ['e2', 'kohn_nirenberg'])
def test_full_reports_are_deterministic(system, name, fast_config):
    """Repeated seeded full runs give byte-identical reports"""
    spec = DomainSpec.from_corpus(name, fast_config)
    assert dumps(system.run_analysis(spec)) == dumps(system.run_analysis(spec))
