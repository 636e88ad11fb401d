import pytest
from app import app as flask_app, analysis_system
from holderbound.config import AnalysisConfig
from models import DomainSpec


@pytest.fixture
def app(tmp_path):
    flask_app.config['TESTING'] = True
    analysis_system.reports_dir = str(tmp_path / 'reports')
    analysis_system.s3 = None
    return flask_app


@pytest.fixture
def fast_config():
    return AnalysisConfig(samples=4000)


@pytest.fixture
def e1_spec(fast_config):
    return DomainSpec.from_corpus('e1_k2', fast_config)


@pytest.fixture
def e2_spec(fast_config):
    return DomainSpec.from_corpus('e2', fast_config)
