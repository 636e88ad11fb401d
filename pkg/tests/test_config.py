import pytest

from holderbound.config import AnalysisConfig, from_environment, from_file, load_config
from holderbound.errors import ConfigError


def test_defaults():
    """Default sweep has nine points from 1e-2 to 1e-6"""
    config = AnalysisConfig()
    assert len(config.delta_sweep) == 9
    assert config.delta_sweep[0] == pytest.approx(1e-2)
    assert config.delta_sweep[-1] == pytest.approx(1e-6)
    assert config.containment_sweep == (1e-3, 1e-4, 1e-5)
    assert config.witness == 'demo'


def test_overrides_coerce_strings():
    """String values are read as each field's type"""
    config = AnalysisConfig().with_overrides({'samples': '1e4', 'c': '0.2', 'SEED': '7', 'witness': 'linear'})
    assert config.samples == 10000
    assert config.c == 0.2
    assert config.seed == 7
    assert config.witness == 'linear'


def test_none_overrides_skipped():
    """Unset CLI flags do not replace values"""
    assert AnalysisConfig().with_overrides({'samples': None}).samples == 100000


def test_unknown_key():
    """Typos are errors, not silently ignored"""
    with pytest.raises(ConfigError, match='Unknown configuration key'):
        AnalysisConfig().with_overrides({'sample': 10})


def test_bad_value():
    """Unparsable values name the key"""
    with pytest.raises(ConfigError, match='samples'):
        AnalysisConfig().with_overrides({'samples': 'many'})


@pytest.mark.parametrize('overrides', [{'b': 2.0}, {'c': 1.0}, {'a': 0}, {'deltas': '1e-3,0'},
                                       {'samples': 0}])
def test_invalid_ranges(overrides):
    """Out-of-range values are rejected at construction"""
    with pytest.raises(ConfigError):
        AnalysisConfig().with_overrides(overrides)


def test_config_hash_tracks_values():
    """Equal configs hash equally, changed configs do not"""
    assert AnalysisConfig().config_hash() == AnalysisConfig().config_hash()
    assert AnalysisConfig().config_hash() != AnalysisConfig(seed=1).config_hash()


def test_from_file(tmp_path):
    """key = value files are read with dotenv"""
    path = tmp_path / 'holder.cfg'
    path.write_text('samples = 2000\n# comment\nepsilon0 = 0.2\n')
    config = from_file(str(path))
    assert config.samples == 2000
    assert config.epsilon0 == 0.2


def test_missing_file():
    """A missing config file is a configuration error"""
    with pytest.raises(ConfigError, match='not found'):
        from_file('/nonexistent/holder.cfg')


def test_environment_prefix():
    """HOLDER_<KEY> variables override, HOLDER_CONFIG is not a field"""
    config = from_environment(environ={'HOLDER_SEED': '3', 'HOLDER_CONFIG': 'x.cfg', 'OTHER': '1'})
    assert config.seed == 3


def test_precedence(tmp_path):
    """file < environment < explicit overrides"""
    path = tmp_path / 'holder.cfg'
    path.write_text('samples = 2000\nseed = 1\nc = 0.3\n')
    config = load_config(str(path), {'seed': 5}, environ={'HOLDER_SAMPLES': '3000', 'HOLDER_SEED': '4'})
    assert config.c == 0.3
    assert config.samples == 3000
    assert config.seed == 5
