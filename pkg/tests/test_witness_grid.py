import numpy as np
import pytest

from holderbound.errors import ParseError
from holderbound.holder_pipeline import demo_witness, linear_witness
from holderbound.witness_grid import HEADER, load_witness_grid, write_witness_grid

AXES = {
    'zeta2_re': (-0.01, 0.01, 3),
    'zeta2_im': (-0.01, 0.01, 3),
    'zeta3_re': (-0.0004, 0.0004, 5),
    'zeta3_im': (-0.0004, 0.0004, 5),
}


def test_linear_witness_interpolates_exactly(tmp_path):
    """Multilinear interpolation reproduces a linear function between nodes"""
    path = write_witness_grid(tmp_path / 'linear.grid', linear_witness(1e-4), AXES)
    witness = load_witness_grid(path)
    zeta3 = np.array([1.3e-4 - 0.7e-4j, -2.1e-4 + 0.2e-4j])
    assert np.allclose(witness(np.zeros(2), zeta3), zeta3, atol=1e-15)
    assert witness.delta == 1e-4
    assert witness.declared_bound == 1.0
    assert witness.declared_derivative_floor(1e-4) == 0
    assert witness.extent == pytest.approx(0.0004)
    assert witness.name == 'grid:linear.grid'


def test_floor_scales_with_delta(tmp_path):
    """The stored floor is multiplied back by 1/delta"""
    path = write_witness_grid(tmp_path / 'demo.grid', demo_witness(1e-4), AXES)
    witness = load_witness_grid(path)
    assert witness.declared_derivative_floor(1e-4) == pytest.approx(1 / 3e-4)


def test_sample_count(tmp_path):
    """One sample line per node"""
    path = write_witness_grid(tmp_path / 'linear.grid', linear_witness(1e-4), AXES)
    body = path.read_text().split('---\n')[1].strip().splitlines()
    assert len(body) == 3 * 3 * 5 * 5


def test_bad_header(tmp_path):
    """The first line must identify the file"""
    path = tmp_path / 'bad.grid'
    path.write_text('not a grid\n')
    with pytest.raises(ParseError, match='must start'):
        load_witness_grid(path)


def test_missing_separator(tmp_path):
    """Samples must follow a separator line"""
    path = tmp_path / 'bad.grid'
    path.write_text(f"{HEADER}\ndelta = 1e-4\n")
    with pytest.raises(ParseError, match='before the samples'):
        load_witness_grid(path)


def test_missing_keys(tmp_path):
    """Every scalar and axis must be declared"""
    path = tmp_path / 'bad.grid'
    path.write_text(f"{HEADER}\ndelta = 1e-4\n---\n0 0\n")
    with pytest.raises(ParseError, match='Missing header keys'):
        load_witness_grid(path)


def test_wrong_sample_count(tmp_path):
    """Truncated sample blocks are rejected"""
    path = write_witness_grid(tmp_path / 'linear.grid', linear_witness(1e-4), AXES)
    lines = path.read_text().splitlines()
    path.write_text('\n'.join(lines[:-1]) + '\n')
    with pytest.raises(ParseError, match='Expected 225 samples'):
        load_witness_grid(path)


def test_unknown_header_key(tmp_path):
    """Stray keys are reported with their line"""
    path = tmp_path / 'bad.grid'
    path.write_text(f"{HEADER}\ncolour = blue\n---\n")
    with pytest.raises(ParseError) as excinfo:
        load_witness_grid(path)
    assert excinfo.value.line == 2
