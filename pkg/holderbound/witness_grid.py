"""
Tabulated holomorphic witnesses.

File layout::

    # holderbound witness grid
    delta = 1e-4
    bound = 1.375
    derivative_floor = 0.3333333333333333
    zeta2_re = -0.01 0.01 5
    zeta2_im = -0.01 0.01 5
    zeta3_re = -0.0004 0.0004 9
    zeta3_im = -0.0004 0.0004 9
    ---
    <re> <im>

One sample line per node in C order over (zeta2_re, zeta2_im, zeta3_re, zeta3_im).
The declared floor for |df/dzeta3| at scale delta is derivative_floor / delta.
"""
import logging
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import ParseError
from .holder_pipeline import HolomorphicWitness

HEADER = '# holderbound witness grid'
AXES = ('zeta2_re', 'zeta2_im', 'zeta3_re', 'zeta3_im')
SCALARS = ('delta', 'bound', 'derivative_floor')
SEPARATOR = '---'

GridAxes = Dict[str, Tuple[float, float, int]]


def _axis(spec: Tuple[float, float, int]) -> np.ndarray:
    low, high, count = spec
    return np.linspace(low, high, count)


def write_witness_grid(path: Union[str, Path], witness: HolomorphicWitness, axes: GridAxes) -> Path:
    """Tabulate a witness on the rectangular grid given by axes"""
    path = Path(path)
    grids = [_axis(axes[name]) for name in AXES]
    mesh = np.meshgrid(*grids, indexing='ij')
    zeta2 = mesh[0] + 1j * mesh[1]
    zeta3 = mesh[2] + 1j * mesh[3]
    values = witness(zeta2.ravel(), zeta3.ravel())
    floor = witness.declared_derivative_floor(witness.delta) * witness.delta
    lines = [HEADER, f"delta = {witness.delta!r}", f"bound = {witness.declared_bound!r}",
             f"derivative_floor = {floor!r}"]
    for name in AXES:
        low, high, count = axes[name]
        lines.append(f"{name} = {float(low)!r} {float(high)!r} {int(count)}")
    lines.append(SEPARATOR)
    lines.extend(f"{v.real!r} {v.imag!r}" for v in values)
    path.write_text('\n'.join(lines) + '\n')
    logging.info(f"Wrote witness grid {path} ({values.size} nodes)")
    return path


def _parse_header(lines) -> Tuple[Dict[str, float], GridAxes, int]:
    if not lines or lines[0].strip() != HEADER:
        raise ParseError(f"Witness grid must start with {HEADER!r}", 1, 1)
    scalars: Dict[str, float] = {}
    axes: GridAxes = {}
    for number, line in enumerate(lines[1:], start=2):
        text = line.strip()
        if text == SEPARATOR:
            missing = [k for k in SCALARS + AXES if k not in scalars and k not in axes]
            if missing:
                raise ParseError(f"Missing header keys: {', '.join(missing)}", number, 1)
            return scalars, axes, number
        if not text or text.startswith('#'):
            continue
        key, sep, value = text.partition('=')
        key = key.strip()
        if not sep:
            raise ParseError(f"Expected 'key = value', got {text!r}", number, 1)
        try:
            if key in SCALARS:
                scalars[key] = float(value)
            elif key in AXES:
                low, high, count = value.split()
                axes[key] = (float(low), float(high), int(count))
            else:
                raise ParseError(f"Unknown header key {key!r}", number, 1)
        except ValueError as e:
            raise ParseError(f"Bad value for {key}: {str(e)}", number, line.index('=') + 2) from e
    raise ParseError(f"Missing {SEPARATOR!r} before the samples", len(lines), 1)


def load_witness_grid(path: Union[str, Path]) -> HolomorphicWitness:
    """Read a grid file into a witness interpolating linearly between nodes"""
    path = Path(path)
    lines = path.read_text().splitlines()
    scalars, axes, separator_line = _parse_header(lines)
    grids = [_axis(axes[name]) for name in AXES]
    shape = tuple(len(g) for g in grids)
    body = [line for line in lines[separator_line:] if line.strip()]
    try:
        samples = np.loadtxt(body, ndmin=2)
    except ValueError as e:
        raise ParseError(f"Bad sample line: {str(e)}", separator_line + 1, 1) from e
    if samples.shape != (int(np.prod(shape)), 2):
        raise ParseError(f"Expected {int(np.prod(shape))} samples of two numbers, got {samples.shape}",
                         separator_line + 1, 1)
    real = RegularGridInterpolator(grids, samples[:, 0].reshape(shape), bounds_error=False, fill_value=None)
    imag = RegularGridInterpolator(grids, samples[:, 1].reshape(shape), bounds_error=False, fill_value=None)

    def evaluator(zeta2: np.ndarray, zeta3: np.ndarray) -> np.ndarray:
        zeta2, zeta3 = np.broadcast_arrays(np.asarray(zeta2, dtype=complex), np.asarray(zeta3, dtype=complex))
        nodes = np.stack([zeta2.real.ravel(), zeta2.imag.ravel(), zeta3.real.ravel(), zeta3.imag.ravel()], axis=1)
        return (real(nodes) + 1j * imag(nodes)).reshape(zeta2.shape)

    extent = min(min(abs(low), abs(high)) for low, high, _ in axes.values())
    floor = scalars['derivative_floor']
    logging.info(f"Loaded witness grid {path} with shape {shape}")
    return HolomorphicWitness(f"grid:{path.name}", scalars['delta'], evaluator, scalars['bound'],
                              lambda d: floor / d, extent)
