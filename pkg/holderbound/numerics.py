"""Sampling, log-log fitting and finite-difference helpers shared by the numeric stages."""
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress, qmc

from .errors import DegenerateFitError

DEGENERATE_FLOOR = 1e-300
MIN_FIT_POINTS = 5


def geometric_sweep(spec: str) -> Tuple[float, ...]:
    """'1e-2:1e-6:9' -> nine geometric points from 1e-2 down to 1e-6; also accepts a comma list"""
    if ':' in spec:
        start, stop, count = spec.split(':')
        values = np.geomspace(float(start), float(stop), int(count))
    else:
        values = np.array([float(v) for v in spec.split(',') if v.strip()])
    if not len(values) or np.any(values <= 0):
        raise ValueError(f"Invalid delta sweep {spec!r}")
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    intercept: float
    r_squared: float
    points: int


def fit_power_law(xs: Sequence[float], ys: Sequence[float]) -> PowerLawFit:
    """Least squares fit of log10(y) = slope*log10(x) + intercept"""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if len(x) < MIN_FIT_POINTS:
        raise DegenerateFitError(f"Need at least {MIN_FIT_POINTS} points for a fit, got {len(x)}")
    if np.any(y <= DEGENERATE_FLOOR):
        raise DegenerateFitError('Values vanish; no power law to fit', {'values': [float(v) for v in y]})
    logx, logy = np.log10(x), np.log10(y)
    result = linregress(logx, logy)
    residual = logy - (result.slope * logx + result.intercept)
    ss_res = float(np.sum(residual ** 2))
    ss_tot = float(np.sum((logy - logy.mean()) ** 2))
    if ss_tot <= 1e-24:
        r_squared = 1.0 if ss_res <= 1e-24 else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    return PowerLawFit(float(result.slope), float(result.intercept), r_squared, len(x))


@dataclass(frozen=True)
class FitRow:
    """One row of a scaling table: value ~ delta^target"""

    label: str
    kind: str
    target: float
    slope: Optional[float]
    r_squared: Optional[float]
    band: Tuple[float, float]
    passed: bool
    degenerate: bool
    deltas: Tuple[float, ...]
    values: Tuple[float, ...]


def fit_row(label: str, deltas: Sequence[float], values: Sequence[float], target: float, kind: str = 'two_sided',
            slope_tolerance: float = 0.05, r2_min: float = 0.99, band_limit: float = 10.0,
            relative_band: bool = False) -> FitRow:
    """Fit a scaling row; 'upper' rows check slope >= target - tol, 'two_sided' rows check the full band.

    With relative_band the constant only has to be stable (max/min <= band_limit), not close to 1.
    """
    if kind not in ('upper', 'two_sided'):
        raise ValueError(f"Unknown fit kind {kind!r}")
    deltas = tuple(float(d) for d in deltas)
    values = tuple(float(v) for v in values)
    if len(deltas) < MIN_FIT_POINTS:
        raise DegenerateFitError(f"Need at least {MIN_FIT_POINTS} sweep points, got {len(deltas)}")
    if max(values) < DEGENERATE_FLOOR:
        logging.debug(f"Fit row {label} is degenerate")
        return FitRow(label, kind, target, None, None, (0.0, 0.0), kind == 'upper', True, deltas, values)
    if min(values) < DEGENERATE_FLOOR:
        # mixed zero and nonzero values: fit only the nonzero ones when enough remain
        keep = [(d, v) for d, v in zip(deltas, values) if v >= DEGENERATE_FLOOR]
        if len(keep) < MIN_FIT_POINTS:
            return FitRow(label, kind, target, None, None, (0.0, 0.0), kind == 'upper', True, deltas, values)
        fit = fit_power_law(*zip(*keep))
    else:
        fit = fit_power_law(deltas, values)
    ratios = [v / d ** target for d, v in zip(deltas, values)]
    band = (min(ratios), max(ratios))
    if kind == 'upper':
        passed = fit.slope >= target - slope_tolerance
    else:
        if relative_band:
            band_ok = band[1] <= band_limit * band[0]
        else:
            band_ok = band[0] >= 1 / band_limit and band[1] <= band_limit
        passed = abs(fit.slope - target) <= slope_tolerance and fit.r_squared >= r2_min and band_ok
    return FitRow(label, kind, target, fit.slope, fit.r_squared, band, passed, False, deltas, values)


class HaltonSampler:
    """Scrambled Halton points; the seed fixes the scramble so runs are reproducible"""

    def __init__(self, dimension: int, seed: int = 0):
        self.dimension = dimension
        self.seed = seed
        self._engine = qmc.Halton(d=dimension, scramble=True, seed=seed)

    def reset(self) -> 'HaltonSampler':
        self._engine = qmc.Halton(d=self.dimension, scramble=True, seed=self.seed)
        return self

    def random(self, n: int) -> np.ndarray:
        return self._engine.random(n)


def disc_points(u: np.ndarray, v: np.ndarray, radius, center=0j) -> np.ndarray:
    """Area-uniform map of the unit square onto a disc"""
    return center + radius * np.sqrt(u) * np.exp(2j * np.pi * v)


def log_disc_points(u: np.ndarray, v: np.ndarray, r_min: float, r_max: float, center=0j) -> np.ndarray:
    """Radii log-uniform in [r_min, r_max]; concentrates points near the centre at every scale"""
    radius = r_min * (r_max / r_min) ** u
    return center + radius * np.exp(2j * np.pi * v)


def dbar_finite_difference(func: Callable[[np.ndarray], np.ndarray], points: np.ndarray, index: int,
                           h: float) -> np.ndarray:
    """Central difference of d/dzbar_index = (d/dx + i d/dy) / 2"""
    return _wirtinger_fd(func, points, index, h, 1j)


def d_finite_difference(func: Callable[[np.ndarray], np.ndarray], points: np.ndarray, index: int,
                        h: float) -> np.ndarray:
    """Central difference of d/dz_index = (d/dx - i d/dy) / 2"""
    return _wirtinger_fd(func, points, index, h, -1j)


def _wirtinger_fd(func, points, index, h, sign):
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    step = np.zeros(pts.shape[1], dtype=complex)
    step[index] = h
    dx = (func(pts + step) - func(pts - step)) / (2 * h)
    dy = (func(pts + 1j * step) - func(pts - 1j * step)) / (2 * h)
    return 0.5 * (dx + sign * dy)


def polydisc_grid(points_per_dim: int = 9, radius: float = 0.5, z3: float = 0.0) -> np.ndarray:
    """Grid over |z1|, |z2| <= radius: points_per_dim per real direction, z3 fixed"""
    axis = np.linspace(-radius, radius, points_per_dim)
    x, y = np.meshgrid(axis, axis, indexing='ij')
    disc = (x + 1j * y).ravel()
    disc = disc[np.abs(disc) <= radius * (1 + 1e-12)]
    z1, z2 = np.meshgrid(disc, disc, indexing='ij')
    return np.stack([z1.ravel(), z2.ravel(), np.full(z1.size, z3, dtype=complex)], axis=1)
