"""
Analysis configuration.

Precedence, lowest first: dataclass defaults, a ``key = value`` file, HOLDER_<KEY>
environment variables, explicit overrides (CLI flags or request options).
"""
import hashlib
import json
import logging
import os
from dataclasses import asdict, dataclass, fields, replace
from typing import Dict, Mapping, Optional, Tuple

from dotenv import dotenv_values, load_dotenv

from .errors import ConfigError
from .numerics import geometric_sweep

ENV_PREFIX = 'HOLDER_'


@dataclass(frozen=True)
class AnalysisConfig:
    deltas: str = '1e-2:1e-6:9'
    containment_deltas: str = '1e-3,1e-4,1e-5'
    samples: int = 100000
    seed: int = 0
    jet_order: int = 64
    grid_points: int = 9
    grid_radius: float = 0.5
    psh_tolerance: float = 1e-9
    a: float = 0.25
    b: float = 1.0
    c: float = 0.1
    epsilon0: float = 0.1
    a1: float = 0.05
    slope_tolerance: float = 0.05
    beta_slope_tolerance: float = 0.1
    r2_min: float = 0.99
    fit_band_constant: float = 10.0
    theta_samples: int = 720
    shear_candidates: int = 50
    quadrature_nodes: int = 256
    containment_constant: float = 10.0
    e_delta_constant: float = 10.0
    jnu_constant: float = 10.0
    witness: str = 'demo'

    def __post_init__(self):
        for name in ('deltas', 'containment_deltas'):
            try:
                geometric_sweep(getattr(self, name))
            except ValueError as e:
                raise ConfigError(f"Invalid {name}: {str(e)}") from e
        if self.samples < 1 or self.quadrature_nodes < 2 or self.theta_samples < 8:
            raise ConfigError('samples, quadrature_nodes and theta_samples must be positive counts')
        if not 0 < self.b < 2:
            raise ConfigError(f"b must lie in (0, 2), got {self.b}")
        if not 0 <= self.c < 1:
            raise ConfigError(f"c must lie in [0, 1), got {self.c}")
        if min(self.a, self.epsilon0, self.a1) <= 0:
            raise ConfigError('a, epsilon0 and a1 must be positive')

    @property
    def delta_sweep(self) -> Tuple[float, ...]:
        return geometric_sweep(self.deltas)

    @property
    def containment_sweep(self) -> Tuple[float, ...]:
        return geometric_sweep(self.containment_deltas)

    def to_dict(self) -> Dict:
        return asdict(self)

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()

    def with_overrides(self, overrides: Mapping[str, object]) -> 'AnalysisConfig':
        """Apply overrides, coercing strings to each field's type; None values are skipped"""
        known = {f.name: f.type for f in fields(self)}
        changes = {}
        for key, value in overrides.items():
            if value is None:
                continue
            name = key.lower()
            if name not in known:
                raise ConfigError(f"Unknown configuration key {key!r}")
            changes[name] = _coerce(name, known[name], value)
        return replace(self, **changes)


def _coerce(name: str, kind, value):
    target = {'int': int, 'float': float, 'str': str}.get(getattr(kind, '__name__', kind), str)
    if isinstance(value, str):
        value = value.strip()
    try:
        if target is int and isinstance(value, str):
            return int(float(value)) if 'e' in value.lower() else int(value)
        return target(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Cannot read {name} = {value!r} as {target.__name__}") from e


def from_file(path: str, base: Optional[AnalysisConfig] = None) -> AnalysisConfig:
    if not os.path.exists(path):
        raise ConfigError(f"Config file {path} not found")
    values = dotenv_values(path)
    logging.info(f"Loaded {len(values)} settings from {path}")
    return (base or AnalysisConfig()).with_overrides(values)


def from_environment(base: Optional[AnalysisConfig] = None,
                     environ: Optional[Mapping[str, str]] = None) -> AnalysisConfig:
    environ = os.environ if environ is None else environ
    values = {key[len(ENV_PREFIX):]: value for key, value in environ.items()
              if key.startswith(ENV_PREFIX) and key != f"{ENV_PREFIX}CONFIG"}
    return (base or AnalysisConfig()).with_overrides(values)


def load_config(config_file: Optional[str] = None, overrides: Optional[Mapping[str, object]] = None,
                environ: Optional[Mapping[str, str]] = None) -> AnalysisConfig:
    """defaults -> config file -> HOLDER_* environment -> overrides"""
    if environ is None:
        load_dotenv()
    config = AnalysisConfig()
    if config_file:
        config = from_file(config_file, config)
    config = from_environment(config, environ)
    return config.with_overrides(overrides or {})
