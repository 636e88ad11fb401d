"""Pushed-out slices, slab families and polydiscs, with sampled containment checks."""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import SamplingError
from .newton_diagram import NewtonDiagram
from .numerics import HaltonSampler, disc_points, log_disc_points
from .polynomial_core import evaluate_many
from .slice_analysis import SliceNormalization

Point = Tuple[complex, complex, complex]


def j_delta(norm: SliceNormalization, zeta2, zeta3) -> np.ndarray:
    """(delta^2 + |zeta3|^2 + sum_k A_k^2 |zeta2|^(2k))^(1/2)"""
    zeta2 = np.abs(np.asarray(zeta2, dtype=complex))
    zeta3 = np.abs(np.asarray(zeta3, dtype=complex))
    total = norm.delta ** 2 + zeta3 ** 2
    for k, value in norm.A.items():
        total = total + value ** 2 * zeta2 ** (2 * k)
    return np.sqrt(total)


def _frozen(norm: SliceNormalization, points: np.ndarray) -> np.ndarray:
    pts = np.array(points, dtype=complex)
    pts[:, 0] = norm.z1
    return pts


def slice_value(norm: SliceNormalization, points: np.ndarray) -> np.ndarray:
    """rho(d delta^(1/eta), zeta'') at the zeta'' part of each point"""
    return evaluate_many(norm.rho_full, _frozen(norm, points)).real


@dataclass(frozen=True)
class PushedOutDomain:
    """{|zeta2|, |zeta3| < a : rho(d delta^(1/eta), zeta'') < epsilon0 J_delta(zeta'')}"""

    norm: SliceNormalization
    a: float
    epsilon0: float

    @property
    def delta(self) -> float:
        return self.norm.delta

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        in_box = (np.abs(pts[:, 1]) < self.a) & (np.abs(pts[:, 2]) < self.a)
        return in_box & (slice_value(self.norm, pts) < self.epsilon0 * j_delta(self.norm, pts[:, 1], pts[:, 2]))


@dataclass(frozen=True)
class FamilyDomain:
    """Slab |zeta1 - d delta^(1/eta)| < c delta^(1/eta) crossed with the true or the pushed-out slice"""

    norm: SliceNormalization
    c: float
    a: float
    epsilon0: Optional[float] = None

    def __post_init__(self):
        if not 0 <= self.c < 1:
            raise ValueError(f"slab factor c must lie in [0, 1), got {self.c}")

    @property
    def pushed_out(self) -> bool:
        return self.epsilon0 is not None

    @property
    def slab_radius(self) -> float:
        return self.c * self.norm.delta ** (1.0 / self.norm.eta)

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        in_slab = np.abs(pts[:, 0] - self.norm.z1) < self.slab_radius
        in_box = (np.abs(pts[:, 1]) < self.a) & (np.abs(pts[:, 2]) < self.a)
        if self.pushed_out:
            inside = PushedOutDomain(self.norm, self.a, self.epsilon0).contains(pts)
        else:
            inside = evaluate_many(self.norm.rho_full, pts).real < 0
        return in_slab & in_box & inside


@dataclass(frozen=True)
class Polydisc:
    center: Tuple[complex, complex]
    radii: Tuple[float, float]

    def __post_init__(self):
        if min(self.radii) <= 0:
            raise ValueError(f"polydisc radii must be positive, got {self.radii}")

    @classmethod
    def around(cls, norm: SliceNormalization, center: Tuple[complex, complex], a1: float) -> 'Polydisc':
        """P_a1(center): radii (tau(e~, a1 J), a1 J) with J = J_delta(center)"""
        scale = a1 * float(j_delta(norm, center[0], center[1]))
        return cls((complex(center[0]), complex(center[1])), (norm.tau_at(scale), scale))

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        return ((np.abs(pts[:, 1] - self.center[0]) < self.radii[0])
                & (np.abs(pts[:, 2] - self.center[1]) < self.radii[1]))


Domain = Union[PushedOutDomain, FamilyDomain, Polydisc]


def membership(domain: Domain, point) -> Union[bool, np.ndarray]:
    """Predicate evaluation for one point (bool) or an (n, 3) array of points"""
    pts = np.asarray(point, dtype=complex)
    result = domain.contains(np.atleast_2d(pts))
    return bool(result[0]) if pts.ndim == 1 else result


def sample_slab(norm: SliceNormalization, c: float, a: float, n: int, seed: int = 0) -> np.ndarray:
    """Slab points for zeta1, log-radial zeta2 and zeta3 down to tau/100 and delta/100"""
    u = HaltonSampler(6, seed).random(n)
    radius = c * norm.delta ** (1.0 / norm.eta)
    low2 = min(norm.tau / 100, a / 10) if math.isfinite(norm.tau) else a / 100
    low3 = min(norm.delta / 100, a / 10)
    pts = np.empty((n, 3), dtype=complex)
    pts[:, 0] = disc_points(u[:, 0], u[:, 1], radius, norm.z1)
    pts[:, 1] = log_disc_points(u[:, 2], u[:, 3], low2, a)
    pts[:, 2] = log_disc_points(u[:, 4], u[:, 5], low3, a)
    return pts


@dataclass(frozen=True)
class ContainmentVerdict:
    delta: float
    c: float
    sup_ratio: float
    constant: float
    threshold: float
    passed: bool
    worst_point: Point
    samples: int
    inclusion_c: float
    inclusion_sup_ratio: float
    violations: int
    wide_slab_violations: int


def slab_variation(norm: SliceNormalization, c: float, epsilon0: float, a: float, samples: int,
                   seed: int) -> Tuple[np.ndarray, np.ndarray, int]:
    """Points, |rho(d delta^(1/eta), .) - rho| / J_delta, and the count of rho < 0 points outside the pushed-out slice"""
    pts = sample_slab(norm, c, a, samples, seed)
    pts = pts[(np.abs(pts[:, 1]) < a) & (np.abs(pts[:, 2]) < a)]
    if not len(pts):
        raise SamplingError('Sampler produced no points in the slab', {'delta': norm.delta, 'c': c})
    moving = evaluate_many(norm.rho_full, pts).real
    frozen = slice_value(norm, pts)
    J = j_delta(norm, pts[:, 1], pts[:, 2])
    violations = int(np.count_nonzero((moving < 0) & ~(frozen < epsilon0 * J)))
    return pts, np.abs(frozen - moving) / J, violations


def inclusion_slab(norm: SliceNormalization, c: float, epsilon0: float, a: float = 0.25, samples: int = 100000,
                   seed: int = 0, max_shrinks: int = 30) -> Tuple[float, float, int]:
    """Shrink c until the slab sup is at most epsilon0 / 2; returns (c, sup, violations) for that slab"""
    _, ratio, violations = slab_variation(norm, c, epsilon0, a, samples, seed)
    sup = float(np.max(ratio))
    for _ in range(max_shrinks):
        if sup <= epsilon0 / 2:
            break
        c *= min(0.5, 0.9 * (epsilon0 / 2) / sup)
        _, ratio, violations = slab_variation(norm, c, epsilon0, a, samples, seed)
        sup = float(np.max(ratio))
    return c, sup, violations


def verify_containment(norm: SliceNormalization, c: float, epsilon0: float, a: float = 0.25,
                       samples: int = 100000, seed: int = 0, constant: float = 10.0,
                       max_shrinks: int = 30) -> ContainmentVerdict:
    """Slab variation of rho against J_delta, and the sampled inclusion of the true family in the pushed-out one

    The variation is measured on the slab of half-width c delta^(1/eta) and tracked as sup / (eta c).
    The inclusion is checked on the slab shrunk from c until its sup is at most epsilon0 / 2.
    """
    pts, ratio, wide_violations = slab_variation(norm, c, epsilon0, a, samples, seed)
    worst = int(np.argmax(ratio))
    sup = float(ratio[worst])
    tracked = sup / (norm.eta * c) if c > 0 else 0.0
    if sup <= epsilon0 / 2:
        inclusion_c, inclusion_sup, violations = c, sup, wide_violations
    else:
        inclusion_c, inclusion_sup, violations = inclusion_slab(norm, c, epsilon0, a, samples, seed, max_shrinks)
    settled = inclusion_sup <= epsilon0 / 2
    if violations or not settled:
        logging.error(f"Containment violated at {violations} sampled points (delta={norm.delta:.3e}, "
                      f"c={inclusion_c:.3e}, sup={inclusion_sup:.3e})")
    else:
        logging.info(f"Containment at delta={norm.delta:.3e}: constant {tracked:.4f}, "
                     f"inclusion slab c={inclusion_c:.3e}")
    passed = tracked <= constant and settled and violations == 0
    return ContainmentVerdict(norm.delta, c, sup, tracked, constant, passed, tuple(complex(z) for z in pts[worst]),
                              len(pts), inclusion_c, inclusion_sup, violations, wide_violations)


@dataclass(frozen=True)
class InterpolationVerdict:
    max_ratio: float
    worst_term: str
    worst_point: Tuple[float, float]
    terms: int
    passed: bool


def verify_interpolation(diagram: NewtonDiagram, samples: int = 100000, seed: int = 0,
                         tolerance: float = 1e-9) -> InterpolationVerdict:
    """|z1|^k |z2|^l <= |z1|^p_{nu-1} |z2|^q_{nu-1} + |z1|^p_nu |z2|^q_nu for every Gamma_L term on segment nu"""
    u = HaltonSampler(2, seed).random(samples)
    x = 1e-6 * (0.5 / 1e-6) ** u[:, 0]
    y = 1e-6 * (0.5 / 1e-6) ** u[:, 1]
    best, worst_term, worst_point, count = 0.0, '', (0.0, 0.0), 0
    for mono in diagram.gamma_L:
        k, l = mono.projection
        nu = next(nu for nu in range(1, diagram.N + 1) if diagram.on_segment((k, l), nu))
        (p0, q0), (p1, q1) = diagram.vertices[nu - 1], diagram.vertices[nu]
        ratio = x ** k * y ** l / (x ** p0 * y ** q0 + x ** p1 * y ** q1)
        i = int(np.argmax(ratio))
        count += 1
        if ratio[i] > best:
            best, worst_term, worst_point = float(ratio[i]), str(mono), (float(x[i]), float(y[i]))
    return InterpolationVerdict(best, worst_term, worst_point, count, best <= 1 + tolerance)


@dataclass(frozen=True)
class DominationVerdict:
    delta: float
    sup_ratio: float
    constant: float
    worst_point: Tuple[complex, complex]
    passed: bool


def j_nu(norm: SliceNormalization, diagram: NewtonDiagram, zeta2, zeta3) -> np.ndarray:
    """delta + |zeta3| + sum_nu delta^(p_nu/eta) |zeta2|^q_nu"""
    zeta2 = np.abs(np.asarray(zeta2, dtype=complex))
    total = norm.delta + np.abs(np.asarray(zeta3, dtype=complex))
    for p, q in diagram.vertices[1:]:
        total = total + norm.delta ** (p / diagram.eta) * zeta2 ** q
    return total


def verify_Jnu_dominated(norm: SliceNormalization, diagram: NewtonDiagram, a: float = 0.25,
                         samples: int = 100000, seed: int = 0, constant: float = 10.0) -> DominationVerdict:
    """sup J^nu_delta / J_delta over the box |zeta2|, |zeta3| < a"""
    pts = sample_slab(norm, 0.0, a, samples, seed)
    pts = np.vstack([np.array([[norm.z1, 0, 0]], dtype=complex), pts])
    ratio = j_nu(norm, diagram, pts[:, 1], pts[:, 2]) / j_delta(norm, pts[:, 1], pts[:, 2])
    worst = int(np.argmax(ratio))
    sup = float(ratio[worst])
    return DominationVerdict(norm.delta, sup, constant, (complex(pts[worst, 1]), complex(pts[worst, 2])),
                             sup <= constant)


@dataclass(frozen=True)
class PolydiscVerdict:
    delta: float
    radii: Tuple[float, float]
    max_ratio: float
    violations: int
    samples: int
    passed: bool


def verify_polydisc_containment(norm: SliceNormalization, a1: float, epsilon0: float, b: float,
                                samples: int = 10000, seed: int = 0) -> PolydiscVerdict:
    """P_a1 around the witness point (0, -b delta/2) stays inside {rho < epsilon0 J_delta}"""
    disc = Polydisc.around(norm, (0j, -b * norm.delta / 2), a1)
    u = HaltonSampler(4, seed).random(samples)
    pts = np.empty((samples, 3), dtype=complex)
    pts[:, 0] = norm.z1
    pts[:, 1] = disc_points(u[:, 0], u[:, 1], disc.radii[0], disc.center[0])
    pts[:, 2] = disc_points(u[:, 2], u[:, 3], disc.radii[1], disc.center[1])
    values = slice_value(norm, pts)
    allowed = epsilon0 * j_delta(norm, pts[:, 1], pts[:, 2])
    violations = int(np.count_nonzero(values >= allowed))
    return PolydiscVerdict(norm.delta, disc.radii, float(np.max(values / allowed)), violations, samples,
                           violations == 0)


def sample_pushed_out(norm: SliceNormalization, a: float, epsilon0: float, samples: int,
                      seed: int = 0) -> np.ndarray:
    """Scale-adapted points of the pushed-out slice"""
    pts = sample_slab(norm, 0.0, a, samples, seed)
    inside = pts[PushedOutDomain(norm, a, epsilon0).contains(pts)]
    if not len(inside):
        raise SamplingError('No sampled point lies in the pushed-out domain', {'delta': norm.delta})
    return inside
