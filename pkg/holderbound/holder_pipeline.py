"""
Exponent extraction: cutoff test forms, witness checks, the circle average H_delta
and the final bound epsilon <= 1/eta.

A holomorphic witness f(zeta2, zeta3) is supplied by name.  The test form

    beta = dbar( phi(|zeta1 - d delta^(1/eta)| / (c delta^(1/eta))) phi(|zeta2| / (a/2)) phi(|zeta3| / (a/2)) f )

has sup norm of order delta^(-1/eta) while |f(0, -b delta) - f(0, -b delta/2)| stays bounded
below; a Hoelder-epsilon solution operator with epsilon > 1/eta would contradict both.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .domain_geometry import sample_pushed_out
from .errors import DegenerateFitError, PrerequisiteError, SamplingError, StageError
from .numerics import (
    FitRow, HaltonSampler, d_finite_difference, dbar_finite_difference, fit_power_law, fit_row, log_disc_points,
)
from .polynomial_core import evaluate_many
from .slice_analysis import SliceNormalization

Evaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _smooth(x: np.ndarray) -> np.ndarray:
    positive = x > 0
    safe = np.where(positive, x, 1.0)
    return np.where(positive, np.exp(-1.0 / safe), 0.0)


def _smooth_prime(x: np.ndarray) -> np.ndarray:
    positive = x > 0
    safe = np.where(positive, x, 1.0)
    return np.where(positive, np.exp(-1.0 / safe) / safe ** 2, 0.0)


class CutoffProfile:
    """phi = 1 on [0, 1/2], 0 on [3/4, inf), built from the exp(-1/t) smooth step"""

    def __init__(self, inner: float = 0.5, outer: float = 0.75):
        if not 0 < inner < outer:
            raise ValueError(f"cutoff needs 0 < inner < outer, got {inner}, {outer}")
        self.inner = inner
        self.outer = outer
        self._bound: Optional[float] = None

    def _u(self, t) -> np.ndarray:
        return (np.asarray(t, dtype=float) - self.inner) / (self.outer - self.inner)

    def __call__(self, t) -> np.ndarray:
        u = self._u(t)
        a, b = _smooth(u), _smooth(1 - u)
        return 1.0 - a / (a + b)

    def derivative(self, t) -> np.ndarray:
        u = self._u(t)
        a, b = _smooth(u), _smooth(1 - u)
        da, db = _smooth_prime(u), _smooth_prime(1 - u)
        return -(da * b + a * db) / (a + b) ** 2 / (self.outer - self.inner)

    @property
    def derivative_bound(self) -> float:
        if self._bound is None:
            grid = np.linspace(self.inner, self.outer, 20001)
            self._bound = float(np.max(np.abs(self.derivative(grid))))
        return self._bound


@dataclass(frozen=True)
class HolomorphicWitness:
    name: str
    delta: float
    evaluator: Evaluator
    declared_bound: float
    declared_derivative_floor: Callable[[float], float]
    extent: float = math.inf

    def __call__(self, zeta2, zeta3) -> np.ndarray:
        zeta2 = np.asarray(zeta2, dtype=complex)
        zeta3 = np.asarray(zeta3, dtype=complex)
        return np.asarray(self.evaluator(zeta2, zeta3), dtype=complex) * np.ones(np.broadcast(zeta2, zeta3).shape)

    def on_points(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        return self(pts[:, 1], pts[:, 2])

    def dz3(self, zeta2: complex, zeta3: complex, h: Optional[float] = None) -> complex:
        step = h or 1e-4 * self.delta
        return complex(d_finite_difference(self.on_points, [[0, zeta2, zeta3]], 2, step)[0])


def demo_witness(delta: float, b: float = 1.0, epsilon0: float = 0.1) -> HolomorphicWitness:
    """f = delta / (zeta3 - delta): bounded on the pushed-out slice, |df/dzeta3(0, -b delta/2)| = 1/((1+b/2)^2 delta)"""
    if not 0 < b < 2:
        raise ValueError(f"b must lie in (0, 2), got {b}")
    return HolomorphicWitness('demo', delta, lambda z2, z3: delta / (z3 - delta),
                              (1 + epsilon0) / (1 - 2 * epsilon0), lambda d: 1.0 / (3.0 * d))


def constant_witness(delta: float, b: float = 1.0, epsilon0: float = 0.1) -> HolomorphicWitness:
    return HolomorphicWitness('constant', delta, lambda z2, z3: np.ones_like(z3), 1.0, lambda d: 0.0)


def linear_witness(delta: float, b: float = 1.0, epsilon0: float = 0.1) -> HolomorphicWitness:
    return HolomorphicWitness('linear', delta, lambda z2, z3: z3, 1.0, lambda d: 0.0)


WITNESSES: Dict[str, Callable[..., HolomorphicWitness]] = {
    'demo': demo_witness,
    'constant': constant_witness,
    'linear': linear_witness,
}


def witness_factory(name: str) -> Callable[..., HolomorphicWitness]:
    try:
        return WITNESSES[name]
    except KeyError:
        raise StageError(f"Unknown witness {name!r}; built-ins are {', '.join(WITNESSES)}",
                         stage='holder_pipeline')


@dataclass(frozen=True)
class WitnessCheck:
    delta: float
    max_modulus: float
    bound_ok: bool
    holomorphy_residual: float
    holomorphic_ok: bool
    samples: int

    @property
    def passed(self) -> bool:
        return self.bound_ok and self.holomorphic_ok


def check_witness(witness: HolomorphicWitness, norm: SliceNormalization, a: float, epsilon0: float,
                  samples: int = 10000, seed: int = 0, tolerance: float = 1e-6) -> WitnessCheck:
    """Sampled sup of |f| on the pushed-out slice and the relative Cauchy-Riemann residual"""
    reach = min(a, witness.extent)
    pts = sample_pushed_out(norm, reach, epsilon0, samples, seed)
    modulus = np.abs(witness.on_points(pts))
    dbar = np.zeros(len(pts))
    d = np.zeros(len(pts))
    for index, scale in ((1, max(norm.tau, norm.delta)), (2, norm.delta)):
        h = 1e-4 * min(scale, reach)
        dbar = np.maximum(dbar, np.abs(dbar_finite_difference(witness.on_points, pts, index, h)))
        d = np.maximum(d, np.abs(d_finite_difference(witness.on_points, pts, index, h)))
    residual = float(np.max(dbar) / (np.max(d) + 1e-300))
    top = float(np.max(modulus))
    return WitnessCheck(norm.delta, top, top <= witness.declared_bound * (1 + 1e-9), residual,
                        residual < tolerance, len(pts))


class TestForm:
    """The (0,1)-form beta = dbar(chi1 chi2 chi3 f) evaluated through the product rule"""

    __test__ = False

    def __init__(self, witness: HolomorphicWitness, norm: SliceNormalization, a: float, c: float,
                 cutoff: Optional[CutoffProfile] = None):
        self.witness = witness
        self.norm = norm
        self.a = a
        self.c = c
        self.cutoff = cutoff or CutoffProfile()
        self.centers = np.array([norm.z1, 0, 0], dtype=complex)
        self.scales = np.array([c * norm.delta ** (1.0 / norm.eta), a / 2, a / 2])

    @property
    def delta(self) -> float:
        return self.norm.delta

    def _parts(self, points: np.ndarray):
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        w = pts - self.centers
        modulus = np.abs(w)
        t = modulus / self.scales
        values = self.cutoff(t)
        slopes = self.cutoff.derivative(t) / self.scales
        direction = np.where(modulus > 0, w / (2 * np.where(modulus > 0, modulus, 1.0)), 0)
        return pts, values, slopes, direction

    def product(self, points: np.ndarray) -> np.ndarray:
        pts, values, _, _ = self._parts(points)
        return np.prod(values, axis=1) * self.witness.on_points(pts)

    def coefficients(self, points: np.ndarray) -> np.ndarray:
        """(n, 3) array of beta_j = f * dphi_j/dzbar_j * prod_{k != j} phi_k"""
        pts, values, slopes, direction = self._parts(points)
        f = self.witness.on_points(pts)
        beta = np.empty(pts.shape, dtype=complex)
        for j in range(3):
            others = np.prod(np.delete(values, j, axis=1), axis=1)
            beta[:, j] = f * slopes[:, j] * direction[:, j] * others
        return beta

    def norms(self, points: np.ndarray) -> np.ndarray:
        return np.linalg.norm(self.coefficients(points), axis=1)


def build_test_form(witness: HolomorphicWitness, norm: SliceNormalization, a: float, c: float,
                    cutoff: Optional[CutoffProfile] = None) -> TestForm:
    cutoff = cutoff or CutoffProfile()
    support = cutoff.outer * a / 2
    if witness.extent < support:
        raise StageError(f"Witness defined up to {witness.extent:.3e}, cutoff support reaches {support:.3e}",
                         {'extent': witness.extent, 'support': support}, stage='holder_pipeline')
    return TestForm(witness, norm, a, c, cutoff)


def shell_points(form: TestForm, samples: int, seed: int = 0) -> np.ndarray:
    """zeta1 in the cutoff transition shell, scale-adapted zeta'' inside the true domain"""
    u = HaltonSampler(6, seed).random(samples)
    norm, cutoff = form.norm, form.cutoff
    radius = form.scales[0] * (cutoff.inner + (cutoff.outer - cutoff.inner) * u[:, 0])
    reach = cutoff.outer * form.a / 2
    low2 = min(norm.tau / 100, reach / 10) if math.isfinite(norm.tau) else reach / 100
    pts = np.empty((samples, 3), dtype=complex)
    pts[:, 0] = norm.z1 + radius * np.exp(2j * np.pi * u[:, 1])
    pts[:, 1] = log_disc_points(u[:, 2], u[:, 3], low2, reach)
    pts[:, 2] = log_disc_points(u[:, 4], u[:, 5], min(norm.delta / 100, reach / 10), reach)
    inside = evaluate_many(norm.rho_full, pts).real < 0
    return pts[inside]


def beta_soundness(form: TestForm, points: np.ndarray) -> float:
    """max |beta - finite-difference dbar(product)| relative to max |beta|"""
    beta = form.coefficients(points)
    steps = (form.scales[0], min(max(form.norm.tau, form.norm.delta), form.scales[1]), form.norm.delta)
    error = 0.0
    for j, scale in enumerate(steps):
        numeric = dbar_finite_difference(form.product, points, j, 1e-6 * scale)
        error = max(error, float(np.max(np.abs(numeric - beta[:, j]))))
    return error / (float(np.max(np.abs(beta))) + 1e-300)


@dataclass(frozen=True)
class BetaFit:
    row: FitRow
    sups: Tuple[float, ...]
    worst_points: Tuple[Tuple[complex, complex, complex], ...]
    soundness_error: float
    derivative_bound: float

    @property
    def slope(self) -> Optional[float]:
        return self.row.slope

    @property
    def passed(self) -> bool:
        return self.row.passed and self.soundness_error < 1e-5


def beta_sup_norm_fit(forms: Sequence[TestForm], samples: int = 100000, seed: int = 0, tolerance: float = 0.1,
                      band_limit: float = 10.0, r2_min: float = 0.99, soundness_points: int = 10000) -> BetaFit:
    """Sampled ||beta||_inf over the transition shells, fitted against delta^(-1/eta)"""
    if not forms:
        raise SamplingError('No test forms to fit')
    eta = forms[0].norm.eta
    sups, worst, soundness = [], [], 0.0
    for form in forms:
        pts = shell_points(form, samples, seed)
        if not len(pts):
            raise SamplingError('No shell sample lies in the domain', {'delta': form.delta})
        values = form.norms(pts)
        i = int(np.argmax(values))
        sups.append(float(values[i]))
        worst.append(tuple(complex(z) for z in pts[i]))
        soundness = max(soundness, beta_soundness(form, pts[:soundness_points]))
        logging.debug(f"||beta|| ~ {values[i]:.4e} at delta={form.delta:.3e}")
    row = fit_row('||beta||_inf ~ delta^(-1/eta)', [f.delta for f in forms], sups, -1.0 / eta,
                  slope_tolerance=tolerance, r2_min=r2_min, band_limit=band_limit, relative_band=True)
    logging.info(f"beta sup-norm slope {row.slope} (target {-1.0 / eta:.4f}), soundness {soundness:.2e}")
    return BetaFit(row, tuple(sups), tuple(worst), soundness, forms[0].cutoff.derivative_bound)


@dataclass(frozen=True)
class GapTable:
    b: float
    deltas: Tuple[float, ...]
    gaps: Tuple[float, ...]
    slope: Optional[float]
    derivatives: Tuple[float, ...]
    floors: Tuple[float, ...]
    floor_ok: bool
    passed: bool
    reason: str = ''


def witness_gap_check(witnesses: Sequence[HolomorphicWitness], b: float = 1.0,
                      decay_tolerance: float = 0.05) -> GapTable:
    """|f(0, -b delta) - f(0, -b delta/2)| must stay bounded below across the sweep"""
    deltas = tuple(w.delta for w in witnesses)
    gaps = tuple(float(abs(w(0, -b * w.delta) - w(0, -b * w.delta / 2))) for w in witnesses)
    derivatives = tuple(abs(w.dz3(0, -b * w.delta / 2)) for w in witnesses)
    floors = tuple(w.declared_derivative_floor(w.delta) for w in witnesses)
    floor_ok = all(d >= f for d, f in zip(derivatives, floors))
    slope, reason = None, ''
    if max(gaps) < 1e-300 or min(gaps) < 1e-300:
        reason = 'gap vanishes'
    else:
        try:
            slope = fit_power_law(deltas, gaps).slope
        except DegenerateFitError as e:
            reason = str(e)
        else:
            if slope > decay_tolerance:
                reason = f"gap decays like delta^{slope:.3f}"
    if reason:
        logging.info(f"Witness rejected: {reason}")
    return GapTable(b, deltas, gaps, slope, derivatives, floors, floor_ok, not reason and floor_ok, reason)


def circle_points(center: Sequence[complex], radius: float, nodes: int) -> np.ndarray:
    theta = 2 * np.pi * np.arange(nodes) / nodes
    pts = np.tile(np.asarray(center, dtype=complex), (nodes, 1))
    pts[:, 0] = pts[:, 0] + radius * np.exp(1j * theta)
    return pts


def circle_average_H(h: Callable[[np.ndarray], np.ndarray], norm: SliceNormalization, b: float, c: float,
                     quadrature_nodes: int = 256) -> float:
    """|mean over theta of h(q1(theta)) - h(q2(theta))| on the zeta1 circles of radius (4/5) c delta^(1/eta)"""
    radius = 0.8 * c * norm.delta ** (1.0 / norm.eta)
    q1 = circle_points((norm.z1, 0, -b * norm.delta / 2), radius, quadrature_nodes)
    q2 = circle_points((norm.z1, 0, -b * norm.delta), radius, quadrature_nodes)
    try:
        difference = np.asarray(h(q1), dtype=complex) - np.asarray(h(q2), dtype=complex)
    except (ArithmeticError, ValueError) as e:
        logging.error(f"Error evaluating H_delta integrand: {str(e)}")
        raise StageError(f"Integrand failed at a quadrature node: {e}", stage='holder_pipeline') from e
    if not np.all(np.isfinite(difference)):
        raise StageError('Integrand is not finite at every quadrature node', stage='holder_pipeline')
    return float(abs(np.mean(difference)))


def mean_value_self_test(h: Callable[[np.ndarray], np.ndarray], center: Sequence[complex], radius: float,
                         quadrature_nodes: int = 256) -> float:
    """|circle mean - centre value|; vanishes for h holomorphic in zeta1"""
    mean = np.mean(np.asarray(h(circle_points(center, radius, quadrature_nodes)), dtype=complex))
    return float(abs(mean - complex(np.asarray(h(np.array([center], dtype=complex)))[0])))


@dataclass(frozen=True)
class HolderVerdict:
    eta: int
    bound: Fraction
    beta_norm_fit: Optional[float]
    witness_gap: Tuple[float, ...]
    conclusion: str
    reasoning: Tuple[str, ...] = field(default=())
    branch: str = 'newton_diagram'


def conclude(eta: int, beta_fit: BetaFit, gap: GapTable, H_values: Sequence[float] = ()) -> HolderVerdict:
    """Emit epsilon <= 1/eta once the beta scaling and the witness gap are both established"""
    failed = []
    if not beta_fit.passed:
        failed.append(f"beta sup-norm fit (slope {beta_fit.slope}, soundness {beta_fit.soundness_error:.2e})")
    if not gap.passed:
        failed.append(f"witness gap ({gap.reason or 'derivative floor not met'})")
    if failed:
        raise PrerequisiteError(f"Cannot conclude: {'; '.join(failed)} failed", {'failed': failed})
    bound = Fraction(1, eta)
    reasoning = (
        f"||beta||_inf ~ delta^{beta_fit.slope:.4f}, consistent with delta^(-1/{eta})",
        f"|f(0,-b delta) - f(0,-b delta/2)| >= {min(gap.gaps):.6g} across the sweep",
        'a Hoelder-epsilon solution u of dbar u = beta would give H_delta <= C delta^epsilon ||beta||_inf '
        f"~ delta^(epsilon - 1/{eta})",
        f"H_delta >= {min(H_values):.6g} - C delta^(epsilon - 1/{eta}) stays bounded below"
        if H_values else 'H_delta is bounded below by the witness gap',
        f"both hold as delta -> 0 only if epsilon <= 1/{eta}",
    )
    logging.info(f"Hoelder bound: epsilon <= {bound}")
    return HolderVerdict(eta, bound, beta_fit.slope, gap.gaps, f"epsilon <= 1/{eta}", reasoning)


def conclude_krantz(eta: int) -> HolderVerdict:
    """No mixed term up to order eta: the curve direction alone fixes the bound"""
    return HolderVerdict(eta, Fraction(1, eta), None, (), f"epsilon <= 1/{eta}",
                         ('no mixed term of order <= eta; the Krantz branch applies',), branch='krantz')
