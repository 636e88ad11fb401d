"""
Per-(d, delta) slice machinery.

For a direction d = exp(i theta0) and a scale delta the boundary point
e~ = (d delta^(1/eta), 0, e_delta) is found by a one-dimensional Newton solve.
The slice through e~ (z1 frozen) is then brought to the form

    rho = Re zeta3 + sum_{j,k >= 1, j+k <= m} a_jk zeta2^j conj(zeta2)^k + ...

by the map Phi_3 = e_delta + dz3^-1 (zeta3/2 - dz2 zeta2 - sum_l c_l zeta2^l), where
c_l is the pure zeta2^l coefficient present after the lower orders were removed.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConvergenceError, StageError
from .newton_diagram import NewtonDiagram, SliceDecomposition
from .numerics import FitRow, fit_row
from .polynomial_core import (
    ONE, Z1, Z2, Z3, HoloPolyMap, MixedMonomial, MixedPolynomial, compose, composition_degree, derivative,
    evaluate, evaluate_many, wirtinger_derivative,
)

MAX_NEWTON_ITERATIONS = 50
RESIDUAL_FACTOR = 1e-12


@dataclass(frozen=True)
class DirectionChoice:
    theta0: float
    d: complex
    margin: float
    min_modulus_profile: Dict[int, float]
    scores: Tuple[float, ...] = field(default=(), repr=False)


def _modulus_on_circle(poly: MixedPolynomial, thetas: np.ndarray) -> np.ndarray:
    points = np.zeros((len(thetas), 3), dtype=complex)
    points[:, 0] = np.exp(1j * thetas)
    return np.abs(evaluate_many(poly, points))


def _score(decomp: SliceDecomposition, thetas: np.ndarray) -> np.ndarray:
    moduli = [_modulus_on_circle(poly, thetas) for poly in decomp.m_polynomials.values()]
    return np.min(np.vstack(moduli), axis=0)


def _edge(decomp: SliceDecomposition, good: float, bad: float, threshold: float, steps: int = 40) -> float:
    """Bisect between a good and a bad angle for the threshold crossing"""
    for _ in range(steps):
        mid = 0.5 * (good + bad)
        if _score(decomp, np.array([mid]))[0] >= threshold:
            good = mid
        else:
            bad = mid
    return good


def choose_direction(decomp: SliceDecomposition, samples: int = 720) -> DirectionChoice:
    """Pick theta0 maximizing min_M |M(e^{i theta})| and the half-width of the arc keeping half that value"""
    if not decomp.m_polynomials:
        raise StageError('Slice decomposition carries no M polynomials', stage='slice_analysis')
    thetas = 2 * np.pi * np.arange(samples) / samples
    scores = _score(decomp, thetas)
    best = int(np.argmax(scores))
    if scores[best] <= 1e-300:
        raise StageError('Every M polynomial vanishes on the unit circle', stage='slice_analysis')
    theta0 = float(thetas[best])
    threshold = 0.5 * scores[best]
    step = 2 * np.pi / samples
    margin = math.pi
    for sign in (1, -1):
        for k in range(1, samples // 2 + 1):
            theta = theta0 + sign * k * step
            if _score(decomp, np.array([theta]))[0] < threshold:
                edge = _edge(decomp, theta - sign * step, theta, threshold)
                margin = min(margin, abs(edge - theta0))
                break
    arc = theta0 + np.linspace(-margin, margin, 101)
    profile: Dict[int, float] = {}
    for key, poly in decomp.m_polynomials.items():
        nu = decomp.m_segments[key]
        low = float(np.min(_modulus_on_circle(poly, arc)))
        profile[nu] = min(profile.get(nu, math.inf), low)
    logging.info(f"Direction theta0={theta0:.6f}, margin={margin:.6f}")
    return DirectionChoice(theta0, complex(np.exp(1j * theta0)), margin, profile, tuple(float(s) for s in scores))


def solve_e_delta(r: MixedPolynomial, d: complex, eta: int, delta: float, constant: float = 10.0) -> complex:
    """Root of z3 -> r(d delta^(1/eta), 0, z3) by damped Newton from 0"""
    z1 = d * delta ** (1.0 / eta)
    dr3 = wirtinger_derivative(r, Z3)
    z3 = 0j
    value = evaluate(r, (z1, 0, z3)).real
    for iteration in range(MAX_NEWTON_ITERATIONS):
        if abs(value) < RESIDUAL_FACTOR * delta:
            break
        slope = evaluate(dr3, (z1, 0, z3))
        if abs(slope) < 1e-300:
            raise ConvergenceError('dr/dz3 vanishes along the slice', {'delta': delta, 'iteration': iteration})
        step = value / (2 * slope)
        damping = 1.0
        while damping > 1e-6:
            trial = z3 - damping * step
            trial_value = evaluate(r, (z1, 0, trial)).real
            if abs(trial_value) < abs(value):
                break
            damping *= 0.5
        z3, value = trial, trial_value
    if abs(value) >= RESIDUAL_FACTOR * delta:
        raise ConvergenceError(f"e_delta did not converge in {MAX_NEWTON_ITERATIONS} iterations",
                               {'delta': delta, 'residual': abs(value)})
    if abs(z3) > constant * delta:
        raise ConvergenceError(f"|e_delta| = {abs(z3):.3e} exceeds {constant} * delta",
                               {'delta': delta, 'e_delta': abs(z3)})
    return complex(z3)


@dataclass(frozen=True)
class SliceNormalization:
    delta: float
    eta: int
    m: int
    e_delta: complex
    tilde_e: Tuple[complex, complex, complex]
    phi: HoloPolyMap
    c: Dict[int, complex]
    rho: MixedPolynomial
    rho_full: MixedPolynomial
    a_jk: Dict[Tuple[int, int], complex]
    A: Dict[int, float]
    tau: float
    shape_residual: float
    unit_error: float

    @property
    def z1(self) -> complex:
        return self.tilde_e[0]

    @property
    def shape_ok(self) -> bool:
        return self.shape_residual < 1e-12 and self.unit_error < 1e-12

    @property
    def tau_constant(self) -> float:
        return self.tau / self.delta ** (1.0 / self.m)

    def tau_at(self, scale: float) -> float:
        """tau(e~, scale) = min_l (scale / A_l)^(1/l) over the nonzero A_l"""
        candidates = [(scale / value) ** (1.0 / l) for l, value in self.A.items() if value > 0]
        return min(candidates) if candidates else math.inf


def _third_component(e: complex, dz2: complex, dz3: complex, c: Dict[int, complex], cap: int) -> MixedPolynomial:
    terms = {ONE: e, MixedMonomial((0, 0, 1)): 0.5 / dz3, MixedMonomial((0, 1, 0)): -dz2 / dz3}
    for l, value in c.items():
        terms[MixedMonomial((0, l, 0))] = -value / dz3
    return MixedPolynomial(terms, cap, real_valued=False)


def _maps(z1: complex, third: MixedPolynomial) -> Tuple[HoloPolyMap, HoloPolyMap]:
    cap = third.degree_cap
    full = HoloPolyMap([MixedPolynomial.variable(Z1, cap), MixedPolynomial.variable(Z2, cap), third])
    frozen = HoloPolyMap([MixedPolynomial.constant(z1, cap), MixedPolynomial.variable(Z2, cap), third])
    return full, frozen


def _compose_exact_cap(p: MixedPolynomial, mapping: HoloPolyMap) -> MixedPolynomial:
    return compose(p, mapping, degree_cap=max(composition_degree(p, mapping), 1))


def slice_normalize(r: MixedPolynomial, tilde_e: Sequence[complex], m: int, eta: int, delta: float) -> SliceNormalization:
    """Build Phi, record c_l and a_jk, and compute A_l and tau for one scale"""
    tilde_e = tuple(complex(z) for z in tilde_e)
    numeric = r.to_numeric()
    dz3 = evaluate(wirtinger_derivative(numeric, Z3), tilde_e)
    dz2 = evaluate(wirtinger_derivative(numeric, Z2), tilde_e)
    if abs(dz3) < 1e-300:
        raise StageError('dr/dz3 vanishes at the slice base point', {'delta': delta}, stage='slice_analysis')
    cap = max(m, 1)
    c: Dict[int, complex] = {}
    third = _third_component(tilde_e[2], dz2, dz3, c, cap)
    rho = _compose_exact_cap(numeric, _maps(tilde_e[0], third)[1])
    for l in range(2, m + 1):
        c[l] = complex(rho.coefficient(MixedMonomial((0, l, 0))))
        if c[l]:
            third = _third_component(tilde_e[2], dz2, dz3, c, cap)
            rho = _compose_exact_cap(numeric, _maps(tilde_e[0], third)[1])
    full, _ = _maps(tilde_e[0], third)
    rho_full = _compose_exact_cap(numeric, full)
    a_jk: Dict[Tuple[int, int], complex] = {}
    A: Dict[int, float] = {}
    for l in range(2, m + 1):
        for j in range(1, l):
            a_jk[(j, l - j)] = complex(rho.coefficient(MixedMonomial((0, j, 0), (0, l - j, 0))))
        A[l] = max(abs(a_jk[(j, l - j)]) for j in range(1, l))
    shape_residual = 0.0
    for l in range(1, m + 1):
        for mono in (MixedMonomial((0, l, 0)), MixedMonomial((0, 0, 0), (0, l, 0))):
            shape_residual = max(shape_residual, math.factorial(l) * abs(complex(rho.coefficient(mono))))
    unit_error = (abs(complex(rho.coefficient(MixedMonomial((0, 0, 1)))) - 0.5)
                  + abs(complex(rho.coefficient(MixedMonomial((0, 0, 0), (0, 0, 1)))) - 0.5))
    candidates = [(delta / value) ** (1.0 / l) for l, value in A.items() if value > 0]
    tau = min(candidates) if candidates else math.inf
    return SliceNormalization(delta, eta, m, tilde_e[2], tilde_e, full, c, rho, rho_full, a_jk, A, tau,
                              shape_residual, unit_error)


def chain_rule_residual(r: MixedPolynomial, norm: SliceNormalization, points: np.ndarray) -> float:
    """max |rho_full(zeta) - r(Phi(zeta))| over the given points"""
    direct = evaluate_many(norm.rho_full, points)
    mapped = evaluate_many(r, norm.phi.evaluate(points))
    return float(np.max(np.abs(direct - mapped)))


def normalize_sweep(r: MixedPolynomial, choice: DirectionChoice, deltas: Sequence[float], m: int, eta: int,
                    e_delta_constant: float = 10.0) -> List[SliceNormalization]:
    norms = []
    for delta in deltas:
        e = solve_e_delta(r, choice.d, eta, delta, e_delta_constant)
        tilde_e = (choice.d * delta ** (1.0 / eta), 0j, e)
        norms.append(slice_normalize(r, tilde_e, m, eta, delta))
    return norms


def tau_monotone(norms: Sequence[SliceNormalization]) -> bool:
    ordered = sorted(norms, key=lambda n: n.delta)
    return all(a.tau <= b.tau * (1 + 1e-12) for a, b in zip(ordered, ordered[1:]))


def vertex_witnesses(diagram: NewtonDiagram) -> Dict[int, MixedMonomial]:
    """First Lambda monomial on each vertex nu = 1..N"""
    found: Dict[int, MixedMonomial] = {}
    for mono in diagram.lambda_set:
        nu = diagram.vertices.index(mono.projection)
        found.setdefault(nu, mono)
    return dict(sorted(found.items()))


def _z2_pairs(l: int) -> List[Tuple[int, int]]:
    return [(a, l - a) for a in range(l, -1, -1)]


def verify_r_derivative_scaling(r: MixedPolynomial, diagram: NewtonDiagram, choice: DirectionChoice,
                                deltas: Sequence[float], e_delta_constant: float = 10.0,
                                slope_tolerance: float = 0.05, r2_min: float = 0.99,
                                band_limit: float = 10.0) -> List[FitRow]:
    """Fit |d^l r / dz2^a dzbar2^b (e~)| against delta: upper rows for every l, two-sided rows on the vertices"""
    eta, m = diagram.eta, diagram.m
    points = []
    for delta in deltas:
        e = solve_e_delta(r, choice.d, eta, delta, e_delta_constant)
        points.append((choice.d * delta ** (1.0 / eta), 0j, e))
    rows = []

    def values_for(a2: int, b2: int) -> List[float]:
        poly = derivative(r, (0, a2, 0), (0, b2, 0))
        return [float(v) for v in np.abs(evaluate_many(poly, points))]

    for l in range(1, m + 1):
        target = float(diagram.t_table[l]) / eta
        for a2, b2 in _z2_pairs(l):
            rows.append(fit_row(f"r d({a2},{b2}) <= delta^(t_{l}/eta)", deltas, values_for(a2, b2), target,
                                kind='upper', slope_tolerance=slope_tolerance))
    for nu, mono in vertex_witnesses(diagram).items():
        a2, b2 = mono.alpha[1], mono.beta[1]
        target = diagram.vertices[nu][0] / eta
        rows.append(fit_row(f"r d({a2},{b2}) ~ delta^(p_{nu}/eta)", deltas, values_for(a2, b2), target,
                            slope_tolerance=slope_tolerance, r2_min=r2_min, band_limit=band_limit,
                            relative_band=True))
    return rows


def verify_rho_derivative_scaling(norms: Sequence[SliceNormalization], diagram: NewtonDiagram,
                                  slope_tolerance: float = 0.05, r2_min: float = 0.99,
                                  band_limit: float = 10.0) -> List[FitRow]:
    """Fit |c_l|, the vertex derivatives of rho at the slice origin, and A_m against delta"""
    eta, m = diagram.eta, diagram.m
    deltas = [n.delta for n in norms]
    rows = []
    for l in range(2, m + 1):
        rows.append(fit_row(f"|c_{l}| <= delta^(t_{l}/eta)", deltas, [abs(n.c[l]) for n in norms],
                            float(diagram.t_table[l]) / eta, kind='upper', slope_tolerance=slope_tolerance))
    origin = [(0, 0, 0)]
    for nu, mono in vertex_witnesses(diagram).items():
        a2, b2 = mono.alpha[1], mono.beta[1]
        values = [abs(evaluate_many(derivative(n.rho, (0, a2, 0), (0, b2, 0)), origin)[0]) for n in norms]
        rows.append(fit_row(f"rho d({a2},{b2}) ~ delta^(p_{nu}/eta)", deltas, values, diagram.vertices[nu][0] / eta,
                            slope_tolerance=slope_tolerance, r2_min=r2_min, band_limit=band_limit,
                            relative_band=True))
    rows.append(fit_row(f"A_{m} ~ 1", deltas, [n.A.get(m, 0.0) for n in norms], 0.0,
                        slope_tolerance=slope_tolerance, r2_min=r2_min, band_limit=band_limit))
    return rows
