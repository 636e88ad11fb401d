"""
Newton diagram of a defining function in special coordinates.

Mixed (z1, z2) terms of order m..eta project to (alpha1 + beta1, alpha2 + beta2);
together with (eta, 0) these points span a lower-left convex boundary whose
vertices run from (eta, 0) to (0, m).  Segment nu lies on p/eta_nu + q/lambda_nu = 1.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DiagramError, WitnessInconclusiveError
from .normal_form import Z3_UNIT, ZBAR3_UNIT
from .numerics import fit_power_law, polydisc_grid
from .polynomial_core import MixedMonomial, MixedPolynomial, derivative, evaluate_many

Point = Tuple[int, int]
GAMMA_RULE = 'every nonzero mixed (z1, z2) coefficient with m <= |alpha|+|beta| <= eta'


@dataclass(frozen=True)
class NewtonDiagram:
    eta: int
    m: int
    gamma: Tuple[MixedMonomial, ...]
    gamma_L: Tuple[MixedMonomial, ...]
    lambda_set: Tuple[MixedMonomial, ...]
    s_points: Tuple[Point, ...]
    vertices: Tuple[Point, ...]
    weights: Tuple[Tuple[Fraction, Fraction], ...]
    t_table: Tuple[Fraction, ...]

    @property
    def N(self) -> int:
        return len(self.vertices) - 1

    @property
    def t_of(self) -> Dict[int, Fraction]:
        return dict(enumerate(self.t_table))

    def weight(self, point: Point, nu: int) -> Fraction:
        eta_nu, lambda_nu = self.weights[nu - 1]
        return point[0] / eta_nu + point[1] / lambda_nu

    def segment_of(self, l: int) -> int:
        """nu with q_{nu-1} < l <= q_nu"""
        for nu in range(1, self.N + 1):
            if self.vertices[nu - 1][1] < l <= self.vertices[nu][1]:
                return nu
        raise DiagramError(f"l={l} outside 1..m={self.m}")

    def on_segment(self, point: Point, nu: int) -> bool:
        q_lo, q_hi = self.vertices[nu - 1][1], self.vertices[nu][1]
        return self.weight(point, nu) == 1 and q_lo <= point[1] <= q_hi

    def conditions(self) -> Dict[str, bool]:
        v, w = self.vertices, self.weights
        n = self.N
        return {
            'endpoints': (v[0] == (self.eta, 0) and v[-1] == (0, self.m)
                          and w[-1][1] == self.m and w[0][0] == self.eta),
            'vertex_monotone': all(v[i][0] > v[i + 1][0] and v[i][1] < v[i + 1][1] for i in range(n)),
            'weight_monotone': all(w[i][1] < w[i + 1][1] and w[i][0] > w[i + 1][0] for i in range(n - 1)),
            'endpoints_on_lines': all(self.weight(v[nu - 1], nu) == 1 and self.weight(v[nu], nu) == 1
                                      for nu in range(1, n + 1)),
            'gamma_above_lines': all(self.weight(mono.projection, nu) >= 1
                                     for mono in self.gamma for nu in range(1, n + 1)),
        }


def _cross(o: Point, a: Point, b: Point) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_left_boundary(points: Sequence[Point]) -> List[Point]:
    """Strict-turn lower hull, returned from the rightmost point to the leftmost"""
    hull: List[Point] = []
    for point in sorted(set(points)):
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], point) <= 0:
            hull.pop()
        hull.append(point)
    return hull[::-1]


def _segment_weights(start: Point, end: Point) -> Tuple[Fraction, Fraction]:
    slope = Fraction(end[1] - start[1], end[0] - start[0])
    return start[0] - start[1] / slope, start[1] - start[0] * slope


def _is_gamma_candidate(mono: MixedMonomial) -> bool:
    return not mono.involves_z3 and mono.is_mixed


def t_exponent(diagram: NewtonDiagram, l: int) -> Fraction:
    if not 0 <= l <= diagram.m:
        raise DiagramError(f"t_l needs 0 <= l <= m={diagram.m}, got {l}")
    return diagram.t_table[l]


def _t_table(eta: int, m: int, vertices: Sequence[Point], weights: Sequence[Tuple[Fraction, Fraction]]) -> Tuple[Fraction, ...]:
    table = [Fraction(eta)]
    for l in range(1, m + 1):
        for nu in range(1, len(vertices)):
            if vertices[nu - 1][1] < l <= vertices[nu][1]:
                eta_nu, lambda_nu = weights[nu - 1]
                table.append(eta_nu * (1 - Fraction(l) / lambda_nu))
                break
    return tuple(table)


def build_diagram(r: MixedPolynomial, m: int, eta: int) -> NewtonDiagram:
    """Collect Gamma, hull the projections and solve the segment weights exactly"""
    if m > eta:
        raise DiagramError(f"m={m} exceeds eta={eta}")
    below = [mono for mono in r if _is_gamma_candidate(mono) and mono.degree < m]
    if below:
        raise DiagramError(f"Mixed term {below[0]} below order m={m} contradicts the Bloom-Graham type",
                           {'term': str(below[0])})
    gamma = tuple(mono for mono in r if _is_gamma_candidate(mono) and m <= mono.degree <= eta)
    s_points = tuple(sorted({mono.projection for mono in gamma} | {(eta, 0)}))
    if any(p == 0 and q < m for p, q in s_points):
        raise DiagramError('Point (0, q) with q < m present')
    if (0, m) not in s_points:
        raise DiagramError(f"No term mixed in z2 alone at order m={m}")
    vertices = tuple(lower_left_boundary(s_points))
    if vertices[0] != (eta, 0) or vertices[-1] != (0, m):
        raise DiagramError(f"Boundary runs from {vertices[0]} to {vertices[-1]}",
                           {'vertices': [list(v) for v in vertices]})
    if any(vertices[i][1] >= vertices[i + 1][1] for i in range(len(vertices) - 1)):
        raise DiagramError('Boundary has a horizontal segment; a pure z1 mixed term sits below eta')
    weights = tuple(_segment_weights(vertices[nu - 1], vertices[nu]) for nu in range(1, len(vertices)))
    t_table = _t_table(eta, m, vertices, weights)
    provisional = NewtonDiagram(eta, m, gamma, (), (), s_points, vertices, weights, t_table)
    gamma_L = tuple(mono for mono in gamma
                    if any(provisional.on_segment(mono.projection, nu) for nu in range(1, provisional.N + 1)))
    vertex_set = set(vertices[1:])
    lambda_set = tuple(mono for mono in gamma_L
                       if mono.projection in vertex_set and mono.alpha[1] > 0 and mono.beta[1] > 0)
    diagram = NewtonDiagram(eta, m, gamma, gamma_L, lambda_set, s_points, vertices, weights, t_table)
    failed = [name for name, ok in diagram.conditions().items() if not ok]
    if failed:
        raise DiagramError(f"Diagram conditions failed: {', '.join(failed)}", {'failed': failed})
    logging.info(f"Newton diagram: vertices {list(vertices)}, weights {[(str(a), str(b)) for a, b in weights]}")
    return diagram


def _keep_normal_direction(mono: MixedMonomial) -> bool:
    return mono == Z3_UNIT or mono == ZBAR3_UNIT


def weighted_truncation(r: MixedPolynomial, diagram: NewtonDiagram, nu: int) -> MixedPolynomial:
    """Re z3 plus the Gamma_L terms of weight exactly 1 for segment nu"""
    if not 1 <= nu <= diagram.N:
        raise DiagramError(f"nu={nu} outside 1..{diagram.N}")
    members = set(diagram.gamma_L)
    return r.filter(lambda mono, c: _keep_normal_direction(mono)
                    or (mono in members and diagram.weight(mono.projection, nu) == 1))


def iterated_truncation(r: MixedPolynomial, diagram: NewtonDiagram, nu: int) -> MixedPolynomial:
    """Truncate by segment nu, then by segment nu+1: keeps the terms sitting on vertex nu"""
    if not 1 <= nu <= diagram.N - 1:
        raise DiagramError(f"iterated truncation needs 1 <= nu <= N-1, got {nu}")
    first = weighted_truncation(r, diagram, nu)
    return first.filter(lambda mono, c: _keep_normal_direction(mono)
                        or diagram.weight(mono.projection, nu + 1) == 1)


def dilate(points: np.ndarray, diagram: NewtonDiagram, nu: int, t: float) -> np.ndarray:
    eta_nu, lambda_nu = diagram.weights[nu - 1]
    scale = np.array([t ** (1 / float(eta_nu)), t ** (1 / float(lambda_nu)), t], dtype=complex)
    return np.asarray(points, dtype=complex) * scale


@dataclass(frozen=True)
class TruncationDefect:
    ts: Tuple[float, ...]
    sups: Tuple[float, ...]
    slope: float
    passed: bool


def truncation_defect(r: MixedPolynomial, diagram: NewtonDiagram, nu: int,
                      ts: Sequence[float] = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5),
                      points: Optional[np.ndarray] = None) -> TruncationDefect:
    """sup |t^-1 r(H_t z) - r~(z)| over a grid, which must decay as t -> 0"""
    grid = polydisc_grid(5, 0.5, 0.25) if points is None else points
    model = evaluate_many(weighted_truncation(r, diagram, nu), grid).real
    sups = []
    for t in ts:
        scaled = evaluate_many(r, dilate(grid, diagram, nu, t)).real / t
        sups.append(float(np.max(np.abs(scaled - model))))
    if max(sups) <= 1e-14:
        return TruncationDefect(tuple(ts), tuple(sups), math.inf, True)
    fit = fit_power_law(ts, [max(s, 1e-300) for s in sups])
    return TruncationDefect(tuple(ts), tuple(sups), fit.slope, fit.slope > 0)


@dataclass(frozen=True)
class PshVerdict:
    passed: bool
    min_eigenvalue: float
    worst_point: Tuple[complex, complex, complex]
    samples: int
    tolerance: float


def complex_hessian(p: MixedPolynomial, points: np.ndarray, size: int = 3) -> np.ndarray:
    """(n, size, size) array of d^2 p / dz_i dzbar_j"""
    pts = np.atleast_2d(points)
    hessian = np.zeros((len(pts), size, size), dtype=complex)
    for i in range(size):
        for j in range(size):
            alpha = tuple(int(k == i) for k in range(3))
            beta = tuple(int(k == j) for k in range(3))
            hessian[:, i, j] = evaluate_many(derivative(p, alpha, beta), pts)
    return hessian


def levi_psh_check(p: MixedPolynomial, grid_points: int = 9, radius: float = 0.5,
                   tolerance: float = 1e-9) -> PshVerdict:
    """Minimal eigenvalue of the complex Hessian over a polydisc grid"""
    points = polydisc_grid(grid_points, radius)
    eigenvalues = np.linalg.eigvalsh(complex_hessian(p, points))
    smallest = eigenvalues[:, 0]
    worst = int(np.argmin(smallest))
    min_eigenvalue = float(smallest[worst])
    return PshVerdict(min_eigenvalue >= -tolerance, min_eigenvalue,
                      tuple(complex(z) for z in points[worst]), len(points), tolerance)


def levi_determinant(p: MixedPolynomial, points: np.ndarray) -> np.ndarray:
    """det of the (z1, z2) block of the complex Hessian"""
    block = complex_hessian(p, points, size=2)
    return (block[:, 0, 0] * block[:, 1, 1] - block[:, 0, 1] * block[:, 1, 0]).real


@dataclass(frozen=True)
class Refutation:
    polynomial: MixedPolynomial
    has_antiholomorphic_part: bool
    point: Tuple[complex, complex, complex]
    determinant: float


@dataclass(frozen=True)
class MixedWitness:
    nu: int
    vertex: Point
    monomial: Optional[MixedMonomial] = None
    refutation: Optional[Refutation] = None

    @property
    def alpha(self):
        return self.monomial.alpha if self.monomial else None

    @property
    def beta(self):
        return self.monomial.beta if self.monomial else None

    @property
    def found(self) -> bool:
        return self.monomial is not None


def mixed_witness(diagram: NewtonDiagram, iterated: MixedPolynomial, nu: int,
                  tolerance: float = 1e-9) -> MixedWitness:
    """A Gamma_L term on vertex nu mixed in z2, or a refuting Levi determinant sample"""
    vertex = diagram.vertices[nu]
    members = set(diagram.gamma_L)
    for mono in iterated:
        if mono in members and mono.projection == vertex and mono.alpha[1] > 0 and mono.beta[1] > 0:
            return MixedWitness(nu, vertex, monomial=mono)
    q = vertex[1]
    coefficient_poly = iterated.filter(lambda mono, c: not mono.involves_z3
                                       and mono.alpha[1] == q and mono.beta[1] == 0)
    antiholomorphic = any(mono.beta[0] > 0 for mono in coefficient_poly)
    points = polydisc_grid(9, 0.5)
    determinants = levi_determinant(iterated, points)
    worst = int(np.argmin(determinants))
    if determinants[worst] < -tolerance:
        logging.info(f"No mixed witness at vertex {vertex}; Levi determinant {determinants[worst]:.3e} refutes pseudoconvexity")
        return MixedWitness(nu, vertex, refutation=Refutation(
            coefficient_poly, antiholomorphic, tuple(complex(z) for z in points[worst]), float(determinants[worst])))
    raise WitnessInconclusiveError(f"No mixed witness and no refuting sample at vertex {vertex}",
                                   {'nu': nu, 'min_determinant': float(determinants[worst])})


@dataclass(frozen=True)
class SliceDecomposition:
    core_terms: MixedPolynomial
    m_polynomials: Dict[Tuple[int, int], MixedPolynomial]
    m_segments: Dict[Tuple[int, int], int]
    tail_terms: MixedPolynomial
    tail_bound_exponents: Tuple[Tuple[int, int], ...]

    def polynomials_for(self, nu: int) -> List[MixedPolynomial]:
        return [poly for key, poly in self.m_polynomials.items() if self.m_segments[key] == nu]


def decompose(r: MixedPolynomial, diagram: NewtonDiagram) -> SliceDecomposition:
    """Split r into the Gamma_L - Lambda core, the M polynomials and the dominated tail"""
    lambda_members = set(diagram.lambda_set)
    gamma_L = set(diagram.gamma_L)
    gamma = set(diagram.gamma)
    vertex_index = {v: nu for nu, v in enumerate(diagram.vertices)}
    core = r.filter(lambda mono, c: mono in gamma_L and mono not in lambda_members)
    grouped: Dict[Tuple[int, int], Dict[MixedMonomial, object]] = {}
    segments: Dict[Tuple[int, int], int] = {}
    for mono in diagram.lambda_set:
        key = (mono.alpha[1], mono.beta[1])
        univariate = MixedMonomial((mono.alpha[0], 0, 0), (mono.beta[0], 0, 0))
        grouped.setdefault(key, {})[univariate] = r.coefficient(mono)
        segments[key] = vertex_index[mono.projection]
    m_polynomials = {key: MixedPolynomial(terms, r.degree_cap) for key, terms in sorted(grouped.items())}
    for key, poly in m_polynomials.items():
        p_nu = diagram.vertices[segments[key]][0]
        if any(mono.degree != p_nu for mono in poly):
            raise DiagramError(f"M{key} is not homogeneous of degree {p_nu}")
    bounds = tuple((math.floor(diagram.t_table[l]) + 1, l) for l in range(diagram.m + 1))
    tail = r.filter(lambda mono, c: mono in gamma and mono not in gamma_L)
    for mono in tail:
        k, l = mono.projection
        if l <= diagram.m and bounds[l][0] > k:
            raise DiagramError(f"Tail term {mono} at ({k}, {l}) is not dominated by |z1|^{bounds[l][0]}|z2|^{l}",
                               {'term': str(mono)})
    return SliceDecomposition(core, m_polynomials, segments, tail, bounds)
