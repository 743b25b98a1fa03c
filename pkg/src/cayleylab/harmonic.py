"""Discrete harmonic functions, Gram forms and growth functionals.

A vertex function u is harmonic at v when the increments to all
generator neighbors cancel: sum over incident edges of u(w) - u(v) is
zero.  This is simultaneously the graph-Laplacian kernel condition and
the stationarity condition of the edge Dirichlet energy, so functions
that pass the residual check here are exactly the ones whose linear
extension is harmonic on the 1-complex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .balls import BallComplex, enumerate_ball
from .groups import GroupModel
from .measure import EdgeDomain, EdgeFunction

HARMONIC_RTOL = 1e-8
SOLVE_RTOL = 1e-10


def laplacian_residuals(ball: BallComplex, values: np.ndarray) -> np.ndarray:
    """Neighbor-increment sums at every interior vertex (norm < radius)."""
    values = np.asarray(values, dtype=np.float64)
    res = np.zeros(ball.vertex_count)
    u, v = ball.edges[:, 0], ball.edges[:, 1]
    d = values[v] - values[u]
    np.add.at(res, u, d)
    np.add.at(res, v, -d)
    return res[ball.norms < ball.radius]


def is_harmonic(ball: BallComplex, values: np.ndarray, rtol: float = HARMONIC_RTOL) -> bool:
    res = laplacian_residuals(ball, values)
    scale = max(1.0, float(np.max(np.abs(values))))
    return bool(np.max(np.abs(res), initial=0.0) <= rtol * scale)


def solve_dirichlet(model: GroupModel, ball, boundary) -> EdgeFunction:
    """Solve the discrete Dirichlet problem on a ball.

    ``ball`` is a BallComplex or an outer radius to enumerate.
    ``boundary`` assigns values to the norm-R vertices: a mapping from
    canonical key to value, or a callable on parsed elements.  The
    unique interior extension harmonic at every vertex of norm < R is
    returned; the maximum principle and the mean value property are
    asserted on the result before it is handed back.
    """
    if isinstance(ball, int):
        ball = enumerate_ball(model, ball)
    R = ball.radius
    if R < 1:
        raise ValueError("dirichlet problem needs radius >= 1")
    norms = ball.norms
    boundary_idx = np.flatnonzero(norms == R)
    interior_idx = np.flatnonzero(norms < R)
    assert boundary_idx.size > 0, "ball has an empty boundary sphere"

    values = np.zeros(ball.vertex_count)
    if callable(boundary):
        for i in boundary_idx:
            values[i] = float(boundary(model.parse(ball.keys[i])))
    else:
        for i in boundary_idx:
            values[i] = float(boundary[ball.keys[i]])

    pos = -np.ones(ball.vertex_count, dtype=np.int64)
    pos[interior_idx] = np.arange(interior_idx.size)

    # interior Laplacian is SPD on a connected ball with boundary
    rows, cols, data = [], [], []
    rhs = np.zeros(interior_idx.size)
    deg = np.zeros(ball.vertex_count, dtype=np.int64)
    u, v = ball.edges[:, 0], ball.edges[:, 1]
    np.add.at(deg, u, 1)
    np.add.at(deg, v, 1)
    for a, b in ball.edges[:, :2]:
        pa, pb = pos[a], pos[b]
        if pa >= 0 and pb >= 0:
            rows += [pa, pb]
            cols += [pb, pa]
            data += [-1.0, -1.0]
        elif pa >= 0:
            rhs[pa] += values[b]
        elif pb >= 0:
            rhs[pb] += values[a]
    rows += list(range(interior_idx.size))
    cols += list(range(interior_idx.size))
    data += [float(deg[i]) for i in interior_idx]
    lap = scipy.sparse.csr_matrix(
        (data, (rows, cols)), shape=(interior_idx.size, interior_idx.size)
    )
    values[interior_idx] = scipy.sparse.linalg.spsolve(lap, rhs)

    scale = max(1.0, float(np.max(np.abs(values))))
    res = laplacian_residuals(ball, values)
    assert np.max(np.abs(res), initial=0.0) <= SOLVE_RTOL * scale, "solver residual too large"
    bmin, bmax = values[boundary_idx].min(), values[boundary_idx].max()
    tol = 1e-12 * scale
    assert values.min() >= bmin - tol and values.max() <= bmax + tol, \
        "maximum principle violated"
    _assert_mean_value(ball, values, interior_idx, scale)
    return EdgeFunction(ball, values)


def _assert_mean_value(ball, values, interior_idx, scale):
    offsets, targets = ball.adjacency()
    for i in interior_idx:
        nbrs = targets[offsets[i]:offsets[i + 1]]
        assert abs(values[i] - values[nbrs].mean()) <= HARMONIC_RTOL * scale, \
            "mean value property violated"


# -- discrete harmonic polynomials on lattices -------------------------------

def _monomials(d: int, max_degree: int):
    """Exponent tuples of total degree <= max_degree, graded order."""
    out = []
    for total in range(max_degree + 1):
        out.extend(_compositions(d, total))
    return out


def _compositions(d, total):
    if d == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(d - 1, total - first):
            yield (first,) + rest


def _shift_coeffs(power: int):
    """Coefficients of (x+1)^p + (x-1)^p - 2 x^p as {lower power: int}."""
    out = {}
    for j in range(2, power + 1, 2):
        out[power - j] = 2 * math.comb(power, j)
    return out


def _lattice_laplacian_matrix(monomials, d):
    """Exact integer matrix of the lattice Laplacian on polynomial space."""
    col_of = {m: i for i, m in enumerate(monomials)}
    n = len(monomials)
    mat = [[0] * n for _ in range(n)]
    for j, mono in enumerate(monomials):
        for axis in range(d):
            for lower, coeff in _shift_coeffs(mono[axis]).items():
                target = list(mono)
                target[axis] = lower
                mat[col_of[tuple(target)]][j] += coeff
    return mat


def _exact_nullspace(mat):
    """Nullspace basis of an integer matrix over the rationals.

    Fraction Gaussian elimination; returns primitive integer vectors in
    a deterministic order (free columns ascending).
    """
    rows = [[Fraction(x) for x in row] for row in mat]
    n_rows, n_cols = len(rows), len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n_cols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -rows[i][fc]
        denom = math.lcm(*(f.denominator for f in vec)) if vec else 1
        ints = [int(f * denom) for f in vec]
        g = math.gcd(*(abs(x) for x in ints if x)) or 1
        basis.append([x // g for x in ints])
    return basis


@dataclass(frozen=True)
class HarmonicPolynomialSpace:
    """Exact kernel of the lattice Laplacian on polynomials of bounded degree."""

    lattice_dim: int
    max_degree: int
    monomials: tuple
    coefficients: tuple   # one integer vector per basis polynomial

    @property
    def dimension(self) -> int:
        return len(self.coefficients)

    def evaluate(self, which: int, point) -> float:
        total = 0
        for coeff, mono in zip(self.coefficients[which], self.monomials):
            if coeff == 0:
                continue
            term = coeff
            for x, e in zip(point, mono):
                term *= int(x) ** e
            total += term
        return float(total)


def harmonic_polynomial_space(d_lattice: int, max_degree: int) -> HarmonicPolynomialSpace:
    """Discrete harmonic polynomials on the rank-d lattice, exactly.

    The lattice Laplacian maps polynomials of degree <= D to degree
    <= D - 2 with integer coefficients; its exact rational kernel is the
    requested space.  Supported for d in 1..3 and D <= 6.
    """
    if d_lattice not in (1, 2, 3):
        raise ValueError("lattice dimension must be 1, 2 or 3")
    if not 0 <= max_degree <= 6:
        raise ValueError("max degree must be in 0..6")
    monomials = _monomials(d_lattice, max_degree)
    mat = _lattice_laplacian_matrix(monomials, d_lattice)
    basis = _exact_nullspace(mat)
    return HarmonicPolynomialSpace(
        lattice_dim=d_lattice,
        max_degree=max_degree,
        monomials=tuple(monomials),
        coefficients=tuple(tuple(v) for v in basis),
    )


# -- harmonic bases on balls --------------------------------------------------

@dataclass
class HarmonicBasis:
    """Linearly independent functions, each harmonic on the ball interior."""

    ball: BallComplex
    functions: list
    labels: list

    def __post_init__(self):
        for fn, label in zip(self.functions, self.labels):
            if fn.ball is not self.ball:
                raise ValueError(f"{label}: function lives on a different ball")
            if not is_harmonic(self.ball, fn.values):
                raise ValueError(f"{label}: harmonicity residual too large")
        matrix = self.values_matrix()
        if np.linalg.matrix_rank(matrix) < len(self.functions):
            raise ValueError("basis functions are linearly dependent")

    @property
    def dimension(self) -> int:
        return len(self.functions)

    def values_matrix(self) -> np.ndarray:
        return np.vstack([fn.values for fn in self.functions])


def polynomial_basis(model, ball: BallComplex, max_degree: int) -> HarmonicBasis:
    """Basis of discrete harmonic polynomials evaluated on a lattice ball."""
    space = harmonic_polynomial_space(model.d, max_degree)
    points = [model.parse(k) for k in ball.keys]
    fns, labels = [], []
    for i in range(space.dimension):
        vals = np.array([space.evaluate(i, p) for p in points])
        fns.append(EdgeFunction(ball, vals))
        labels.append(f"poly{i}")
    return HarmonicBasis(ball, fns, labels)


def coordinate_basis(model: GroupModel, ball: BallComplex, degree: int) -> HarmonicBasis:
    """Exactly harmonic coordinate family on any built-in model.

    Degree 0 gives the constants, degree 1 adds the harmonic
    coordinates, degree 2 adds pairwise products and consecutive
    differences of squares.  The quadratic layer exists on the lattice,
    Heisenberg and free models; the identities behind it fail on the
    lamplighter and dihedral models, so degree 2 is rejected there.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if degree >= 2 and not model.supports_quadratic_family:
        raise ValueError(f"{model.descriptor} has no exact quadratic coordinate family")
    coords = [model.harmonic_coordinates(model.parse(k)) for k in ball.keys]
    coords = np.array(coords, dtype=np.float64)
    n_coords = coords.shape[1]
    columns = [("1", np.ones(ball.vertex_count))]
    if degree >= 1:
        for i in range(n_coords):
            columns.append((f"c{i + 1}", coords[:, i]))
    if degree >= 2:
        for i, j in combinations(range(n_coords), 2):
            columns.append((f"c{i + 1}c{j + 1}", coords[:, i] * coords[:, j]))
        for i in range(n_coords - 1):
            columns.append(
                (f"c{i + 1}^2-c{i + 2}^2", coords[:, i] ** 2 - coords[:, i + 1] ** 2)
            )
    if degree >= 3:
        raise ValueError("coordinate families are available up to degree 2")
    fns = [EdgeFunction(ball, vals) for _, vals in columns]
    return HarmonicBasis(ball, fns, [label for label, _ in columns])


def dirichlet_basis(model: GroupModel, ball: BallComplex, boundary_fns, labels) -> HarmonicBasis:
    """Solve one Dirichlet problem per boundary function; drop dependents.

    Members are harmonic on the ball interior by construction and are
    approximate stand-ins for globally defined harmonic functions.
    """
    fns, kept = [], []
    for fn, label in zip(boundary_fns, labels):
        sol = solve_dirichlet(model, ball, fn)
        stack = np.vstack([g.values for g in fns] + [sol.values])
        if np.linalg.matrix_rank(stack) == stack.shape[0]:
            fns.append(sol)
            kept.append(label)
    return HarmonicBasis(ball, fns, kept)


# -- Gram forms and the growth functional -------------------------------------

@dataclass(frozen=True)
class GramForm:
    """Matrix of pairwise edge-measure inner products over a domain radius."""

    radius: int
    matrix: np.ndarray


def gram(basis: HarmonicBasis, R: int) -> GramForm:
    """Pairwise integrals of products of basis functions over the R-domain.

    Per edge with endpoint value pairs (a1, b1), (a2, b2) the integral
    of the product of the interpolants is
    (2 a1 a2 + 2 b1 b2 + a1 b2 + a2 b1) / 6.
    """
    if R > basis.ball.radius:
        raise ValueError(f"gram radius {R} exceeds basis ball radius {basis.ball.radius}")
    domain = EdgeDomain(basis.ball, R)
    u, v = domain.endpoints()
    F = basis.values_matrix()
    A = F[:, u]
    B = F[:, v]
    Q = (2.0 * (A @ A.T) + 2.0 * (B @ B.T) + A @ B.T + B @ A.T) / 6.0
    return GramForm(R, (Q + Q.T) / 2.0)


def _logdet_if_pd(matrix: np.ndarray):
    """Log determinant through the eigenvalues, None unless positive definite."""
    eig = np.linalg.eigvalsh(matrix)
    scale = max(float(eig[-1]), 0.0)
    if scale <= 0.0 or eig[0] <= 1e-12 * scale:
        return None
    return float(np.sum(np.log(eig)))


@dataclass
class GrowthFunctional:
    """Log-space tables of f(R) = V(R) (det Q_R)^(1/k) along powers of a base."""

    base: int
    dimension: int
    i_values: list          # indices i with Q_{base^i} computed
    volumes: list           # V(base^i)
    logdets: list           # None until positive definite
    i0: int                 # least i with Q positive definite

    @property
    def h(self) -> dict:
        """h(i) = log f(base^i), defined for i >= i0."""
        out = {}
        for i, vol, ld in zip(self.i_values, self.volumes, self.logdets):
            if ld is not None:
                out[i] = math.log(vol) + ld / self.dimension
        return out


def growth_functional(basis: HarmonicBasis, base: int, i_max: int,
                      i_min: int = 0) -> GrowthFunctional:
    """Evaluate the growth functional at radii base^i for i in [i_min, i_max].

    Requires base^i_max within the basis ball.  Raises when no radius in
    the range yields a positive definite Gram form, reporting the last
    offending index.
    """
    if base < 2:
        raise ValueError("base must be at least 2")
    if base ** i_max > basis.ball.radius:
        raise ValueError(
            f"radius {base ** i_max} exceeds basis ball radius {basis.ball.radius}"
        )
    i_values, volumes, logdets = [], [], []
    i0 = None
    for i in range(i_min, i_max + 1):
        R = base ** i
        q = gram(basis, R)
        ld = _logdet_if_pd(q.matrix)
        i_values.append(i)
        volumes.append(basis.ball.volume(R))
        logdets.append(ld)
        if ld is not None and i0 is None:
            i0 = i
    if i0 is None:
        raise ValueError(
            f"no positive definite Gram form up to i={i_max} (offending index {i_max})"
        )
    return GrowthFunctional(
        base=base,
        dimension=basis.dimension,
        i_values=i_values,
        volumes=volumes,
        logdets=logdets,
        i0=i0,
    )
