"""Poincare inequality verification on Cayley balls.

For any finitely generated group, any radius R and any piecewise linear
f on the 3R-ball,

    int_{B(R)} |f - f_R|^2  <=  8 |S|^2 R^2 (V(2R)/V(R)) int_{B(3R)} |grad f|^2,

where f_R is the edge-measure average of f over B(R).  The inequality
is mathematically exact; the satisfaction check allows 1e-9 relative
slack purely as a floating point guard.  A violation therefore
indicates an implementation bug, never a stray input.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, asdict

import numpy as np

from .balls import BallComplex, enumerate_ball
from .groups import GroupModel
from .harmonic import is_harmonic
from .measure import EdgeDomain, EdgeFunction, average, dirichlet_energy, l2_integral

SATISFACTION_RTOL = 1e-9


@dataclass(frozen=True)
class PoincareReport:
    model: str
    R: int
    lhs: float
    grad: float
    constant: float
    ratio: float
    satisfied: bool

    def as_dict(self):
        return asdict(self)


def poincare_constant(model: GroupModel, ball: BallComplex, R: int) -> float:
    """The explicit constant 8 |S|^2 R^2 V(2R)/V(R)."""
    s = model.generator_count
    return 8.0 * s * s * R * R * ball.volume(2 * R) / ball.volume(R)


def verify_poincare(model: GroupModel, f: EdgeFunction, R: int) -> PoincareReport:
    """Evaluate both sides of the inequality for one function.

    ``f`` must live on a ball of radius at least 3R.
    """
    if R < 1:
        raise ValueError("radius must be >= 1")
    ball = f.ball
    if ball.radius < 3 * R:
        raise ValueError(f"ball of radius {ball.radius} is too small for 3R = {3 * R}")
    inner = EdgeDomain(ball, R)
    outer = EdgeDomain(ball, 3 * R)
    lhs = l2_integral(f, average(f, inner), inner)
    grad = dirichlet_energy(f, outer)
    constant = poincare_constant(model, ball, R)
    bound = constant * grad
    ratio = 0.0 if (grad == 0.0 and lhs == 0.0) else lhs / bound if bound > 0 else np.inf
    satisfied = lhs <= bound + SATISFACTION_RTOL * max(1.0, lhs)
    return PoincareReport(
        model=model.descriptor,
        R=R,
        lhs=lhs,
        grad=grad,
        constant=constant,
        ratio=float(ratio),
        satisfied=bool(satisfied),
    )


def _function_hash(values: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(values, dtype=np.float64).tobytes()).hexdigest()


def adversarial_functions(model: GroupModel, ball: BallComplex, seed: int):
    """The fixed stress family: coordinate, identity indicator, signs, norm.

    These span the directions the inequality has to work hardest
    against: linear growth, a point mass, maximal oscillation and the
    cone function of the metric itself.
    """
    coord = np.array(
        [model.coordinates(model.parse(k))[0] for k in ball.keys], dtype=np.float64
    )
    indicator = np.zeros(ball.vertex_count)
    indicator[0] = 1.0
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xS1GNS if False else 0x516]))
    signs = rng.integers(0, 2, size=ball.vertex_count) * 2.0 - 1.0
    norm = ball.norms.astype(np.float64)
    return [
        ("coordinate", EdgeFunction(ball, coord)),
        ("indicator", EdgeFunction(ball, indicator)),
        ("signs", EdgeFunction(ball, signs)),
        ("norm", EdgeFunction(ball, norm)),
    ]


@dataclass(frozen=True)
class SweepResult:
    model: str
    R: int
    trials: int
    seed: int
    max_ratio: float
    argmax_hash: str
    argmax_label: str
    violations: int


def worst_case_ratio(model: GroupModel, R: int, trials: int, seed: int,
                     ball: BallComplex = None) -> SweepResult:
    """Max observed lhs/bound ratio over adversarial plus random functions.

    Deterministic for a fixed seed.  Random trials draw i.i.d. uniform
    vertex values on [-1, 1].
    """
    if trials < 1:
        raise ValueError("at least one trial required")
    if ball is None:
        ball = enumerate_ball(model, 3 * R)
    candidates = adversarial_functions(model, ball, seed)
    rng = np.random.default_rng(np.random.SeedSequence([seed, R, 0xA11]))
    for t in range(trials):
        values = rng.uniform(-1.0, 1.0, size=ball.vertex_count)
        candidates.append((f"random{t}", EdgeFunction(ball, values)))
    best = (-1.0, "", "")
    violations = 0
    for label, fn in candidates:
        report = verify_poincare(model, fn, R)
        if not report.satisfied:
            violations += 1
        if report.ratio > best[0]:
            best = (report.ratio, _function_hash(fn.values), label)
    return SweepResult(
        model=model.descriptor,
        R=R,
        trials=trials,
        seed=seed,
        max_ratio=best[0],
        argmax_hash=best[1],
        argmax_label=best[2],
        violations=violations,
    )


def reverse_poincare_constant(model: GroupModel, v: EdgeFunction, R2: int) -> float:
    """Empirical constant in the reverse inequality for harmonic functions.

    Returns R2^2 grad_{B(2 R2)}(v) / Q_{16 R2}(v, v) for a function
    harmonic on the interior of its ball (radius at least 16 R2).  This
    is an observed value, not a certified bound.
    """
    ball = v.ball
    if ball.radius < 16 * R2:
        raise ValueError(f"ball radius {ball.radius} is too small for 16 R2 = {16 * R2}")
    if not is_harmonic(ball, v.values):
        raise ValueError("function is not harmonic on the ball interior")
    q = l2_integral(v, 0.0, EdgeDomain(ball, 16 * R2))
    if q == 0.0:
        raise ZeroDivisionError("function vanishes on the outer domain")
    grad = dirichlet_energy(v, EdgeDomain(ball, 2 * R2))
    return R2 * R2 * grad / q
