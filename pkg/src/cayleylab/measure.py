"""Calculus on the Cayley 1-complex.

Functions are given by vertex values and extended linearly along unit
edges.  The integration domain of radius R is the whole-edge subcomplex
of the metric ball: every edge with both endpoints of norm at most R
and at least one endpoint of norm at most R - 1.  (An edge joining two
norm-R vertices pokes outside the metric ball at its midpoint, so it is
excluded; with this convention every integral below is an exact
rational in the vertex values.)

Closed forms per unit edge with endpoint values a, b:

* squared gradient        (b - a)^2
* squared deviation       ((a-c)^2 + (a-c)(b-c) + (b-c)^2) / 3
* mean of the interpolant (a + b) / 2
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .balls import BallComplex
from .errors import DomainMismatchError


@dataclass
class EdgeDomain:
    """Edge subcomplex of the radius-R ball inside a host ball."""

    ball: BallComplex
    radius: int
    edge_indices: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("domain radius must be nonnegative")
        if self.radius > self.ball.radius:
            raise ValueError(
                f"domain radius {self.radius} exceeds ball radius {self.ball.radius}"
            )
        if self.edge_indices is None:
            norms = self.ball.norms
            u = norms[self.ball.edges[:, 0]]
            v = norms[self.ball.edges[:, 1]]
            keep = (u <= self.radius) & (v <= self.radius) & (
                np.minimum(u, v) <= self.radius - 1
            )
            self.edge_indices = np.flatnonzero(keep)

    @property
    def total_length(self) -> int:
        return int(self.edge_indices.size)

    def endpoints(self):
        e = self.ball.edges[self.edge_indices]
        return e[:, 0], e[:, 1]


def edge_domain(ball: BallComplex, R: int) -> EdgeDomain:
    return EdgeDomain(ball, R)


@dataclass
class EdgeFunction:
    """Real function on a ball given by one value per vertex."""

    ball: BallComplex
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.ball.vertex_count,):
            raise ValueError("one value per ball vertex required")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("vertex values must be finite")

    @classmethod
    def from_callable(cls, ball: BallComplex, model, fn) -> "EdgeFunction":
        """Evaluate ``fn`` on parsed vertex elements."""
        vals = np.array([fn(model.parse(k)) for k in ball.keys], dtype=np.float64)
        return cls(ball, vals)


def _check(f: EdgeFunction, domain: EdgeDomain):
    if f.ball is not domain.ball:
        raise DomainMismatchError("function and domain live on different balls")


def dirichlet_energy(f: EdgeFunction, domain: EdgeDomain) -> float:
    """Integral of the squared gradient over the domain."""
    _check(f, domain)
    u, v = domain.endpoints()
    d = f.values[v] - f.values[u]
    return float(np.dot(d, d))


def l2_integral(f: EdgeFunction, c: float, domain: EdgeDomain) -> float:
    """Integral of (f - c)^2 over the domain."""
    _check(f, domain)
    u, v = domain.endpoints()
    a = f.values[u] - c
    b = f.values[v] - c
    return float(np.sum(a * a + a * b + b * b) / 3.0)


def average(f: EdgeFunction, domain: EdgeDomain) -> float:
    """Mean of the linear interpolant against edge measure."""
    _check(f, domain)
    if domain.total_length == 0:
        raise ValueError("average over an empty domain")
    u, v = domain.endpoints()
    return float(np.sum(f.values[u] + f.values[v]) / (2.0 * domain.total_length))
