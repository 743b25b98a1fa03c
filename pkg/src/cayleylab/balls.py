"""Cayley balls as metric 1-complexes, growth tables and persistence.

A ball of radius R is enumerated breadth first from the identity, with
generator index as the tiebreak, so vertex order is deterministic and
the radius-(R-1) ball is always a prefix of the radius-R ball.  Edges
record one entry per unordered generator pair {s, s^-1} per adjacent
vertex pair; the stored generator index is the pair representative.

The cache file format is line oriented: a JSON header on line one
(format version, model descriptor, radius, vertex count), one
``key norm`` line per vertex, then one ``u v g`` line per edge with
indices into the vertex list.
"""

from __future__ import annotations

import hashlib
import json
import os
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BudgetExceededError,
    CorruptFileError,
    InsufficientDataError,
    VersionMismatchError,
)
from .groups import GroupModel

FORMAT_VERSION = 1

# keeps every stock verification run in minutes on one machine
DEFAULT_VERTEX_BUDGET = 5_000_000


@dataclass
class BallComplex:
    """Radius-R ball of a Cayley graph, immutable after construction."""

    model_descriptor: str
    radius: int
    keys: list[str]
    norms: np.ndarray            # int32, norms[i] = word norm of keys[i]
    edges: np.ndarray            # (E, 3) int64 rows (u, v, generator index)
    _index: dict = field(default=None, repr=False, compare=False)
    _adjacency: tuple = field(default=None, repr=False, compare=False)

    @property
    def vertex_count(self) -> int:
        return len(self.keys)

    def index(self, key: str) -> int:
        if self._index is None:
            self._index = {k: i for i, k in enumerate(self.keys)}
        return self._index[key]

    def volume(self, r: int) -> int:
        """V(r) for any r <= radius."""
        if r >= self.radius:
            return self.vertex_count
        return int(np.searchsorted(self.norms, r, side="right"))

    def adjacency(self):
        """CSR-style neighbor arrays (offsets, targets), built lazily."""
        if self._adjacency is None:
            n = self.vertex_count
            deg = np.zeros(n, dtype=np.int64)
            u, v = self.edges[:, 0], self.edges[:, 1]
            np.add.at(deg, u, 1)
            np.add.at(deg, v, 1)
            offsets = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(deg, out=offsets[1:])
            targets = np.empty(offsets[-1], dtype=np.int64)
            cursor = offsets[:-1].copy()
            for a, b in self.edges[:, :2]:
                targets[cursor[a]] = b
                cursor[a] += 1
                targets[cursor[b]] = a
                cursor[b] += 1
            self._adjacency = (offsets, targets)
        return self._adjacency

    def neighbors(self, i: int) -> np.ndarray:
        offsets, targets = self.adjacency()
        return targets[offsets[i]:offsets[i + 1]]

    def __eq__(self, other):
        return (
            isinstance(other, BallComplex)
            and self.model_descriptor == other.model_descriptor
            and self.radius == other.radius
            and self.keys == other.keys
            and np.array_equal(self.norms, other.norms)
            and np.array_equal(self.edges, other.edges)
        )


def enumerate_ball(model: GroupModel, R: int, budget: int = DEFAULT_VERTEX_BUDGET) -> BallComplex:
    """Enumerate the radius-R ball with exact word norms and all edges.

    Raises :class:`BudgetExceededError` once more than ``budget``
    vertices have been discovered, which signals an infeasible request
    rather than a recoverable condition.
    """
    if R < 0:
        raise ValueError("radius must be nonnegative")
    identity = model.identity
    keys = [model.key(identity)]
    norms = [0]
    index = {keys[0]: 0}
    elements = [identity]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        d = norms[i]
        if d == R:
            continue
        for g in range(model.generator_count):
            nb = model.apply(elements[i], g)
            k = model.key(nb)
            if k not in index:
                if len(keys) >= budget:
                    raise BudgetExceededError(
                        f"ball of radius {R} on {model.descriptor} exceeds "
                        f"vertex budget {budget}",
                        visited=len(keys),
                        budget=budget,
                    )
                index[k] = len(keys)
                keys.append(k)
                norms.append(d + 1)
                elements.append(nb)
                queue.append(len(keys) - 1)

    reps = model.pair_representatives()
    edge_rows = []
    for i, el in enumerate(elements):
        for g in reps:
            nb = model.apply(el, g)
            j = index.get(model.key(nb))
            if j is None:
                continue
            if model.inverse_of[g] == g and j < i:
                continue  # involution edge already recorded from the lower index
            edge_rows.append((i, j, g))
    edges = np.array(edge_rows, dtype=np.int64).reshape(-1, 3)
    return BallComplex(
        model_descriptor=model.descriptor,
        radius=R,
        keys=keys,
        norms=np.array(norms, dtype=np.int32),
        edges=edges,
        _index=index,
    )


@dataclass(frozen=True)
class GrowthTable:
    """Exact V(0..R_max) for one model."""

    model_descriptor: str
    values: tuple

    @property
    def r_max(self) -> int:
        return len(self.values) - 1


def growth_table(model: GroupModel, r_max: int, budget: int = DEFAULT_VERTEX_BUDGET) -> GrowthTable:
    ball = enumerate_ball(model, r_max, budget=budget)
    counts = np.bincount(ball.norms, minlength=r_max + 1)
    return GrowthTable(model.descriptor, tuple(int(v) for v in np.cumsum(counts)))


# calibrated on the built-in menu: lattice ball ratios V(r)/r^d settle
# near 2, while the first rejected exponent stays above 2.39
DEFAULT_DEGREE_THRESHOLD = 2.3


def degree_estimate(table: GrowthTable, threshold: float = DEFAULT_DEGREE_THRESHOLD):
    """Estimate the polynomial growth degree from a finite table.

    Returns the least integer d such that min over the top half of the
    radii of V(r)/r^d falls below ``threshold``, together with fit
    diagnostics (the least-squares slope of log V against log r over
    the same radii).  This is a desk-scale heuristic; on genuinely
    exponential tables the returned degree is an artifact of the cutoff.
    """
    if len(table.values) < 4:
        raise InsufficientDataError("degree estimate needs a table with at least 4 entries")
    r_max = table.r_max
    lo = max(1, (r_max + 1) // 2)
    radii = np.arange(lo, r_max + 1)
    vols = np.array(table.values[lo:], dtype=float)
    logs = np.polyfit(np.log(radii), np.log(vols), 1)
    slope = float(logs[0])
    degree = 0
    while True:
        if float(np.min(vols / radii.astype(float) ** degree)) < threshold:
            break
        degree += 1
    diagnostics = {
        "slope": slope,
        "threshold": threshold,
        "radii": (int(lo), int(r_max)),
        "min_ratio": float(np.min(vols / radii.astype(float) ** degree)),
    }
    return degree, diagnostics


def save_ball(path, ball: BallComplex) -> None:
    header = {
        "format_version": FORMAT_VERSION,
        "model": ball.model_descriptor,
        "R": ball.radius,
        "V": ball.vertex_count,
        "E": int(ball.edges.shape[0]),
    }
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for key, norm in zip(ball.keys, ball.norms):
            fh.write(f"{key} {int(norm)}\n")
        for u, v, g in ball.edges:
            fh.write(f"{u} {v} {g}\n")


def load_ball(path) -> BallComplex:
    with open(path) as fh:
        first = fh.readline()
        try:
            header = json.loads(first)
        except json.JSONDecodeError as exc:
            raise CorruptFileError(f"{path}: unreadable header") from exc
        if header.get("format_version") != FORMAT_VERSION:
            raise VersionMismatchError(
                f"{path}: format version {header.get('format_version')!r}, "
                f"expected {FORMAT_VERSION}"
            )
        try:
            n, m = header["V"], header["E"]
        except KeyError as exc:
            raise CorruptFileError(f"{path}: header missing {exc}") from exc
        keys, norms = [], []
        for _ in range(n):
            line = fh.readline().split()
            if len(line) != 2:
                raise CorruptFileError(f"{path}: truncated vertex section")
            keys.append(line[0])
            norms.append(int(line[1]))
        rows = []
        for _ in range(m):
            line = fh.readline().split()
            if len(line) != 3:
                raise CorruptFileError(f"{path}: truncated edge section")
            rows.append((int(line[0]), int(line[1]), int(line[2])))
    return BallComplex(
        model_descriptor=header["model"],
        radius=int(header["R"]),
        keys=keys,
        norms=np.array(norms, dtype=np.int32),
        edges=np.array(rows, dtype=np.int64).reshape(-1, 3),
    )


def model_hash(model: GroupModel) -> str:
    blob = json.dumps(
        {"descriptor": model.descriptor, "generators": model.generators},
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def cached_ball(model: GroupModel, R: int, cache_dir=None,
                budget: int = DEFAULT_VERTEX_BUDGET) -> BallComplex:
    """enumerate_ball with an optional on-disk cache keyed by model hash."""
    if cache_dir is None:
        return enumerate_ball(model, R, budget=budget)
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, f"{model_hash(model)}_R{R}.ball")
    if os.path.exists(path):
        try:
            ball = load_ball(path)
            if ball.model_descriptor == model.descriptor and ball.radius == R:
                return ball
        except (VersionMismatchError, CorruptFileError):
            pass  # stale or damaged cache entries are rebuilt
    ball = enumerate_ball(model, R, budget=budget)
    save_ball(path, ball)
    return ball


def ball_around(model: GroupModel, center, radius: int, budget: int = DEFAULT_VERTEX_BUDGET):
    """Exact group distances from ``center`` out to ``radius``.

    Runs BFS in the full Cayley graph (not restricted to any enumerated
    ball), so distances are true word-metric distances.  Returns a dict
    canonical key -> distance.
    """
    dist = {model.key(center): 0}
    queue = deque([center])
    while queue:
        el = queue.popleft()
        d = dist[model.key(el)]
        if d == radius:
            continue
        for g in range(model.generator_count):
            nb = model.apply(el, g)
            k = model.key(nb)
            if k not in dist:
                if len(dist) > budget:
                    raise BudgetExceededError(
                        f"neighborhood of radius {radius} exceeds budget {budget}",
                        visited=len(dist), budget=budget)
                dist[k] = d + 1
                queue.append(nb)
    return dist


def submultiplicative(table: GrowthTable) -> bool:
    """Check V(r1 + r2) <= V(r1) V(r2) over the whole table."""
    v = table.values
    n = len(v)
    for r1 in range(n):
        for r2 in range(n - r1):
            if v[r1 + r2] > v[r1] * v[r2]:
                return False
    return True
