"""Problem parameters, radial grids and the field/state containers.

Every other module works on these immutable types.  Arrays stored inside
fields and grids are flagged read-only so that instances can be shared
freely between threads and processes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

# surface measure of the unit sphere, with 2 for the symmetric line
SPHERE_FACTOR = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}

# default (r_max, num_points) per dimension
DEFAULT_GRID = {1: (30.0, 4096), 2: (20.0, 2048), 3: (20.0, 2048)}

MIN_POINTS = 16


class GridMismatchError(ValueError):
    """Raised when two fields that must share a grid do not."""


@dataclass(frozen=True)
class ProblemParams:
    """The quadruple (n, q, b, omega) defining one coupled system."""

    n: int
    q: float
    b: float
    omega: float

    def as_dict(self) -> dict:
        return {"n": self.n, "q": self.q, "b": self.b, "omega": self.omega}

    def replace(self, **changes) -> "ProblemParams":
        data = self.as_dict()
        data.update(changes)
        return ProblemParams(**data)


@dataclass(frozen=True)
class ValidationResult:
    valid: bool
    reasons: Tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.valid


def validate_params(p: ProblemParams) -> ValidationResult:
    """Check the dimension, exponent, coupling and frequency ranges."""
    reasons = []
    n = p.n
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n not in (1, 2, 3):
        reasons.append("n in {1, 2, 3} violated")
    for name in ("q", "b", "omega"):
        value = getattr(p, name)
        if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
            reasons.append(f"{name} must be a finite real number")
    if reasons:
        return ValidationResult(False, tuple(reasons))
    if not p.q > 1:
        reasons.append("q > 1 violated")
    elif n >= 3 and not p.q < n / (n - 2):
        reasons.append("q < n/(n-2) violated")
    if not p.b >= 0:
        reasons.append("b >= 0 violated")
    if not p.omega >= 1:
        reasons.append("omega >= 1 violated")
    return ValidationResult(not reasons, tuple(reasons))


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _node_weights(n: int, nodes: np.ndarray, h: float) -> np.ndarray:
    """Trapezoid weights for sigma_n r^(n-1) dr with end corrections.

    The far end uses the Gregory correction (3/8, 7/6, 23/24) so that the
    rule integrates cubics exactly there.  Near the origin n=1 folds the
    symmetric line (weight h at r=0) and n=3 keeps the natural zero weight.
    For n=2 the first two weights are closed so that the discrete Laplacian
    stays consistent at the origin and the total measure is unchanged.
    """
    coef = np.ones_like(nodes)
    coef[0] = 0.5
    coef[-3:] = [23.0 / 24.0, 7.0 / 6.0, 3.0 / 8.0]
    w = SPHERE_FACTOR[n] * nodes ** (n - 1) * h * coef
    if n == 2:
        w[0] = 3.0 * math.pi * h * h / 16.0
        w[1] = 95.0 * math.pi * h * h / 48.0
    return w


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Uniform mesh on [0, r_max] with radial quadrature weights."""

    n: int
    r_max: float
    num_points: int
    nodes: np.ndarray = field(repr=False)
    quad_weights: np.ndarray = field(repr=False)

    @property
    def spacing(self) -> float:
        return self.r_max / (self.num_points - 1)

    @property
    def sphere_factor(self) -> float:
        return SPHERE_FACTOR[self.n]

    def ball_measure(self, radius: float | None = None) -> float:
        radius = self.r_max if radius is None else radius
        return self.sphere_factor * radius**self.n / self.n

    def _key(self):
        return (self.n, float(self.r_max), int(self.num_points))

    def __eq__(self, other) -> bool:
        return isinstance(other, RadialGrid) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())


def make_grid(n: int, r_max: float, num_points: int) -> RadialGrid:
    if n not in SPHERE_FACTOR:
        raise ValueError(f"dimension n={n} not supported (n in 1, 2, 3)")
    if not (math.isfinite(r_max) and r_max > 0):
        raise ValueError(f"r_max must be positive, got {r_max}")
    if int(num_points) != num_points or num_points < MIN_POINTS:
        raise ValueError(f"num_points must be an integer >= {MIN_POINTS}, got {num_points}")
    num_points = int(num_points)
    nodes = np.linspace(0.0, r_max, num_points)
    nodes[-1] = r_max
    h = r_max / (num_points - 1)
    weights = _node_weights(n, nodes, h)
    return RadialGrid(n, float(r_max), num_points, _readonly(nodes), _readonly(weights))


def default_grid(n: int) -> RadialGrid:
    r_max, num_points = DEFAULT_GRID[n]
    return make_grid(n, r_max, num_points)


@dataclass(frozen=True, eq=False)
class RadialField:
    """Nodal values of a radial function on a grid."""

    grid: RadialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.num_points,):
            raise ValueError(
                f"field has {vals.shape} values, grid has {self.grid.num_points} nodes"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        if vals is self.values and vals.flags.writeable:
            vals = vals.copy()
        if vals.flags.writeable:
            vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, grid: RadialGrid, func) -> "RadialField":
        return cls(grid, func(np.asarray(grid.nodes)))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "RadialField":
        return cls(grid, np.zeros(grid.num_points))

    def scaled(self, factor: float) -> "RadialField":
        return RadialField(self.grid, factor * self.values)


@dataclass(frozen=True, eq=False)
class StatePair:
    """A pair (u, v) of radial fields on one grid."""

    u: RadialField
    v: RadialField

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise GridMismatchError("u and v must share one grid")

    @property
    def grid(self) -> RadialGrid:
        return self.u.grid

    @classmethod
    def from_arrays(cls, grid: RadialGrid, u, v) -> "StatePair":
        return cls(RadialField(grid, u), RadialField(grid, v))

    def scaled(self, factor: float) -> "StatePair":
        return StatePair(self.u.scaled(factor), self.v.scaled(factor))


def check_same_grid(*fields: RadialField) -> RadialGrid:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatchError("fields live on different grids")
    return grid
