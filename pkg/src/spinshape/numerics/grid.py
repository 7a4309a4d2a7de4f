"""Uniform symmetric grids and two-component fields sampled on them."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """Nodes z_i = (i - (N+1)/2) h for i = 1..N on the box [-L, L].

    The spacing is stored rather than recomputed so that the link grid
    (``dual``) and its inverse (``extended``) share bit-identical coordinates.
    Coordinates are formed as (integer or half-integer) * h, so the node set is
    mapped onto itself exactly by z -> -z.
    """

    spacing: float
    points: int

    def __post_init__(self):
        if not (self.spacing > 0 and np.isfinite(self.spacing)):
            raise ValueError("grid spacing must be positive")
        if self.points < 16:
            raise ValueError(f"grid needs at least 16 points, got {self.points}")

    @classmethod
    def box(cls, half_width: float, points: int) -> "Grid":
        if half_width <= 0:
            raise ValueError("half_width must be positive")
        return cls(2.0 * half_width / (points + 1), int(points))

    @property
    def half_width(self) -> float:
        return 0.5 * (self.points + 1) * self.spacing

    @property
    def nodes(self) -> np.ndarray:
        n = self.points
        return (np.arange(1, n + 1) - 0.5 * (n + 1)) * self.spacing

    @property
    def links(self) -> np.ndarray:
        n = self.points
        return (np.arange(1, n) - 0.5 * n) * self.spacing

    def dual(self) -> "Grid":
        """Grid whose nodes are the interior links of this one."""
        return Grid(self.spacing, self.points - 1)

    def extended(self) -> "Grid":
        """Grid whose interior links are the nodes of this one."""
        return Grid(self.spacing, self.points + 1)

    def reflection(self) -> np.ndarray:
        return np.arange(self.points)[::-1]


@dataclass
class SpinorField:
    """Two complex components on the nodes of ``grid``, shape (N, 2)."""

    values: np.ndarray
    grid: Grid
    log_scale: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.points, 2):
            raise GridMismatchError(
                f"values of shape {self.values.shape} do not fit a grid of {self.grid.points} points"
            )

    @property
    def z(self) -> np.ndarray:
        return self.grid.nodes

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    @classmethod
    def from_flat(cls, vec, grid: Grid, **kw) -> "SpinorField":
        return cls(np.asarray(vec).reshape(grid.points, 2), grid, **kw)

    def norm(self) -> float:
        return float(np.sqrt(inner_product(self, self).real))

    def normalized(self) -> "SpinorField":
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize a zero field")
        return SpinorField(self.values / nrm, self.grid, self.log_scale + np.log(nrm), dict(self.meta))

    def __add__(self, other: "SpinorField") -> "SpinorField":
        _same_grid(self, other)
        return SpinorField(self.values + other.values, self.grid)

    def __sub__(self, other: "SpinorField") -> "SpinorField":
        _same_grid(self, other)
        return SpinorField(self.values - other.values, self.grid)

    def __mul__(self, c) -> "SpinorField":
        return SpinorField(self.values * c, self.grid)

    __rmul__ = __mul__


def _same_grid(phi: SpinorField, psi: SpinorField):
    if phi.grid != psi.grid:
        raise GridMismatchError(f"fields live on different grids: {phi.grid} vs {psi.grid}")


def inner_product(phi: SpinorField, psi: SpinorField) -> complex:
    """h * sum_i conj(phi_i) . psi_i."""
    _same_grid(phi, psi)
    return complex(phi.grid.spacing * np.vdot(phi.values, psi.values))


def sample(func, grid: Grid) -> SpinorField:
    """Sample ``func(z) -> (N, 2)`` on the grid nodes."""
    return SpinorField(func(grid.nodes), grid)
