"""Bound-state extraction on top of the banded eigensolver."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigen import count_below, eigen_lowest
from .operators import BandedSymmetricOperator

KERNEL_CUTOFF = 1e-10
EDGE_FRACTION = 0.1
EDGE_LIMIT = 0.5


def edge_weight(vector: np.ndarray, op: BandedSymmetricOperator, fraction: float = EDGE_FRACTION) -> float:
    """Share of |vector|^2 on nodes within ``fraction * L`` of either wall."""
    z = op.grid.nodes
    L = op.grid.half_width
    dens = (np.abs(vector.reshape(-1, 2)) ** 2).sum(axis=1)
    outer = np.abs(z) > (1 - fraction) * L
    return float(dens[outer].sum() / dens.sum())


@dataclass
class BoundSpectrum:
    values: np.ndarray
    vectors: np.ndarray
    wall_mode: np.ndarray  # True where the state is pinned to the box walls
    scale: float
    threshold: float

    @property
    def bound_values(self) -> np.ndarray:
        return self.values[~self.wall_mode]

    def kernel_dimension(self, cutoff: float = KERNEL_CUTOFF) -> int:
        small = np.abs(self.values) < cutoff * self.scale
        return int(np.count_nonzero(small & ~self.wall_mode))

    def raw_kernel_dimension(self, cutoff: float = KERNEL_CUTOFF) -> int:
        return int(np.count_nonzero(np.abs(self.values) < cutoff * self.scale))


def bound_spectrum(
    op: BandedSymmetricOperator,
    threshold: float,
    tol: float = 1e-14,
    *,
    extra: int = 0,
    vectors: bool = True,
) -> BoundSpectrum:
    """Eigenpairs strictly below ``threshold`` (plus ``extra`` above it).

    States with more than half their weight in the outer tenth of the box are
    flagged as wall modes; they are artefacts of the finite box, never bound
    states of the problem on the line.
    """
    k = min(count_below(op, threshold) + extra, op.dim)
    scale = op.norm_bound()
    if k == 0:
        return BoundSpectrum(np.empty(0), np.empty((op.dim, 0)), np.zeros(0, bool), scale, threshold)
    pairs = eigen_lowest(op, k, tol)
    if vectors and op.grid is not None:
        wall = np.array([edge_weight(v, op) > EDGE_LIMIT for v in pairs.vectors.T])
    else:
        wall = np.zeros(k, dtype=bool)
    return BoundSpectrum(pairs.values, pairs.vectors, wall, scale, threshold)
