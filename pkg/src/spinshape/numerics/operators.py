"""Discretized first-order operators and the partner Hamiltonians.

Interleaved (node, spin) ordering is used throughout, so every operator is
block tridiagonal with 2x2 blocks (scalar half-bandwidth 3).

The factorized scheme acts on the interior links of the grid:

    (A- psi)_{i+1/2} = (psi_{i+1} - psi_i)/h + M(z_{i+1/2}) (psi_{i+1} + psi_i)/2

for i = 1..N-1, and A+ is its exact adjoint.  H- = A+ A- therefore lives on
the N nodes and H+ = A- A+ on the N-1 links (the nodes of ``grid.dual()``).
A- has two more columns than rows, so H- always carries a two-dimensional
kernel: the discrete solutions of A- psi = 0.  Whether those are bound states
or wall modes is decided by where they live, see ``spectrum.bound_spectrum``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps

from ..fields import CASE2, DEFAULT_FRAME, MatrixSuperpotential, ModelParams, partner_fields
from .grid import Grid, SpinorField


@dataclass
class BandedSymmetricOperator:
    """Hermitian block-tridiagonal matrix with 2x2 blocks.

    ``diag[i]`` is block (i, i) and ``off[i]`` is block (i, i+1); block
    (i+1, i) is ``off[i]`` conjugate-transposed.  ``grid`` is the grid whose
    nodes index the blocks.
    """

    diag: np.ndarray
    off: np.ndarray
    grid: Grid | None = None
    label: str = ""

    def __post_init__(self):
        self.diag = np.ascontiguousarray(self.diag)
        self.off = np.ascontiguousarray(self.off)
        n = self.diag.shape[0]
        if self.diag.shape != (n, 2, 2) or self.off.shape != (max(n - 1, 0), 2, 2):
            raise ValueError("bad block shapes")

    @property
    def blocks(self) -> int:
        return self.diag.shape[0]

    @property
    def dim(self) -> int:
        return 2 * self.blocks

    @property
    def is_real(self) -> bool:
        return not (np.iscomplexobj(self.diag) or np.iscomplexobj(self.off))

    def matvec(self, x: np.ndarray) -> np.ndarray:
        shape = x.shape
        x = x.reshape(self.blocks, 2, -1)
        y = np.einsum("nij,njk->nik", self.diag, x)
        y[:-1] += np.einsum("nij,njk->nik", self.off, x[1:])
        y[1:] += np.einsum("nji,njk->nik", self.off.conj(), x[:-1])
        return y.reshape(shape)

    def apply(self, psi: SpinorField) -> SpinorField:
        if self.grid is not None and psi.grid != self.grid:
            raise ValueError("field and operator live on different grids")
        return SpinorField(self.matvec(psi.values.reshape(-1)).reshape(-1, 2), psi.grid)

    def to_sparse(self) -> sps.csr_matrix:
        n = self.blocks
        idx = np.arange(n)
        d = sps.bsr_matrix((self.diag, idx, np.arange(n + 1)), shape=(2 * n, 2 * n))
        if n == 1:
            return d.tocsr()
        up = sps.bsr_matrix(
            (self.off, np.arange(1, n), np.r_[np.arange(n), n - 1]), shape=(2 * n, 2 * n)
        )
        return (d + up + up.conj().T).tocsr()

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def to_banded(self) -> np.ndarray:
        """Lower band storage (4, 2n) as used by LAPACK ``?sbev``."""
        n2 = self.dim
        dense_diags = self.to_sparse()
        ab = np.zeros((4, n2), dtype=self.diag.dtype)
        for d in range(4):
            ab[d, : n2 - d] = dense_diags.diagonal(-d)
        return ab

    def symmetry_defect(self) -> float:
        """max |H - H^dagger| over the stored blocks."""
        return float(np.max(np.abs(self.diag - self.diag.conj().transpose(0, 2, 1))))

    def norm_bound(self) -> float:
        """Gershgorin bound on the spectral radius."""
        rows = np.abs(self.diag).sum(axis=2)
        rows[:-1] += np.abs(self.off).sum(axis=2)
        rows[1:] += np.abs(self.off).sum(axis=1)
        return float(rows.max())

    def gershgorin(self) -> tuple[float, float]:
        centre = np.real(np.einsum("nii->ni", self.diag))
        radius = np.abs(self.diag).sum(axis=2) - np.abs(np.einsum("nii->ni", self.diag))
        radius[:-1] += np.abs(self.off).sum(axis=2)
        radius[1:] += np.abs(self.off).sum(axis=1)
        return float((centre - radius).min()), float((centre + radius).max())

    def block_diag_with(self, other: "BandedSymmetricOperator") -> "BandedSymmetricOperator":
        """diag(self, other) with a zero coupling block."""
        zero = np.zeros((1, 2, 2), dtype=np.result_type(self.off, other.off))
        return BandedSymmetricOperator(
            np.concatenate([self.diag, other.diag]),
            np.concatenate([self.off, zero, other.off]),
            None,
            f"{self.label}+{other.label}",
        )


@dataclass
class LoweringOperator:
    """Discrete A- from the nodes of ``grid`` to its interior links.

    Link i couples nodes i and i+1 through ``left[i]`` and ``right[i]``.
    """

    left: np.ndarray
    right: np.ndarray
    grid: Grid

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """A- on node values of shape (N, 2[, k])."""
        return np.einsum("nij,nj...->ni...", self.left, psi[:-1]) + np.einsum(
            "nij,nj...->ni...", self.right, psi[1:]
        )

    def apply_adjoint(self, phi: np.ndarray) -> np.ndarray:
        """A+ on link values of shape (N-1, 2[, k])."""
        lh = self.left.conj().transpose(0, 2, 1)
        rh = self.right.conj().transpose(0, 2, 1)
        out = np.zeros((self.grid.points,) + phi.shape[1:], dtype=np.result_type(phi, lh))
        out[:-1] += np.einsum("nij,nj...->ni...", lh, phi)
        out[1:] += np.einsum("nij,nj...->ni...", rh, phi)
        return out

    def to_sparse(self) -> sps.csr_matrix:
        m = self.left.shape[0]
        n = self.grid.points
        blocks = np.empty((2 * m, 2, 2), dtype=self.left.dtype)
        blocks[0::2] = self.left
        blocks[1::2] = self.right
        indices = np.empty(2 * m, dtype=int)
        indices[0::2] = np.arange(m)
        indices[1::2] = np.arange(1, m + 1)
        return sps.bsr_matrix((blocks, indices, np.arange(0, 2 * m + 1, 2)), shape=(2 * m, 2 * n)).tocsr()

    def minus(self, label="H-") -> BandedSymmetricOperator:
        """H- = A+ A- on the nodes."""
        L, R = self.left, self.right
        LH = L.conj().transpose(0, 2, 1)
        RH = R.conj().transpose(0, 2, 1)
        n = self.grid.points
        diag = np.zeros((n, 2, 2), dtype=L.dtype)
        diag[:-1] += LH @ L
        diag[1:] += RH @ R
        off = LH @ R
        return BandedSymmetricOperator(diag, off, self.grid, label)

    def plus(self, label="H+") -> BandedSymmetricOperator:
        """H+ = A- A+ on the links (nodes of ``grid.dual()``)."""
        L, R = self.left, self.right
        LH = L.conj().transpose(0, 2, 1)
        RH = R.conj().transpose(0, 2, 1)
        diag = L @ LH + R @ RH
        off = R[:-1] @ LH[1:]
        return BandedSymmetricOperator(diag, off, self.grid.dual(), label)


def lowering_operator(
    params: ModelParams, grid: Grid, *, family=CASE2, frame=DEFAULT_FRAME
) -> LoweringOperator:
    ms = MatrixSuperpotential(params, family, frame)
    Mk = ms(grid.links)
    eye = np.eye(2) / grid.spacing
    return LoweringOperator(-eye + 0.5 * Mk, eye + 0.5 * Mk, grid)


def discretize_factorized(
    params: ModelParams, grid: Grid, which: str = "minus", *, family=CASE2, frame=DEFAULT_FRAME
) -> BandedSymmetricOperator:
    """Adjoint-exact H- (node space) or H+ (link space)."""
    op = lowering_operator(params, grid, family=family, frame=frame)
    if which == "minus":
        return op.minus()
    if which == "plus":
        return op.plus()
    raise ValueError(f"which must be 'minus' or 'plus', got {which!r}")


def discretize_direct(
    params: ModelParams,
    grid: Grid,
    which: str = "minus",
    *,
    family=CASE2,
    frame=DEFAULT_FRAME,
    scalar_override=None,
) -> BandedSymmetricOperator:
    """-d^2/dz^2 (3-point, Dirichlet) + V(z) + B(z) . S sampled on the nodes.

    ``scalar_override`` replaces the scalar potential callable; it exists to
    reproduce deliberately wrong potentials in the verification suite.
    """
    if which not in ("minus", "plus"):
        raise ValueError(f"which must be 'minus' or 'plus', got {which!r}")
    pf = partner_fields(params, frame, family)
    z = grid.nodes
    h2 = grid.spacing**2
    V = (scalar_override or pf.scalar(which))(z)
    B = pf.magnetic(which)(z)
    spin = sum(B[:, k, None, None] * frame.spin(np.eye(3)[k]) for k in range(3))
    if frame.is_real:
        spin = spin.real
    diag = (2.0 / h2 + V)[:, None, None] * np.eye(2) + spin
    off = np.broadcast_to(-np.eye(2) / h2, (grid.points - 1, 2, 2)).copy()
    return BandedSymmetricOperator(diag, off, grid, f"direct {which}")


def laplacian_dirichlet(grid: Grid) -> BandedSymmetricOperator:
    """Two uncoupled copies of the 3-point Dirichlet -d^2/dz^2."""
    h2 = grid.spacing**2
    diag = np.broadcast_to(2.0 / h2 * np.eye(2), (grid.points, 2, 2)).copy()
    off = np.broadcast_to(-np.eye(2) / h2, (grid.points - 1, 2, 2)).copy()
    return BandedSymmetricOperator(diag, off, grid, "laplacian")
