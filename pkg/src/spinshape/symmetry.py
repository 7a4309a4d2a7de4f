"""Discrete symmetry operators T = I sigma_y and R (complex conjugation), the
relations they satisfy with A+/- and H-/+, and the N=2 supercharge algebra.

Relations are measured operator-on-basis: each side is applied to a fixed set
of smooth probe spinors and the worst grid-norm defect is reported.  Smooth
probes keep the scale of the check at the physical size of H instead of its
~4/h^2 lattice norm.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps

from .fields import CASE2, DEFAULT_FRAME, SIGMA_Y, ModelParams
from .numerics.grid import Grid, SpinorField
from .numerics.operators import lowering_operator


class AsymmetricGridError(ValueError):
    pass


def _check_symmetric(grid: Grid):
    z = grid.nodes
    if not np.array_equal(z, -z[::-1]):
        raise AsymmetricGridError("T needs a grid symmetric under z -> -z")


def apply_T(psi: SpinorField) -> SpinorField:
    """(T psi)(z) = sigma_y psi(-z)."""
    _check_symmetric(psi.grid)
    vals = psi.values[::-1] @ SIGMA_Y.T
    return SpinorField(vals, psi.grid, psi.log_scale)


def apply_R(psi: SpinorField) -> SpinorField:
    return SpinorField(psi.values.conj(), psi.grid, psi.log_scale)


def t_matrix(grid: Grid) -> sps.csr_matrix:
    """T as a sparse matrix on interleaved (node, spin) vectors."""
    _check_symmetric(grid)
    flip = sps.csr_matrix(np.eye(grid.points)[::-1])
    return sps.kron(flip, sps.csr_matrix(SIGMA_Y)).tocsr()


def probe_basis(grid: Grid) -> np.ndarray:
    """Smooth test spinors as columns of a (2N, m) array, unit grid norm each.

    Gaussians of two widths and three centres, times 1, z, and a plane wave,
    in three spin directions.  None of them is T- or R-symmetric.
    """
    z = grid.nodes
    spins = [np.array([1, 0]), np.array([0, 1]), np.array([1, 0.6j]) / np.hypot(1, 0.6)]
    cols = []
    for c in (-1.7, 0.0, 0.9):
        for w in (0.8, 2.0):
            env = np.exp(-((z - c) / w) ** 2)
            for shape in (env, (z - c) * env, np.exp(1.3j * z) * env):
                for s in spins:
                    v = (shape[:, None] * s[None, :]).reshape(-1)
                    cols.append(v / np.sqrt(grid.spacing * np.vdot(v, v).real))
    return np.stack(cols, axis=1)


def _worst(op, probes, h) -> float:
    """max over probes of the grid norm of op(probe); probes have unit norm."""
    out = op(probes)
    return float(np.sqrt(h * (np.abs(out) ** 2).sum(axis=0)).max())


@dataclass
class AlgebraReport:
    anticommutator_TA: float
    anticommutator_TR: float
    commutator_RA: float
    commutator_TH: float
    commutator_RH: float
    supercharge_identities: tuple[float, float, float]
    supercharge_commutators: tuple[float, float] = (0.0, 0.0)
    h_scale: float = 1.0
    h_norm: float = 1.0
    q_norm: float = 1.0
    extra: dict = field(default_factory=dict)

    def residuals(self) -> dict[str, float]:
        anti, sq_p, sq_m = self.supercharge_identities
        cp, cm = self.supercharge_commutators
        return {
            "anticommutator_TA": self.anticommutator_TA,
            "anticommutator_TR": self.anticommutator_TR,
            "commutator_RA": self.commutator_RA,
            "commutator_TH": self.commutator_TH,
            "commutator_RH": self.commutator_RH,
            "anticommutator_QQ": anti,
            "square_Qplus": sq_p,
            "square_Qminus": sq_m,
            "commutator_QplusH": cp,
            "commutator_QminusH": cm,
        }

    def relative(self) -> dict[str, float]:
        """Residuals over h_scale; [Q, H] over the lattice norms |Q| |H|.

        [Q, H] = 0 cancels products of two lattice operators exactly, so its
        rounding floor is set by their lattice norms rather than by H on
        smooth probes.
        """
        out = {k: v / self.h_scale for k, v in self.residuals().items()}
        for k in ("commutator_QplusH", "commutator_QminusH"):
            out[k] = self.residuals()[k] / (self.h_norm * self.q_norm)
        return out

    def failures(self, tol: float = 1e-12) -> list[str]:
        return [k for k, v in self.relative().items() if not v < tol]

    def passed(self, tol: float = 1e-12) -> bool:
        return not self.failures(tol)


def supersymmetric_operators(params: ModelParams, grid: Grid, *, family=CASE2, frame=DEFAULT_FRAME):
    """Sparse (H, Q+, Q-) on the stacked space (links of H+, nodes of H-).

    Q+ = A- (x) sigma+ maps the H- sector into the H+ sector, Q- = A+ (x) sigma-
    maps back; H = diag(H+, H-) uses the banded partner Hamiltonians.
    """
    low = lowering_operator(params, grid, family=family, frame=frame)
    A = low.to_sparse()
    m, n = A.shape
    Hp = low.plus().to_sparse()
    Hm = low.minus().to_sparse()
    H = sps.block_diag([Hp, Hm]).tocsr()
    Qp = sps.bmat([[sps.csr_matrix((m, m)), A], [None, sps.csr_matrix((n, n))]]).tocsr()
    Qm = Qp.conj().T.tocsr()
    return H, Qp, Qm


def algebra_check(params: ModelParams, grid: Grid, *, family=CASE2, frame=DEFAULT_FRAME) -> AlgebraReport:
    """Residuals of the T/R relations and of the supercharge algebra."""
    _check_symmetric(grid)
    low = lowering_operator(params, grid, family=family, frame=frame)
    A = low.to_sparse()
    Ad = A.conj().T.tocsr()
    Hm = low.minus().to_sparse()
    Hp = low.plus().to_sparse()
    Tn = t_matrix(grid)
    Tl = t_matrix(grid.dual())
    h = grid.spacing
    nodes = probe_basis(grid)
    links = probe_basis(grid.dual())

    ta = max(
        _worst(lambda x: Tl @ (A @ x) + A @ (Tn @ x), nodes, h),
        _worst(lambda x: Tn @ (Ad @ x) + Ad @ (Tl @ x), links, h),
    )
    tr = max(
        _worst(lambda x: Tn @ x.conj() + (Tn @ x).conj(), nodes, h),
        _worst(lambda x: Tl @ x.conj() + (Tl @ x).conj(), links, h),
    )
    ra = max(
        _worst(lambda x: A @ x.conj() - (A @ x).conj(), nodes, h),
        _worst(lambda x: Ad @ x.conj() - (Ad @ x).conj(), links, h),
    )
    th = max(
        _worst(lambda x: Tn @ (Hm @ x) - Hm @ (Tn @ x), nodes, h),
        _worst(lambda x: Tl @ (Hp @ x) - Hp @ (Tl @ x), links, h),
    )
    rh = max(
        _worst(lambda x: Hm @ x.conj() - (Hm @ x).conj(), nodes, h),
        _worst(lambda x: Hp @ x.conj() - (Hp @ x).conj(), links, h),
    )

    H, Qp, Qm = supersymmetric_operators(params, grid, family=family, frame=frame)
    stacked = np.concatenate([links, np.zeros((nodes.shape[0], links.shape[1]))], axis=0)
    stacked = np.concatenate(
        [stacked, np.concatenate([np.zeros((links.shape[0], nodes.shape[1])), nodes], axis=0)], axis=1
    )
    anti = _worst(lambda x: Qp @ (Qm @ x) + Qm @ (Qp @ x) - H @ x, stacked, h)
    sq_p = _worst(lambda x: Qp @ (Qp @ x), stacked, h)
    sq_m = _worst(lambda x: Qm @ (Qm @ x), stacked, h)
    cp = _worst(lambda x: Qp @ (H @ x) - H @ (Qp @ x), stacked, h)
    cm = _worst(lambda x: Qm @ (H @ x) - H @ (Qm @ x), stacked, h)

    scale = max(_worst(lambda x: Hm @ x, nodes, h), _worst(lambda x: Hp @ x, links, h))
    h_norm = max(low.minus().norm_bound(), low.plus().norm_bound())
    q_norm = float(abs(A).sum(axis=1).max())
    return AlgebraReport(ta, tr, ra, th, rh, (anti, sq_p, sq_m), (cp, cm), scale, h_norm, q_norm)


@dataclass(frozen=True)
class Cluster:
    center: float
    multiplicity: int
    members: tuple[float, ...]

    @property
    def split(self) -> float:
        return max(self.members) - min(self.members)


def degeneracy_report(
    eigenvalues, threshold: float, pair_tol: float, scale: float | None = None
) -> list[Cluster]:
    """Group sorted eigenvalues below ``threshold`` into clusters.

    Neighbours join a cluster when their gap is below ``pair_tol * scale``;
    ``scale`` defaults to max(1, largest |eigenvalue| considered).
    """
    vals = np.asarray(eigenvalues, dtype=float)
    if np.any(np.diff(vals) < 0):
        raise ValueError("eigenvalues must be sorted")
    vals = vals[vals < threshold]
    if scale is None:
        scale = max(1.0, float(np.abs(vals).max())) if len(vals) else 1.0
    clusters: list[list[float]] = []
    for v in vals:
        if clusters and v - clusters[-1][-1] < pair_tol * scale:
            clusters[-1].append(float(v))
        else:
            clusters.append([float(v)])
    return [Cluster(float(np.mean(c)), len(c), tuple(c)) for c in clusters]
