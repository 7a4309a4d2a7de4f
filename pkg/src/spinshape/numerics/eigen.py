"""Lowest eigenpairs of real symmetric block-tridiagonal operators.

Eigenvalues come from bisection on inertia counts: the block LDL^T
factorization of H - sigma with 2x2 pivots gives, by Sylvester's law, the
number of eigenvalues below sigma as the number of negative eigenvalues of
the pivots.  Eigenvectors come from inverse iteration with the same
factorization; eigenvalues closer than the cluster gap are iterated as one
block and orthonormalized jointly.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np

from .operators import BandedSymmetricOperator

EPS = np.finfo(float).eps


class FactorizationBreakdown(ArithmeticError):
    pass


class EigenSolverError(RuntimeError):
    pass


@numba.njit(cache=True, nogil=True)
def _inertia(diag, off, sigma):
    """Eigenvalues of H below sigma, or -1 if a pivot block is singular."""
    n = diag.shape[0]
    p = diag[0, 0, 0] - sigma
    q = diag[0, 0, 1]
    r = diag[0, 1, 1] - sigma
    count = 0
    for i in range(n):
        if i > 0:
            det = p * r - q * q
            scale = p * p + 2.0 * q * q + r * r
            if det == 0.0 or abs(det) < 1e-300 or abs(det) < 1e-30 * scale:
                return -1
            # inverse of the previous pivot
            i00 = r / det
            i01 = -q / det
            i11 = p / det
            b00 = off[i - 1, 0, 0]
            b01 = off[i - 1, 0, 1]
            b10 = off[i - 1, 1, 0]
            b11 = off[i - 1, 1, 1]
            # X = D^-1 B
            x00 = i00 * b00 + i01 * b10
            x01 = i00 * b01 + i01 * b11
            x10 = i01 * b00 + i11 * b10
            x11 = i01 * b01 + i11 * b11
            # S = B^T X
            s00 = b00 * x00 + b10 * x10
            s01 = b00 * x01 + b10 * x11
            s11 = b01 * x01 + b11 * x11
            p = diag[i, 0, 0] - sigma - s00
            q = 0.5 * (diag[i, 0, 1] + diag[i, 1, 0]) - s01
            r = diag[i, 1, 1] - sigma - s11
        det = p * r - q * q
        if det < 0.0:
            count += 1
        elif det > 0.0:
            if p + r < 0.0:
                count += 2
        else:
            return -1
    return count


@numba.njit(cache=True, nogil=True)
def _factor(diag, off, sigma, piv_inv, ell):
    """Block LDL^T of H - sigma.  Stores D_i^-1 and L_{i,i-1}; False on breakdown."""
    n = diag.shape[0]
    p = diag[0, 0, 0] - sigma
    q = 0.5 * (diag[0, 0, 1] + diag[0, 1, 0])
    r = diag[0, 1, 1] - sigma
    for i in range(n):
        if i > 0:
            b00 = off[i - 1, 0, 0]
            b01 = off[i - 1, 0, 1]
            b10 = off[i - 1, 1, 0]
            b11 = off[i - 1, 1, 1]
            i00 = piv_inv[i - 1, 0, 0]
            i01 = piv_inv[i - 1, 0, 1]
            i11 = piv_inv[i - 1, 1, 1]
            # ell_i = B^T D^-1
            l00 = b00 * i00 + b10 * i01
            l01 = b00 * i01 + b10 * i11
            l10 = b01 * i00 + b11 * i01
            l11 = b01 * i01 + b11 * i11
            ell[i, 0, 0] = l00
            ell[i, 0, 1] = l01
            ell[i, 1, 0] = l10
            ell[i, 1, 1] = l11
            p = diag[i, 0, 0] - sigma - (l00 * b00 + l01 * b10)
            q = 0.5 * (diag[i, 0, 1] + diag[i, 1, 0]) - (l00 * b01 + l01 * b11)
            r = diag[i, 1, 1] - sigma - (l10 * b01 + l11 * b11)
        det = p * r - q * q
        scale = p * p + 2.0 * q * q + r * r
        if det == 0.0 or abs(det) < 1e-300 or abs(det) < 1e-30 * scale:
            return False
        piv_inv[i, 0, 0] = r / det
        piv_inv[i, 0, 1] = -q / det
        piv_inv[i, 1, 0] = -q / det
        piv_inv[i, 1, 1] = p / det
    return True


@numba.njit(cache=True, nogil=True)
def _solve(off, piv_inv, ell, rhs):
    """Solve (L D L^T) x = rhs in place for rhs of shape (n, 2, m)."""
    n = rhs.shape[0]
    m = rhs.shape[2]
    for i in range(1, n):
        for k in range(m):
            y0 = rhs[i - 1, 0, k]
            y1 = rhs[i - 1, 1, k]
            rhs[i, 0, k] -= ell[i, 0, 0] * y0 + ell[i, 0, 1] * y1
            rhs[i, 1, k] -= ell[i, 1, 0] * y0 + ell[i, 1, 1] * y1
    for i in range(n):
        for k in range(m):
            y0 = rhs[i, 0, k]
            y1 = rhs[i, 1, k]
            rhs[i, 0, k] = piv_inv[i, 0, 0] * y0 + piv_inv[i, 0, 1] * y1
            rhs[i, 1, k] = piv_inv[i, 1, 0] * y0 + piv_inv[i, 1, 1] * y1
    for i in range(n - 2, -1, -1):
        for k in range(m):
            x0 = rhs[i + 1, 0, k]
            x1 = rhs[i + 1, 1, k]
            # ell_{i+1}^T x_{i+1}
            rhs[i, 0, k] -= ell[i + 1, 0, 0] * x0 + ell[i + 1, 1, 0] * x1
            rhs[i, 1, k] -= ell[i + 1, 0, 1] * x0 + ell[i + 1, 1, 1] * x1


def worker_count() -> int:
    """Worker threads for bisection, from SPINSHAPE_THREADS (default 1)."""
    raw = os.environ.get("SPINSHAPE_THREADS", "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def _real_blocks(op: BandedSymmetricOperator):
    if not op.is_real:
        raise ValueError("the banded eigensolver handles real symmetric operators only")
    return np.ascontiguousarray(op.diag, dtype=float), np.ascontiguousarray(op.off, dtype=float)


def count_below(op: BandedSymmetricOperator, sigma: float, *, retries: int = 8) -> int:
    """Number of eigenvalues strictly below ``sigma``.

    A singular pivot means sigma sits on an eigenvalue of a leading block; the
    shift is then nudged by a few ulps of the spectral scale and retried.
    """
    diag, off = _real_blocks(op)
    return _count(diag, off, sigma, op.norm_bound(), retries)


def _count(diag, off, sigma, scale, retries=8):
    bump = 4 * EPS * max(scale, 1.0)
    for attempt in range(retries + 1):
        c = _inertia(diag, off, sigma + attempt * bump)
        if c >= 0:
            return c
    raise FactorizationBreakdown(f"inertia count failed at sigma={sigma!r}")


def _bisect_indices(diag, off, indices, lo, hi, abs_tol, scale):
    """Bisection for the eigenvalues with the given (sorted) 0-based indices."""
    lower = {j: lo for j in indices}
    upper = {j: hi for j in indices}
    out = {}
    for j in indices:
        a, b = lower[j], upper[j]
        while b - a > max(abs_tol, 4 * EPS * max(abs(a), abs(b))):
            mid = 0.5 * (a + b)
            c = _count(diag, off, mid, scale)
            # c eigenvalues lie below mid: indices < c are below, the rest above
            for m in indices:
                if m < c:
                    upper[m] = min(upper[m], mid)
                else:
                    lower[m] = max(lower[m], mid)
            a, b = lower[j], upper[j]
        out[j] = 0.5 * (a + b)
    return out


def eigenvalues_lowest(
    op: BandedSymmetricOperator, k: int, tol: float = 1e-14, *, workers: int | None = None
) -> np.ndarray:
    """The k smallest eigenvalues, each to absolute accuracy tol * ||H||."""
    if k < 1 or k > op.dim:
        raise ValueError(f"k must lie in [1, {op.dim}]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    diag, off = _real_blocks(op)
    lo, hi = op.gershgorin()
    scale = max(abs(lo), abs(hi), 1e-300)
    lo -= 2 * EPS * scale
    hi += 2 * EPS * scale
    abs_tol = tol * scale
    indices = list(range(k))
    workers = workers or worker_count()
    if workers <= 1 or k == 1:
        found = _bisect_indices(diag, off, indices, lo, hi, abs_tol, scale)
    else:
        chunks = [indices[i::workers] for i in range(workers) if indices[i::workers]]
        found = {}
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            for part in pool.map(lambda ch: _bisect_indices(diag, off, ch, lo, hi, abs_tol, scale), chunks):
                found.update(part)
    return np.array([found[j] for j in indices])


def eigenvalues_in(op: BandedSymmetricOperator, upper: float, tol: float = 1e-12) -> np.ndarray:
    """All eigenvalues strictly below ``upper``."""
    k = count_below(op, upper)
    if k == 0:
        return np.empty(0)
    return eigenvalues_lowest(op, k, tol)


@dataclass
class Eigenpairs:
    values: np.ndarray
    vectors: np.ndarray  # (dim, k), columns orthonormal in the Euclidean sense
    residuals: np.ndarray
    converged: np.ndarray
    scale: float = 1.0
    clusters: list = field(default_factory=list)

    def __iter__(self):
        return iter(zip(self.values, self.vectors.T))

    def __len__(self):
        return len(self.values)


def _group(values, gap):
    groups = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[groups[-1][-1]] < gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def eigen_lowest(
    op: BandedSymmetricOperator,
    k: int,
    tol: float = 1e-14,
    *,
    max_iter: int = 8,
    seed: int = 20260417,
    workers: int | None = None,
) -> Eigenpairs:
    """k smallest eigenpairs by bisection plus (block) inverse iteration."""
    values = eigenvalues_lowest(op, k, tol, workers=workers)
    diag, off = _real_blocks(op)
    n = op.blocks
    lo, hi = op.gershgorin()
    scale = max(abs(lo), abs(hi))
    cluster_gap = 10 * tol * scale
    # neighbours this close are also re-orthogonalized against each other
    reorth_gap = 1e-3 * scale
    rng = np.random.default_rng(seed)
    piv_inv = np.empty((n, 2, 2))
    ell = np.zeros((n, 2, 2))
    vectors = np.zeros((2 * n, k))
    residuals = np.zeros(k)
    converged = np.zeros(k, dtype=bool)
    res_tol = max(100 * tol, 1e-10) * scale
    clusters = _group(values, cluster_gap)

    for members in clusters:
        m = len(members)
        lam = values[members].mean()
        shift_step = max(tol * scale, 16 * EPS * scale)
        sigma = lam - shift_step
        for attempt in range(8):
            if _factor(diag, off, sigma, piv_inv, ell):
                break
            sigma -= shift_step * (attempt + 2)
        else:
            raise FactorizationBreakdown(f"cannot factor near eigenvalue {lam!r}")
        X = rng.standard_normal((2 * n, m))
        done = False
        for _ in range(max_iter):
            prev = [j for j in range(members[0]) if abs(values[j] - lam) < reorth_gap]
            Y = X.reshape(n, 2, m).copy()
            _solve(off, piv_inv, ell, Y)
            X = Y.reshape(2 * n, m)
            if prev:
                P = vectors[:, prev]
                X -= P @ (P.T @ X)
            X, _ = np.linalg.qr(X)
            HX = op.matvec(X)
            C = X.T @ HX
            w, U = np.linalg.eigh(0.5 * (C + C.T))
            X = X @ U
            HX = HX @ U
            R = HX - X * w
            res = np.linalg.norm(R, axis=0)
            if np.all(res <= res_tol):
                done = True
                break
        for col, j in enumerate(members):
            vectors[:, j] = X[:, col]
            residuals[j] = res[col]
            converged[j] = done or res[col] <= res_tol
    return Eigenpairs(values, vectors, residuals, converged, scale, clusters)
