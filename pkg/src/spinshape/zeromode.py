"""Zero modes of A-: solutions of psi' = -M(z) psi that decay at both ends."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import NotABoundState
from .fields import CASE2, DEFAULT_FRAME, MatrixSuperpotential, ModelParams, TanhFamily
from .numerics.grid import Grid, SpinorField, inner_product

# central 8th-order first-derivative stencil
_D8 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
_RENORM = 1e100


class DegenerateKernelError(RuntimeError):
    """The two integrated zero modes are numerically dependent."""


@dataclass(frozen=True)
class DecayRates:
    plus_inf: tuple[float, float]
    minus_inf: tuple[float, float]


def asymptotic_decay_rates(gamma_n: float, beta_n: float) -> DecayRates:
    """Decay rates gamma_n +/- beta_n/2 of the kernel channels at z -> +/-inf.

    At +inf the channel (1, -1) decays at gamma_n - beta_n/2 and (1, 1) at
    gamma_n + beta_n/2; at -inf the roles swap.
    """
    if not gamma_n > abs(beta_n) / 2:
        raise NotABoundState(
            f"gamma_n={gamma_n:g} <= |beta_n|/2={abs(beta_n) / 2:g}: zero modes are not normalizable"
        )
    return DecayRates(
        plus_inf=(gamma_n + beta_n / 2, gamma_n - beta_n / 2),
        minus_inf=(gamma_n - beta_n / 2, gamma_n + beta_n / 2),
    )


def _gate(params_n: ModelParams, family):
    if isinstance(family, TanhFamily):
        asymptotic_decay_rates(params_n.gamma, params_n.beta)


def _half_points(grid: Grid) -> np.ndarray:
    # -L, -L + h/2, ..., z_N: same (half-)integer multiples of h as the nodes
    j = np.arange(2 * grid.points + 1)
    return (0.5 * j - 0.5 * (grid.points + 1)) * grid.spacing


def seed_vectors(params_n: ModelParams, grid: Grid, *, family=CASE2, frame=DEFAULT_FRAME) -> np.ndarray:
    """Starting spinors (columns) for the two integrations.

    Column 0 is the eigenvector of M(-L) with the lowest eigenvalue, the
    channel growing fastest away from the left wall; column 1 is the
    eigenvector of M(+L) with the highest eigenvalue, growing fastest away
    from the right wall.  Each seed is integrated in its stable direction.
    """
    ms = MatrixSuperpotential(params_n, family, frame)
    L = grid.half_width
    _, left = np.linalg.eigh(ms(np.array([-L]))[0])
    _, right = np.linalg.eigh(ms(np.array([L]))[0])
    return np.stack([left[:, 0], right[:, -1]], axis=1).astype(complex)


def rk4_integrate(
    matrix_at, grid: Grid, y0: np.ndarray, sign: float = -1.0
) -> tuple[np.ndarray, float]:
    """Fixed-step RK4 for y' = sign * K(z) y from z = -L across all nodes.

    ``matrix_at`` holds K at the half-step points of ``_half_points``.  The
    running solution is rescaled whenever it exceeds 1e100; earlier samples
    are rescaled with it and the accumulated log factor is returned.
    """
    h = grid.spacing
    n = grid.points
    K = sign * matrix_at
    out = np.empty((n, 2), dtype=complex)
    y = np.asarray(y0, dtype=complex).copy()
    log_scale = 0.0
    for i in range(n):
        Ka, Km, Kb = K[2 * i], K[2 * i + 1], K[2 * i + 2]
        k1 = Ka @ y
        k2 = Km @ (y + 0.5 * h * k1)
        k3 = Km @ (y + 0.5 * h * k2)
        k4 = Kb @ (y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        size = np.abs(y).max()
        if size > _RENORM:
            y /= size
            out[:i] /= size
            log_scale += np.log(size)
        out[i] = y
    return out, log_scale


def integrate_zero_mode(
    grid: Grid, params_n: ModelParams, seed: int = 0, *, family=CASE2, frame=DEFAULT_FRAME
) -> SpinorField:
    """Normalized solution of A- psi = 0.

    Seed 0 starts at z = -L and runs right, seed 1 starts at z = +L and runs
    left, so that neither integration loses its solution to roundoff.
    """
    _gate(params_n, family)
    if seed not in (0, 1):
        raise ValueError("seed must be 0 or 1")
    if grid.nodes[0] != -grid.nodes[-1]:
        raise ValueError("zero modes need a reflection-symmetric grid")
    ms = MatrixSuperpotential(params_n, family, frame)
    y0 = seed_vectors(params_n, grid, family=family, frame=frame)[:, seed]
    zs = _half_points(grid)
    if seed == 0:
        values, log_scale = rk4_integrate(ms(zs), grid, y0, sign=-1.0)
    else:
        # s = -z turns psi' = -M psi into dpsi/ds = +M(-s) psi
        values, log_scale = rk4_integrate(ms(-zs), grid, y0, sign=1.0)
        values = values[::-1].copy()
    psi = SpinorField(values, grid, log_scale, {"seed": seed})
    return psi.normalized()


def derivative8(values: np.ndarray, h: float) -> np.ndarray:
    """d/dz on the interior nodes (4 dropped at each end)."""
    n = len(values)
    return sum(c * values[k : n - 8 + k] for k, c in enumerate(_D8) if c != 0) / h


def annihilation_residual(
    psi: SpinorField, params_n: ModelParams, *, family=CASE2, frame=DEFAULT_FRAME
) -> float:
    """max |psi' + M psi| / max |psi| with psi' from the 8th-order stencil."""
    M = MatrixSuperpotential(params_n, family, frame)(psi.z[4:-4])
    r = derivative8(psi.values, psi.grid.spacing) + np.einsum("nij,nj->ni", M, psi.values[4:-4])
    return float(np.abs(r).max() / np.abs(psi.values).max())


def fit_tail_rates(psi: SpinorField, window=(1.0, 5.0), component: int | None = None) -> tuple[float, float]:
    """Fitted exponential decay rates (left, right) on L - 5 <= |z| <= L - 1.

    With ``component`` None the spinor norm is fitted.
    """
    z = psi.z
    L = psi.grid.half_width
    amp = np.linalg.norm(psi.values, axis=1) if component is None else np.abs(psi.values[:, component])
    rates = []
    for side in (-1, 1):
        sel = (side * z >= L - window[1]) & (side * z <= L - window[0])
        slope = np.polyfit(z[sel], np.log(amp[sel]), 1)[0]
        rates.append(-side * slope)
    return rates[0], rates[1]


@dataclass
class ZeroModePair:
    psi_1: SpinorField
    psi_2: SpinorField
    decay_rates: tuple[float, float, float, float]  # (left, right) for each seed
    residual: float
    gram_determinant: float
    params: ModelParams

    def __iter__(self):
        return iter((self.psi_1, self.psi_2))


def zero_mode_pair(
    grid: Grid, params_n: ModelParams, *, family=CASE2, frame=DEFAULT_FRAME, gram_min: float = 1e-10
) -> ZeroModePair:
    """Orthonormal basis of the two-dimensional kernel of A-(gamma_n, beta_n)."""
    _gate(params_n, family)
    raw = [integrate_zero_mode(grid, params_n, s, family=family, frame=frame) for s in (0, 1)]
    rates = tuple(r for psi in raw for r in fit_tail_rates(psi))
    overlap = inner_product(raw[0], raw[1])
    gram = 1.0 - abs(overlap) ** 2
    if gram < gram_min:
        raise DegenerateKernelError(f"Gram determinant {gram:.3g} < {gram_min:g}; enlarge the box")
    first = raw[0]
    second = SpinorField(raw[1].values - overlap * first.values, grid).normalized()
    residual = max(annihilation_residual(p, params_n, family=family, frame=frame) for p in raw)
    return ZeroModePair(first, second, rates, residual, gram, params_n)


def to_phi(psi: SpinorField, params_n: ModelParams) -> SpinorField:
    """phi = psi exp(+int gamma_n tanh) = psi cosh^gamma_n(z), tanh family only."""
    weight = np.exp(params_n.gamma * np.log(np.cosh(psi.z)))
    return SpinorField(psi.values * weight[:, None], psi.grid)


def phi_system_matrix(z, params_n: ModelParams, frame=DEFAULT_FRAME) -> np.ndarray:
    """(g(z) a + beta_n b) . S, the generator of phi' = -K phi."""
    z = np.asarray(z, dtype=float)
    g = CASE2.g(z, params_n.field_lambda)
    K = g[..., None, None] * frame.spin(frame.a) + params_n.beta * frame.spin(frame.b)
    return K.real.copy() if frame.is_real else K


def phi_residual(phi: SpinorField, params_n: ModelParams, *, frame=DEFAULT_FRAME, zmax: float | None = None) -> float:
    """max |phi' + (g a + beta_n b) . S phi| / max |phi|, optionally on |z| <= zmax."""
    z = phi.z[4:-4]
    K = phi_system_matrix(z, params_n, frame)
    r = derivative8(phi.values, phi.grid.spacing) + np.einsum("nij,nj->ni", K, phi.values[4:-4])
    sel = np.ones(len(z), bool) if zmax is None else np.abs(z) <= zmax
    return float(np.abs(r[sel]).max() / np.abs(phi.values[4:-4][sel]).max())


def integrate_phi(grid: Grid, params_n: ModelParams, phi_start, *, frame=DEFAULT_FRAME) -> SpinorField:
    """RK4 solution of phi' = -(g a + beta_n b) . S phi from phi(-L) = phi_start."""
    K = phi_system_matrix(_half_points(grid), params_n, frame)
    values, log_scale = rk4_integrate(K, grid, np.asarray(phi_start, dtype=complex), sign=-1.0)
    return SpinorField(values, grid, log_scale)
