"""Superpotentials, vector fields and the shape-invariance parameter flow.

A spin-1/2 particle on a line is described by the first-order operators

    A(+/-) = -/+ d/dz + M(z),    M(z) = W(z) 1 + (V(z) . sigma) / 2,

with the vector field ``V = g(z) a + beta b`` built on two perpendicular
unit vectors ``a`` and ``b``.  Everything here is a pure function of frozen
parameter records.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class FlowError(ValueError):
    """The parameter flow left the region gamma_k > 0."""


@dataclass(frozen=True)
class ModelParams:
    """Superpotential strength ``gamma``, transverse field ``beta`` and the
    amplitude ``field_lambda`` of the profile g(z).  ``level`` records how many
    flow steps produced this record (0 for the physical Hamiltonian)."""

    gamma: float
    beta: float
    field_lambda: float = 0.0
    level: int = 0

    def __post_init__(self):
        for name in ("gamma", "beta", "field_lambda"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.level < 0:
            raise ValueError("level must be non-negative")


@dataclass(frozen=True)
class FrameVectors:
    """Orthonormal pair (a, b); the default puts a along z and b along x."""

    a: tuple[float, float, float] = (0.0, 0.0, 1.0)
    b: tuple[float, float, float] = (1.0, 0.0, 0.0)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.shape != (3,) or b.shape != (3,):
            raise ValueError("frame vectors must be 3-vectors")
        if abs(a @ a - 1) > 1e-12 or abs(b @ b - 1) > 1e-12 or abs(a @ b) > 1e-12:
            raise ValueError("frame vectors must be orthonormal")

    def spin(self, v) -> np.ndarray:
        """Return v . sigma / 2 as a 2x2 matrix."""
        return 0.5 * sum(c * s for c, s in zip(v, PAULI))

    @property
    def is_real(self) -> bool:
        # sigma_y is the only imaginary Pauli matrix
        return self.a[1] == 0 and self.b[1] == 0


DEFAULT_FRAME = FrameVectors()


@dataclass(frozen=True)
class TanhFamily:
    """W = gamma tanh(z - shift), g = lambda / cosh z, gamma_1 = gamma - 1.

    A nonzero ``shift`` breaks the parity of W and only exists to build
    negative controls for the symmetry checks.
    """

    shift: float = 0.0
    name: str = "tanh"

    def W(self, z, gamma):
        return gamma * np.tanh(np.subtract(z, self.shift))

    def dW(self, z, gamma):
        return gamma / np.cosh(np.subtract(z, self.shift)) ** 2

    def g(self, z, field_lambda):
        return field_lambda / np.cosh(z)

    def dg(self, z, field_lambda):
        return -field_lambda * np.tanh(z) / np.cosh(z)

    def step(self, gamma):
        return gamma - 1.0

    def scalar_epsilon(self, gamma_prev, gamma_next):
        return gamma_prev**2 - gamma_next**2


@dataclass(frozen=True)
class LinearFamily:
    """W = gamma z with a constant g = lambda; the flow leaves gamma fixed."""

    name: str = "linear"

    def W(self, z, gamma):
        return gamma * np.asarray(z, dtype=float)

    def dW(self, z, gamma):
        return gamma * np.ones_like(np.asarray(z, dtype=float))

    def g(self, z, field_lambda):
        return field_lambda * np.ones_like(np.asarray(z, dtype=float))

    def dg(self, z, field_lambda):
        return np.zeros_like(np.asarray(z, dtype=float))

    def step(self, gamma):
        return gamma

    def scalar_epsilon(self, gamma_prev, gamma_next):
        return gamma_prev + gamma_next


CASE2 = TanhFamily()
CASE1 = LinearFamily()


def _check_finite(z):
    if not np.all(np.isfinite(z)):
        raise ValueError("z must be finite")


def superpotential_case2(z, gamma: float):
    """gamma * tanh(z); rejects non-finite z."""
    _check_finite(z)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return gamma * np.tanh(z)


def superpotential_case2_derivative(z, gamma: float):
    _check_finite(z)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return gamma / np.cosh(z) ** 2


def g_profile(z, field_lambda: float):
    """lambda / cosh(z); independent of gamma and beta."""
    return field_lambda / np.cosh(z)


@dataclass(frozen=True)
class MatrixSuperpotential:
    """Pointwise M(z) = W(z) 1 + (g(z) a + beta b) . sigma / 2 and M'(z)."""

    params: ModelParams
    family: object = CASE2
    frame: FrameVectors = DEFAULT_FRAME

    @property
    def dtype(self):
        return float if self.frame.is_real else complex

    def _assemble(self, w, gv, bv):
        sa = self.frame.spin(self.frame.a)
        sb = self.frame.spin(self.frame.b)
        w = np.asarray(w, dtype=float)
        out = (
            w[..., None, None] * np.eye(2)
            + np.asarray(gv, dtype=float)[..., None, None] * sa
            + np.asarray(bv, dtype=float)[..., None, None] * sb
        )
        if self.frame.is_real:
            out = out.real.copy()
        return out

    def __call__(self, z):
        p = self.params
        z = np.asarray(z, dtype=float)
        return self._assemble(
            self.family.W(z, p.gamma),
            self.family.g(z, p.field_lambda),
            np.full(z.shape, p.beta),
        )

    def derivative(self, z):
        p = self.params
        z = np.asarray(z, dtype=float)
        return self._assemble(
            self.family.dW(z, p.gamma), self.family.dg(z, p.field_lambda), np.zeros(z.shape)
        )


@dataclass(frozen=True)
class PartnerFields:
    """Scalar potentials V+/- and magnetic fields B+/- as callables of z.

    The magnetic fields return arrays of shape ``z.shape + (3,)``.
    """

    scalar_potential_plus: Callable
    scalar_potential_minus: Callable
    magnetic_field_plus: Callable
    magnetic_field_minus: Callable

    def scalar(self, which: str):
        return self.scalar_potential_plus if which == "plus" else self.scalar_potential_minus

    def magnetic(self, which: str):
        return self.magnetic_field_plus if which == "plus" else self.magnetic_field_minus


def partner_fields(
    params: ModelParams, frame: FrameVectors = DEFAULT_FRAME, family=CASE2
) -> PartnerFields:
    """V(+/-) = W^2 +/- W' + |V|^2/4 and B(+/-) = 2 W V +/- V'.

    |V|^2 = g^2 + beta^2 because a and b are orthonormal.
    """
    a = np.asarray(frame.a, dtype=float)
    b = np.asarray(frame.b, dtype=float)
    gam, beta, lam = params.gamma, params.beta, params.field_lambda

    def scalar(sign):
        def V(z):
            z = np.asarray(z, dtype=float)
            w = family.W(z, gam)
            g = family.g(z, lam)
            return w**2 + sign * family.dW(z, gam) + (g**2 + beta**2) / 4

        return V

    def magnetic(sign):
        def B(z):
            z = np.asarray(z, dtype=float)
            w = family.W(z, gam)[..., None]
            g = family.g(z, lam)[..., None]
            dg = family.dg(z, lam)[..., None]
            return 2 * w * (g * a + beta * b) + sign * dg * a

        return B

    return PartnerFields(scalar(+1), scalar(-1), magnetic(+1), magnetic(-1))


@dataclass(frozen=True)
class FlowStep:
    gamma: float
    beta: float
    epsilon: float


def parameter_flow(params: ModelParams, n: int, family=CASE2) -> list[FlowStep]:
    """Flowed (gamma_k, beta_k, epsilon_k) for k = 0..n with epsilon_0 = 0.

    beta_k = gamma beta / gamma_k keeps gamma_k beta_k fixed; for the tanh family
    only the square-integrable root gamma_k = gamma - k is used.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    gb = params.gamma * params.beta
    steps = [FlowStep(params.gamma, params.beta, 0.0)]
    gam, beta = params.gamma, params.beta
    for k in range(1, n + 1):
        g_next = family.step(gam)
        if g_next <= 0:
            raise FlowError(f"gamma_{k} = {g_next:g} <= 0: flow leaves the admissible region")
        b_next = gb / g_next
        eps = family.scalar_epsilon(gam, g_next) + (beta**2 - b_next**2) / 4
        steps.append(FlowStep(g_next, b_next, eps))
        gam, beta = g_next, b_next
    return steps


def flowed_params(params: ModelParams, k: int, family=CASE2) -> ModelParams:
    s = parameter_flow(params, k, family)[-1]
    return replace(params, gamma=s.gamma, beta=s.beta, level=params.level + k)


@dataclass(frozen=True)
class ShapeInvarianceResiduals:
    scalar: float
    vector_a: float
    vector_b: float

    def max(self) -> float:
        return max(self.scalar, self.vector_a, self.vector_b)


def shape_invariance_residuals(
    params: ModelParams, grid, family=CASE2, beta1: float | None = None
) -> ShapeInvarianceResiduals:
    """Sup-norm residuals of the three one-step shape-invariance conditions.

    ``grid`` may be a Grid or any array of sample points.  Passing ``beta1``
    overrides the flowed transverse strength (used as a negative control).
    """
    z = np.asarray(getattr(grid, "nodes", grid), dtype=float)
    g0 = params.gamma
    g1 = family.step(g0)
    if g1 <= 0:
        raise FlowError("gamma_1 must be positive")
    b0 = params.beta
    b1 = g0 * b0 / g1 if beta1 is None else beta1
    eps1 = family.scalar_epsilon(g0, g1) + (b0**2 - b1**2) / 4

    W0, W1 = family.W(z, g0), family.W(z, g1)
    dW0, dW1 = family.dW(z, g0), family.dW(z, g1)
    g = family.g(z, params.field_lambda)
    dg = family.dg(z, params.field_lambda)

    lhs = W0**2 + dW0 + b0**2 / 4
    rhs = W1**2 - dW1 + b1**2 / 4 + eps1
    scalar = np.max(np.abs(lhs - rhs))
    vec_a = np.max(np.abs((2 * W0 * g + dg) - (2 * W1 * g - dg)))
    vec_b = np.max(np.abs(W0 * b0 - W1 * b1))
    return ShapeInvarianceResiduals(float(scalar), float(vec_a), float(vec_b))
