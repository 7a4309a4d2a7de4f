"""Closed-form spectrum of the tanh model and its small-|z| eigenfunctions."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .fields import ModelParams


class NotABoundState(ValueError):
    """Requested level is not square integrable for these parameters."""


class SeriesDomainError(ValueError):
    pass


def is_admissible(gamma: float, beta: float, n: int) -> bool:
    """gamma_n > |beta_n| / 2, written as (gamma - n)^2 > gamma |beta| / 2."""
    gn = gamma - n
    return gn > 0 and gn * gn > 0.5 * gamma * abs(beta)


def energy_level(gamma: float, beta: float, n: int) -> float:
    if n < 0 or not is_admissible(gamma, beta, n):
        raise NotABoundState(f"level n={n} is not a bound state for gamma={gamma}, beta={beta}")
    gn = gamma - n
    return gamma**2 - gn**2 + beta**2 / 4 * (1 - gamma**2 / gn**2)


def bound_state_count(gamma: float, beta: float) -> int:
    """Number of levels n >= 0 with a normalizable zero mode; 0 means broken SUSY."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    n = 0
    while is_admissible(gamma, beta, n):
        n += 1
    return n


def continuum_threshold(gamma: float, beta: float) -> float:
    """(gamma - |beta|/2)^2, the lower asymptotic channel energy."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return (gamma - abs(beta) / 2) ** 2


def decay_margin(gamma: float, beta: float, n: int) -> float:
    """gamma_n - |beta_n|/2: slowest decay rate of level n, negative once inadmissible.

    Level n sits exactly margin^2 below the continuum threshold.
    """
    gn = gamma - n
    if gn <= 0:
        return -math.inf
    return gn - gamma * abs(beta) / (2 * gn)


@dataclass(frozen=True)
class Level:
    n: int
    energy: float
    degeneracy: int = 2


@dataclass
class LevelTable:
    gamma: float
    beta: float
    levels: list[Level] = field(default_factory=list)
    threshold: float = 0.0

    @property
    def broken(self) -> bool:
        return not self.levels

    def energies(self) -> list[float]:
        return [lv.energy for lv in self.levels]


def level_table(gamma: float, beta: float) -> LevelTable:
    count = bound_state_count(gamma, beta)
    levels = [Level(n, energy_level(gamma, beta, n)) for n in range(count)]
    return LevelTable(gamma, beta, levels, continuum_threshold(gamma, beta))


def case1_spectrum(gamma: float, g: float, beta: float, k: int) -> float:
    """Level k of W = gamma z with a constant field; every level is doubly degenerate.

    The constant spin matrix (g sigma_z + beta sigma_x)/2 commutes with the
    Hamiltonian; in its eigenbasis each branch is W = gamma z +/- c, a shifted
    oscillator with levels 2 gamma k.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if k < 0:
        raise ValueError("k must be non-negative")
    return 2.0 * gamma * k


def hyp2f1(a: complex, b: complex, c: complex, xi: complex, *, tol: float = 1e-14, margin: float = 1e-3) -> complex:
    """Gauss series sum_k (a)_k (b)_k / (c)_k xi^k / k! inside |xi| < 1 - margin.

    Summation stops once the geometric bound on the tail drops below
    ``tol * |sum|``.
    """
    xi = complex(xi)
    r = abs(xi)
    if r >= 1 - margin:
        raise SeriesDomainError(f"|xi| = {r:.6g} is outside the series disc")
    c = complex(c)
    if c.imag == 0 and c.real <= 0 and c.real == int(c.real):
        raise ZeroDivisionError(f"c = {c.real:g} is a pole of the hypergeometric function")
    a, b = complex(a), complex(b)
    total = 1.0 + 0j
    term = 1.0 + 0j
    k = 0
    while True:
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1))
        term *= ratio * xi
        total += term
        k += 1
        if term == 0:
            break
        # once the term ratio is below 1 for good, the tail is bounded geometrically
        q = abs((a + k) * (b + k) / ((c + k) * (k + 1))) * r
        if q < 1 and abs(term) * q / (1 - q) <= tol * abs(total):
            break
        if k > 100000:
            raise ArithmeticError("hypergeometric series did not converge")
    return total


def _hyp_params(params: ModelParams):
    bn = params.beta
    lam = params.field_lambda
    return bn / 2, -bn / 2, 0.5 - 0.5j * lam


def _series_point(z):
    x = math.sinh(z)
    if x * x >= 3:
        raise SeriesDomainError(f"|sinh z| = {abs(x):.4g} >= sqrt(3): outside the series disc")
    return x, (1 - 1j * x) / 2


def phi_closed_form(z: float, params: ModelParams, branch: int = 1) -> tuple[complex, complex]:
    """Both components of the gauge-transformed zero mode (phi_1, phi_2) at z.

    ``params`` carries the flowed (beta_n, lambda).  phi_1 = f e^{-lambda/2 atan(sinh z)}
    with f = F(a,b;c;xi) (branch 1) or xi^{1-c}(1-xi)^{c-a-b}F(1-a,1-b;2-c;xi)
    (branch 2); phi_2 follows from (d/dz + g/2) phi_1 = -beta_n/2 phi_2 and is 0
    when beta_n = 0.
    """
    a, b, c = _hyp_params(params)
    lam = params.field_lambda
    x, xi = _series_point(z)
    dxi = -0.5j * math.cosh(z)
    if branch == 1:
        f = hyp2f1(a, b, c, xi)
        df = a * b / c * hyp2f1(a + 1, b + 1, c + 1, xi) if a * b != 0 else 0j
    elif branch == 2:
        pre = xi ** (1 - c) * (1 - xi) ** (c - a - b)
        F = hyp2f1(1 - a, 1 - b, 2 - c, xi)
        dF = (1 - a) * (1 - b) / (2 - c) * hyp2f1(2 - a, 2 - b, 3 - c, xi)
        f = pre * F
        df = pre * ((1 - c) / xi - (c - a - b) / (1 - xi)) * F + pre * dF
    else:
        raise ValueError("branch must be 1 or 2")
    env = cmath.exp(-0.5 * lam * math.atan(x))
    phi1 = f * env
    # d/dz atan(sinh z) = sech z
    dphi1 = (df * dxi - 0.5 * lam / math.cosh(z) * f) * env
    g = lam / math.cosh(z)
    phi2 = 0j if params.beta == 0 else -(2 / params.beta) * (dphi1 + 0.5 * g * phi1)
    return phi1, phi2


def phi1_closed_form(z: float, params: ModelParams, branch: int = 1) -> complex:
    return phi_closed_form(z, params, branch)[0]


def phi1_closed_form_array(z, params: ModelParams, branch: int = 1) -> np.ndarray:
    return np.array([phi1_closed_form(float(t), params, branch) for t in np.atleast_1d(z)])
