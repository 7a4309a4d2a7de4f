"""Raising/lowering maps and the excited-state chain.

Both maps reuse the factorized first-order operator of ``numerics``: A- takes
the nodes of a grid to its interior links, A+ takes them back.  Link values
are node values of ``grid.dual()``.

The adjoint A+ pads with zeros beyond the outer links, which is exactly what
maps H+ eigenvectors to H- eigenvectors.  For the excited-state chain that
padding turns the small but nonzero wall value of a slowly decaying zero mode
into a jump of size psi/h per step, so the chain instead starts on a grid
extended by one node per step and keeps only nodes with both links present.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .analytic import NotABoundState, energy_level, is_admissible
from .fields import CASE2, DEFAULT_FRAME, ModelParams, flowed_params, parameter_flow
from .numerics.grid import Grid, GridMismatchError, SpinorField, inner_product
from .numerics.operators import discretize_factorized, lowering_operator
from .zeromode import zero_mode_pair


class DegeneracyCollapse(RuntimeError):
    """Chain outputs became linearly dependent."""


def apply_raising(
    psi: SpinorField,
    params_k: ModelParams,
    grid: Grid | None = None,
    *,
    interior: bool = False,
    family=CASE2,
    frame=DEFAULT_FRAME,
) -> SpinorField:
    """(-D + M) psi: link values of ``grid`` (default ``psi.grid.extended()``) to its nodes.

    With ``interior`` the two outer nodes, whose stencil would reach past the
    data, are dropped and the result lives on ``psi.grid.dual()``.
    """
    grid = psi.grid.extended() if grid is None else grid
    if grid.dual() != psi.grid:
        raise GridMismatchError("psi must live on the links of the target grid")
    op = lowering_operator(params_k, grid, family=family, frame=frame)
    out = op.apply_adjoint(psi.values)
    if interior:
        return SpinorField(out[1:-1].copy(), psi.grid.dual(), psi.log_scale)
    return SpinorField(out, grid, psi.log_scale)


def apply_lowering(psi: SpinorField, params_k: ModelParams, *, family=CASE2, frame=DEFAULT_FRAME) -> SpinorField:
    """(D + M) psi: node values to link values (nodes of ``psi.grid.dual()``)."""
    op = lowering_operator(params_k, psi.grid, family=family, frame=frame)
    return SpinorField(op.apply(psi.values), psi.grid.dual(), psi.log_scale)


def rayleigh_quotient(psi: SpinorField, params: ModelParams, which: str = "minus", *, family=CASE2, frame=DEFAULT_FRAME) -> float:
    grid = psi.grid if which == "minus" else psi.grid.extended()
    H = discretize_factorized(params, grid, which, family=family, frame=frame)
    return float((inner_product(psi, H.apply(psi)) / inner_product(psi, psi)).real)


def gram_determinant(a: SpinorField, b: SpinorField) -> float:
    """Gram determinant of the normalized pair; 1 for orthogonal, 0 for parallel."""
    a, b = a.normalized(), b.normalized()
    return float(1.0 - abs(inner_product(a, b)) ** 2)


@dataclass
class LadderChain:
    """Flowed parameters from level n down to 0 and the grids they act on.

    ``grids[k]`` carries the level n-k field; it is ``grid`` extended n-k times.
    """

    params_sequence: list[ModelParams]
    target_level: int
    grids: list[Grid] = field(default_factory=list)

    @classmethod
    def build(cls, grid: Grid, params: ModelParams, n: int, family=CASE2) -> "LadderChain":
        parameter_flow(params, n, family)  # raises on a bad flow
        seq = [flowed_params(params, k, family) for k in range(n, -1, -1)]
        grids = [grid]
        for _ in range(n):
            grids.append(grids[-1].extended())
        return cls(seq, n, grids[::-1])

    def raise_(self, psi: SpinorField, *, family=CASE2, frame=DEFAULT_FRAME, order=None) -> SpinorField:
        """Apply A+(gamma_{n-1}) ... A+(gamma_0) to a level-n field.

        ``order`` permutes the factor parameters (negative control only).
        """
        factors = self.params_sequence[1:]
        if order is not None:
            factors = [factors[i] for i in order]
        for p in factors:
            psi = apply_raising(psi, p, interior=True, family=family, frame=frame)
        return psi


def build_excited_state(
    grid: Grid,
    params: ModelParams,
    n: int,
    *,
    family=CASE2,
    frame=DEFAULT_FRAME,
    gram_min: float = 1e-8,
) -> tuple[float, tuple[SpinorField, SpinorField]]:
    """Energy and normalized degenerate pair of level n on ``grid``."""
    if n < 0 or not is_admissible(params.gamma, params.beta, n):
        raise NotABoundState(f"level {n} is not bound for gamma={params.gamma}, beta={params.beta}")
    chain = LadderChain.build(grid, params, n, family)
    zm = zero_mode_pair(chain.grids[0], chain.params_sequence[0], family=family, frame=frame)
    out = [chain.raise_(psi, family=family, frame=frame).normalized() for psi in zm]
    det = gram_determinant(*out)
    if det < gram_min:
        raise DegeneracyCollapse(f"chain outputs are dependent (Gram determinant {det:.3g})")
    return energy_level(params.gamma, params.beta, n), (out[0], out[1])
