from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cyclelab.models import ModelInstance, StateVec, active_block, coerce_state


@dataclass(frozen=True)
class NewtonResult:
    """Outcome of a Newton solve.  ``point`` is ``None`` when the solve failed."""

    point: StateVec | None
    converged: bool
    iterations: int
    residual: float
    reason: str = ""
    trace: tuple[tuple[float, ...], ...] = field(default=(), repr=False)


def find_fixed_point_newton(
    model: ModelInstance, guess, tol: float = 1e-12, max_iter: int = 50
) -> NewtonResult:
    """Refine an equilibrium of ``model`` by Newton's method on its active block.

    Stops once the max-abs field residual drops below ``tol``.  A singular
    Jacobian, an iterate leaving the orthant, or running out of iterations
    all return ``converged=False`` with the iteration trace attached.
    """
    x = coerce_state(model, guess).copy()
    idx = list(model.active_indices)
    trace = [tuple(x)]

    def residual_at(z):
        return np.array(model.rhs(*z), dtype=float)[idx]

    res = residual_at(x)
    for it in range(max_iter + 1):
        norm = float(np.abs(res).max())
        if norm < tol:
            return NewtonResult(StateVec.from_array(x, model.mask), True, it, norm, "", tuple(trace))
        if it == max_iter:
            break
        jac = active_block(model, np.array(model.jacobian_entries(*x), dtype=float))
        try:
            if np.linalg.cond(jac) > 1e14:
                raise np.linalg.LinAlgError("ill-conditioned")
            step = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError:
            return NewtonResult(None, False, it, norm, "singular Jacobian", tuple(trace))
        x[idx] += step
        trace.append(tuple(x))
        if not np.all(np.isfinite(x)) or np.any(x[idx] < 0):
            return NewtonResult(None, False, it + 1, float("nan"), "iterate left the nonnegative orthant", tuple(trace))
        res = residual_at(x)
    return NewtonResult(None, False, max_iter, norm, "no convergence", tuple(trace))
