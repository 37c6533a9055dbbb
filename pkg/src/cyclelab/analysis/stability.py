"""Linear stability, parameter scans and Hopf-crossing detection."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from cyclelab.analysis.eigen import EigenTriple, eigenvalues
from cyclelab.errors import ContractViolation
from cyclelab.models import (
    ModelInstance,
    ModelKind,
    StateVec,
    active_block,
    eval_jacobian_analytic,
    interior_fixed_point_closed_form,
)

ZERO_TOL = 1e-8


class Stability(str, Enum):
    STABLE_FOCUS_NODE = "stable_focus_node"
    CENTER_CANDIDATE = "center_candidate"
    UNSTABLE_SPIRAL = "unstable_spiral"
    SADDLE_LIKE = "saddle_like"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class StabilityClass:
    kind: Stability
    signs: tuple[int, ...]

    @property
    def value(self) -> str:
        return self.kind.value


def _sign(x: float, tol: float) -> int:
    return 0 if abs(x) <= tol else (1 if x > 0 else -1)


def classify_stability(e: EigenTriple, tol: float = ZERO_TOL) -> StabilityClass:
    """Map eigenvalues to a stability label.

    Real parts within ``tol`` of zero count as zero.  Rules, first match wins:
    all negative; a conjugate pair on the axis with the rest negative; a
    conjugate pair in the right half-plane; mixed strict signs; otherwise
    degenerate.
    """
    signs = tuple(_sign(z.real, tol) for z in e)
    pair = e.pair()
    if all(s < 0 for s in signs):
        kind = Stability.STABLE_FOCUS_NODE
    elif pair is not None and abs(pair[0].real) <= tol and all(z.real < -tol for z in e.others()):
        kind = Stability.CENTER_CANDIDATE
    elif pair is not None and pair[0].real > tol:
        kind = Stability.UNSTABLE_SPIRAL
    elif 1 in signs and -1 in signs:
        kind = Stability.SADDLE_LIKE
    else:
        kind = Stability.DEGENERATE
    return StabilityClass(kind, signs)


def formal_equilibrium(model: ModelInstance) -> np.ndarray:
    """The closed-form equilibrium formula, evaluated even outside the orthant."""
    if model.kind in (ModelKind.GOODWIN, ModelKind.MINSKY):
        return interior_fixed_point_closed_form(model).as_array()
    q = model.params
    s = getattr(q, "s", 0.0)
    w = q.r / q.p - q.c
    return np.array([1.0 / q.p, w, 1.0 + s * w])


def linearize(model: ModelInstance, x=None) -> EigenTriple:
    """Eigenvalues of the model's active Jacobian block at ``x`` (default: interior fixed point)."""
    if x is None:
        x = interior_fixed_point_closed_form(model)
        if x is None:
            raise ContractViolation(f"model {model.kind.value!r} has no interior fixed point")
    return eigenvalues(active_block(model, eval_jacobian_analytic(model, x)))


def _eigen_at_formal(model: ModelInstance) -> EigenTriple:
    x = formal_equilibrium(model)
    return eigenvalues(active_block(model, np.array(model.jacobian_entries(*x), dtype=float)))


@dataclass(frozen=True)
class ScanRow:
    value: float
    interior: bool
    fixed_point: StateVec | None
    eigen: EigenTriple | None
    stability: StabilityClass | None

    def pair_real(self) -> float | None:
        if self.eigen is None or not self.interior:
            return None
        pair = self.eigen.pair()
        return None if pair is None else pair[0].real


@dataclass(frozen=True)
class ScanResult:
    base: ModelInstance
    parameter: str
    rows: tuple[ScanRow, ...]
    metadata: dict = field(default_factory=dict)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.rows])


def scan_parameter(
    base: ModelInstance, grid: Sequence[float], parameter: str = "s", exterior_eigen: bool = False
) -> ScanResult:
    """Closed-form equilibrium, eigenvalues and stability along a parameter grid.

    Rows whose equilibrium leaves the open orthant are flagged
    ``interior=False`` and carry no eigen data unless ``exterior_eigen`` asks
    for the linearization at the formal equilibrium.
    """
    grid = [float(v) for v in grid]
    if not grid:
        raise ContractViolation("scan grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ContractViolation("scan grid must be strictly increasing")
    if parameter not in base.param_dict():
        raise ContractViolation(f"model {base.kind.value!r} has no parameter {parameter!r}")
    rows = []
    for value in grid:
        model = base.with_params(**{parameter: value})
        fp = interior_fixed_point_closed_form(model)
        if fp is not None:
            e = linearize(model, fp)
            rows.append(ScanRow(value, True, fp, e, classify_stability(e)))
        elif exterior_eigen:
            e = _eigen_at_formal(model)
            rows.append(ScanRow(value, False, None, e, classify_stability(e)))
        else:
            rows.append(ScanRow(value, False, None, None, None))
    meta = {"parameter": parameter, "grid": grid, "params": base.param_dict(), "model": base.kind.value}
    return ScanResult(base, parameter, tuple(rows), meta)


@dataclass(frozen=True)
class HopfCrossing:
    value: float
    pair: complex
    transversality: float
    bracket: tuple[float, float]
    iterations: int


def _pair_real_at(base: ModelInstance, parameter: str, value: float) -> tuple[float, complex] | None:
    model = base.with_params(**{parameter: value})
    if interior_fixed_point_closed_form(model) is None:
        return None
    pair = linearize(model).pair()
    if pair is None:
        return None
    return pair[0].real, pair[0]


def detect_hopf(scan: ScanResult, tol: float = 1e-10, fd_step: float = 1e-4) -> list[HopfCrossing]:
    """Locate parameter values where the conjugate pair crosses the imaginary axis.

    Sign changes are sought between neighbouring rows that both carry a
    conjugate pair (rows within ``tol`` of the axis bridge the two sides).
    Each bracket is bisected, re-deriving the equilibrium and eigenvalues at
    every probe, until ``|Re pair| < tol``.  Transversality is the central
    difference of the pair's real part in the parameter.
    """
    base, parameter = scan.base, scan.parameter
    crossings = []
    last = None  # (value, sign) of the last off-axis row in the current pair run
    for row in scan.rows:
        re = row.pair_real()
        if re is None:
            last = None
            continue
        sign = _sign(re, tol)
        if sign == 0:
            continue
        if last is not None and last[1] != sign:
            crossings.append(_refine(base, parameter, last[0], row.value, tol, fd_step))
        last = (row.value, sign)
    return crossings


def _refine(base, parameter, lo, hi, tol, fd_step) -> HopfCrossing:
    re_lo = _pair_real_at(base, parameter, lo)[0]
    it = 0
    while True:
        mid = 0.5 * (lo + hi)
        probe = _pair_real_at(base, parameter, mid)
        it += 1
        if probe is None:
            raise RuntimeError(f"conjugate pair lost inside bracket at {parameter}={mid}")
        re_mid, z = probe
        if abs(re_mid) < tol or hi - lo < 1e-15 or it > 200:
            break
        if (re_mid > 0) == (re_lo > 0):
            lo, re_lo = mid, re_mid
        else:
            hi = mid
    up = _pair_real_at(base, parameter, mid + fd_step)
    down = _pair_real_at(base, parameter, mid - fd_step)
    slope = float("nan") if up is None or down is None else (up[0] - down[0]) / (2 * fd_step)
    return HopfCrossing(mid, z, slope, (lo, hi), it)
