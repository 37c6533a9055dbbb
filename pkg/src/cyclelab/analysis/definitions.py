"""Grid checks of the economic sign conditions (profit squeeze, reserve army, ...)."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np

from cyclelab.errors import ContractViolation
from cyclelab.models import INDEX, VARIABLES, ModelInstance, ModelKind, StateVec


class Definition(str, Enum):
    PROFIT_LED = "profit_led"
    RESERVE_ARMY = "reserve_army"
    PROFIT_SQUEEZE = "profit_squeeze"
    MINSKY_EFFECT = "minsky_effect"
    INVERSE_OUTPUT_FRAGILITY = "inverse_output_fragility"
    WAGE_LED = "wage_led"


REQUIRED = {
    Definition.PROFIT_LED: "w",
    Definition.WAGE_LED: "w",
    Definition.RESERVE_ARMY: "w",
    Definition.PROFIT_SQUEEZE: "w",
    Definition.MINSKY_EFFECT: "f",
    Definition.INVERSE_OUTPUT_FRAGILITY: "f",
}

DEFAULT_REGION = (0.01, 5.0)


@dataclass(frozen=True)
class DefinitionReport:
    definition: Definition
    holds: bool
    region: dict[str, tuple[float, float]]
    grid_density: int
    n_tested: int
    condition: str
    threshold: float | str | None = None
    witness: dict | None = field(default=None)

    def to_dict(self) -> dict:
        witness = None
        if self.witness is not None:
            witness = {"point": self.witness["point"].active(), "quantity": self.witness["quantity"],
                       "value": self.witness["value"]}
        return {
            "definition": self.definition.value,
            "holds": self.holds,
            "condition": self.condition,
            "threshold": self.threshold,
            "region": {k: list(v) for k, v in self.region.items()},
            "grid_density": self.grid_density,
            "n_tested": self.n_tested,
            "witness": witness,
        }


def catalog_threshold(model: ModelInstance, which: Definition):
    """Threshold for the implication-form definitions.

    Goodwin: reserve army above ``y = c/r``, profit squeeze above ``w = 1``.
    With the extra ``-w^2`` wage term the reserve-army threshold becomes the
    state-dependent ``(c + w)/r``.  Returns ``None`` when no threshold is known.
    """
    q = model.params
    if which is Definition.RESERVE_ARMY:
        if model.kind is ModelKind.GOODWIN:
            return q.c / q.r
        if model.kind in (ModelKind.MINSKY_RESERVE_ARMY, ModelKind.FULL_WAGE_LED):
            return "(c + w)/r"
    if which is Definition.PROFIT_SQUEEZE and model.kind is ModelKind.GOODWIN:
        return 1.0
    return None


def _normalize_region(model: ModelInstance, region: Mapping[str, tuple[float, float]] | None):
    region = dict(region or {})
    for key, bounds in region.items():
        if key not in VARIABLES or key not in model.mask:
            raise ContractViolation(f"region variable {key!r} is not active in model {model.kind.value!r}")
        lo, hi = (float(b) for b in bounds)
        if not (0 <= lo < hi and np.isfinite(hi)):
            raise ContractViolation(f"region bounds for {key!r} must satisfy 0 <= lo < hi, got {bounds!r}")
        region[key] = (lo, hi)
    for v in model.variable_names:
        region.setdefault(v, DEFAULT_REGION)
    return {v: region[v] for v in model.variable_names}


def check_definition(
    model: ModelInstance,
    which: Definition | str,
    region: Mapping[str, tuple[float, float]] | None = None,
    grid_density: int = 200,
    threshold: float | None = None,
) -> DefinitionReport:
    """Test one sign condition on a uniform grid over ``region``.

    Derivative conditions are evaluated with the analytic partials.  The
    implication forms (reserve army, profit squeeze) are tested only on grid
    points satisfying their hypothesis.  ``holds`` is true iff no grid point
    violates the condition; otherwise the first violation is the witness.
    """
    which = Definition(which)
    need = REQUIRED[which]
    if need not in model.mask:
        raise ContractViolation(f"definition {which.value!r} needs variable {need!r}, "
                                f"inactive in model {model.kind.value!r}")
    if grid_density < 2:
        raise ContractViolation("grid_density must be at least 2")
    if threshold is None:
        threshold = catalog_threshold(model, which)
    if threshold is None and which in (Definition.RESERVE_ARMY, Definition.PROFIT_SQUEEZE):
        raise ContractViolation(f"no catalog threshold for {which.value!r} in model {model.kind.value!r}; pass one")
    box = _normalize_region(model, region)
    axes = {v: np.linspace(lo, hi, grid_density) for v, (lo, hi) in box.items()}
    names = model.variable_names

    def evaluate(y, w, f):
        """Return (tested mask, violation mask, quantity name, quantity values)."""
        jac = model.jacobian_entries(y, w, f)
        field_ = model.rhs(y, w, f)
        ones = np.ones(np.broadcast(y, w, f).shape, dtype=bool)
        if which is Definition.PROFIT_LED:
            q = jac[0][1] * ones
            return ones, ~(q < 0), "dydot_dw", q
        if which is Definition.WAGE_LED:
            q = jac[0][1] * ones
            return ones, ~(q > 0), "dydot_dw", q
        if which is Definition.MINSKY_EFFECT:
            q = jac[2][0] * ones
            return ones, ~(q > 0), "dfdot_dy", q
        if which is Definition.INVERSE_OUTPUT_FRAGILITY:
            q = jac[0][2] * ones
            return ones, ~(q < 0), "dydot_df", q
        if which is Definition.RESERVE_ARMY:
            kappa = (model.params.c + w) / model.params.r if isinstance(threshold, str) else threshold
            tested = (y > kappa) & ones
            q = field_[1] * ones
            return tested, tested & ~(q > 0), "wdot", q
        tested = (w > threshold) & ones
        q = field_[0] * ones
        return tested, tested & ~(q < 0), "ydot", q

    n_tested = 0
    witness = None
    first, rest = axes[names[0]], [axes[v] for v in names[1:]]
    mesh = np.meshgrid(*rest, indexing="ij")
    for a in first:
        coords = {names[0]: np.full(mesh[0].shape, a)}
        coords.update({v: m for v, m in zip(names[1:], mesh)})
        y = coords["y"]
        w = coords.get("w", np.zeros_like(y))
        f = coords.get("f", np.zeros_like(y))
        tested, bad, qname, q = evaluate(y, w, f)
        n_tested += int(tested.sum())
        if witness is None and bad.any():
            k = tuple(np.argwhere(bad)[0])
            point = StateVec(float(y[k]), float(w[k]), float(f[k]), model.mask)
            witness = {"point": point, "quantity": qname, "value": float(q[k])}
    conditions = {
        Definition.PROFIT_LED: "d(ydot)/dw < 0",
        Definition.WAGE_LED: "d(ydot)/dw > 0",
        Definition.MINSKY_EFFECT: "d(fdot)/dy > 0",
        Definition.INVERSE_OUTPUT_FRAGILITY: "d(ydot)/df < 0",
        Definition.RESERVE_ARMY: "y > kappa => wdot > 0",
        Definition.PROFIT_SQUEEZE: "w > omega => ydot < 0",
    }
    return DefinitionReport(which, witness is None, box, grid_density, n_tested, conditions[which],
                            threshold, witness)
