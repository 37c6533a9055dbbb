"""Simulation and analysis of Goodwin / Minsky business-cycle ODE models."""

from cyclelab.errors import ContractViolation, DomainError
from cyclelab.models import (
    ModelInstance,
    StateVec,
    coupling_graph,
    conserved_quantity,
    eval_field,
    eval_jacobian_analytic,
    eval_jacobian_fd,
    full_wage_led,
    goodwin,
    interior_fixed_point_closed_form,
    make_model,
    minsky,
    minsky_reserve_army,
)
from cyclelab.integrate import IntegratorConfig, Trajectory, integrate

__version__ = "0.1.0"

__all__ = [
    "ContractViolation",
    "DomainError",
    "IntegratorConfig",
    "ModelInstance",
    "StateVec",
    "Trajectory",
    "conserved_quantity",
    "coupling_graph",
    "eval_field",
    "eval_jacobian_analytic",
    "eval_jacobian_fd",
    "full_wage_led",
    "goodwin",
    "integrate",
    "interior_fixed_point_closed_form",
    "make_model",
    "minsky",
    "minsky_reserve_army",
]
