"""Invariant suites run by ``cyclelab verify``."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from cyclelab.analysis.eigen import characteristic_residual, eigenvalues
from cyclelab.analysis.fixed_points import find_fixed_point_newton
from cyclelab.integrate import IntegratorConfig, Trajectory, integrate
from cyclelab.models import (
    conserved_quantity,
    eval_field,
    eval_jacobian_analytic,
    eval_jacobian_fd,
    full_wage_led,
    goodwin,
    interior_fixed_point_closed_form,
    minsky,
    minsky_reserve_army,
)


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def relative_v_drift(traj: Trajectory) -> float:
    values = np.array([conserved_quantity(traj.model, x) for x in traj.states])
    return float(np.abs(values - values[0]).max() / abs(values[0]))


def suite_conservation(seed: int = 0, traj: Trajectory | None = None) -> list[Check]:
    if traj is not None:
        drift = relative_v_drift(traj)
        return [Check("conservation", "input_trajectory_v_drift", drift <= 1e-6, drift, 1e-6,
                      f"{traj.model.kind.value} with {len(traj)} samples")]
    checks = []
    for label, model, x0 in (("goodwin", goodwin(1, 1), (0.6, 0.5)), ("minsky", minsky(1), (0.6, 0.0, 0.5))):
        drift = relative_v_drift(integrate(model, x0, 40.0, IntegratorConfig(rel_tol=1e-10, abs_tol=1e-10)))
        checks.append(Check("conservation", f"{label}_v_drift", drift <= 1e-6, drift, 1e-6))
    drifts = []
    for tol in (1e-7, 1e-8, 1e-9, 1e-10):
        traj_ = integrate(goodwin(1, 1), (0.6, 0.5), 40.0, IntegratorConfig(rel_tol=tol, abs_tol=tol))
        drifts.append(relative_v_drift(traj_))
    monotone = all(b < a for a, b in zip(drifts, drifts[1:]))
    checks.append(Check("conservation", "drift_monotone_in_tolerance", monotone, drifts[-1], 0.0,
                        "drifts " + ", ".join(f"{d:.3e}" for d in drifts)))
    return checks


def _random_models(rng, n):
    for _ in range(n):
        p, r, c = rng.uniform(0.5, 3.0, size=3)
        kind = rng.integers(4)
        if kind == 0:
            yield goodwin(r, c)
        elif kind == 1:
            yield minsky(p)
        elif kind == 2:
            yield minsky_reserve_army(p, r, c)
        else:
            yield full_wage_led(p, r, c, rng.uniform(-2.0, 2.0))


def suite_jacobian(seed: int = 0, n: int = 1000) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for model in _random_models(rng, n):
        x = np.zeros(3)
        x[list(model.active_indices)] = rng.uniform(0.1, 3.0, size=model.dimension)
        diff = np.abs(eval_jacobian_analytic(model, x) - eval_jacobian_fd(model, x, 1e-5)).max()
        worst = max(worst, float(diff))
    return [Check("jacobian", "analytic_vs_central_difference", worst <= 1e-6, worst, 1e-6, f"{n} random points")]


def suite_eigen(seed: int = 0, n: int = 1000) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst_res = worst_tr = worst_det = worst_conj = 0.0
    for _ in range(n):
        J = rng.uniform(-5.0, 5.0, size=(3, 3))
        e = eigenvalues(J)
        scale = 1.0 + np.abs(J).max()
        worst_res = max(worst_res, max(characteristic_residual(J, z) for z in e) / scale)
        tr, det = np.trace(J), np.linalg.det(J)
        worst_tr = max(worst_tr, abs(sum(e.values) - tr) / max(1.0, abs(tr)))
        worst_det = max(worst_det, abs(np.prod(e.values) - det) / max(1.0, abs(det)))
        worst_conj = max(worst_conj, abs(sum(z.imag for z in e)))
    return [
        Check("eigen", "characteristic_residual", worst_res < 1e-8, worst_res, 1e-8, f"{n} random 3x3 matrices"),
        Check("eigen", "trace_identity", worst_tr <= 1e-8, worst_tr, 1e-8),
        Check("eigen", "determinant_identity", worst_det <= 1e-8, worst_det, 1e-8),
        Check("eigen", "conjugate_symmetry", worst_conj <= 1e-9, worst_conj, 1e-9),
    ]


def suite_fixed_point(seed: int = 0, n: int = 100) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst, done, failures = 0.0, 0, 0
    while done < n:
        p, r, c = rng.uniform(0.5, 3.0, size=3)
        model = full_wage_led(p, r, c, rng.uniform(-0.5, 0.5))
        fp = interior_fixed_point_closed_form(model)
        if fp is None:
            continue
        done += 1
        guess = fp.as_array() * (1.0 + rng.uniform(-0.05, 0.05, size=3))
        res = find_fixed_point_newton(model, guess)
        if not res.converged:
            failures += 1
            continue
        worst = max(worst, float(np.abs(res.point.as_array() - fp.as_array()).max()))
        worst = max(worst, float(np.abs(eval_field(model, fp)).max()))
    return [Check("fixed_point", "newton_vs_closed_form", worst <= 1e-10 and failures == 0, worst, 1e-10,
                  f"{n} random parameter sets, {failures} non-converged")]


SUITES = {
    "conservation": suite_conservation,
    "jacobian": suite_jacobian,
    "eigen": suite_eigen,
    "fixed-point": suite_fixed_point,
}


def run_suites(names: list[str], seed: int = 0, traj: Trajectory | None = None) -> list[Check]:
    if "all" in names:
        names = list(SUITES)
    checks = []
    for name in names:
        if name == "conservation":
            checks += suite_conservation(seed, traj)
        else:
            checks += SUITES[name](seed)
    return checks
