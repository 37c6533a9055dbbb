"""Orbit integration with positivity-preserving step control.

Two steppers are provided: classical fixed-step RK4 and the adaptive
Dormand-Prince 5(4) pair.  Both report on a uniform output grid; samples that
fall inside a step come from the method's own continuous extension (the
4th-order Dormand-Prince interpolant, or a cubic Hermite for RK4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from cyclelab.errors import ContractViolation, DomainError
from cyclelab.models import INDEX, VARIABLES, ModelInstance, StateVec, coerce_state


class Method(str, Enum):
    RK4_FIXED = "rk4_fixed"
    RK45_ADAPTIVE = "rk45_adaptive"


class Termination(str, Enum):
    COMPLETED = "completed"
    DIVERGED = "diverged"
    STEPPED_TO_AXIS = "stepped_to_axis"


@dataclass(frozen=True)
class IntegratorConfig:
    method: Method = Method.RK45_ADAPTIVE
    dt: float = 0.01
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    dt_out: float = 0.01
    max_state: float = 1e6
    min_step: float = 1e-12
    max_steps: int = 5_000_000

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        for name in ("dt", "rel_tol", "abs_tol", "dt_out", "max_state", "min_step"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ContractViolation(f"integrator setting {name!r} must be positive, got {value!r}")

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "dt": self.dt,
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "dt_out": self.dt_out,
            "max_state": self.max_state,
        }


@dataclass
class IntegrationStats:
    n_steps: int = 0
    n_rejected: int = 0
    n_positivity_rejected: int = 0
    n_fev: int = 0
    t_final: float = 0.0
    reason: str = ""

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled orbit: ``states[k]`` is the ``(y, w, f)`` state at ``times[k]``.

    ``time_sign`` is ``-1`` for a trajectory produced by :meth:`reversed`, so
    that derivatives used for interpolation follow the reversed time.
    """

    times: np.ndarray
    states: np.ndarray
    model: ModelInstance
    terminated: Termination
    stats: IntegrationStats = field(default_factory=IntegrationStats)
    config: IntegratorConfig = field(default_factory=IntegratorConfig)
    time_sign: float = 1.0

    def __len__(self) -> int:
        return len(self.times)

    @property
    def t_last(self) -> float:
        return float(self.times[-1])

    def state(self, k: int) -> StateVec:
        return StateVec.from_array(self.states[k], self.model.mask)

    def column(self, variable: str) -> np.ndarray:
        if variable not in self.model.mask:
            raise ContractViolation(f"variable {variable!r} is not active in model {self.model.kind.value!r}")
        return self.states[:, INDEX[variable]]

    @cached_property
    def derivatives(self) -> np.ndarray:
        y, w, f = self.states.T
        dy, dw, df = self.model.rhs(y, w, f)
        return self.time_sign * np.column_stack(np.broadcast_arrays(dy, dw, df)).astype(float)

    def reversed(self) -> "Trajectory":
        """The same orbit traversed backwards in time, starting at ``t = 0``."""
        times = self.times[-1] - self.times[::-1]
        return replace(self, times=times, states=self.states[::-1].copy(), time_sign=-self.time_sign)

    def resampled(self, every: int) -> "Trajectory":
        """Keep every ``every``-th sample (and the last one)."""
        idx = np.arange(0, len(self.times), every)
        if idx[-1] != len(self.times) - 1:
            idx = np.append(idx, len(self.times) - 1)
        return replace(self, times=self.times[idx], states=self.states[idx])


# Dormand-Prince 5(4) tableau and 4th-order continuous extension.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_E = (-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40)
_P = (
    (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799),
    (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072),
    (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632),
    (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844),
    (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423),
)


def _combine(x, h, coeffs, ks):
    return tuple(x[i] + h * sum(c * k[i] for c, k in zip(coeffs, ks) if c) for i in range(3))


def _dp_step(rhs, x, k1, h):
    ks = [k1]
    for a in _A[1:]:
        ks.append(rhs(*_combine(x, h, a, ks)))
    x_new = _combine(x, h, _B, ks)
    ks.append(rhs(*x_new))
    err = tuple(h * sum(e * k[i] for e, k in zip(_E, ks) if e) for i in range(3))
    return x_new, ks, err


def _dp_dense(x, h, ks, theta):
    powers = (theta, theta ** 2, theta ** 3, theta ** 4)
    weights = [sum(p * q for p, q in zip(row, powers)) for row in _P]
    return _combine(x, h, weights, ks)


def _rk4_step(rhs, x, k1, h):
    k2 = rhs(*_combine(x, h, (0.5,), (k1,)))
    k3 = rhs(*_combine(x, h, (0.5,), (k2,)))
    k4 = rhs(*_combine(x, h, (1.0,), (k3,)))
    return _combine(x, h, (1 / 6, 1 / 3, 1 / 3, 1 / 6), (k1, k2, k3, k4))


def hermite(x0, d0, x1, d1, h, theta):
    """Cubic Hermite interpolant on ``[0, h]`` at ``theta * h``."""
    t2, t3 = theta * theta, theta * theta * theta
    h00 = 2 * t3 - 3 * t2 + 1
    h10 = t3 - 2 * t2 + theta
    h01 = -2 * t3 + 3 * t2
    h11 = t3 - t2
    return tuple(h00 * x0[i] + h10 * h * d0[i] + h01 * x1[i] + h11 * h * d1[i] for i in range(3))


def output_grid(t_end: float, dt_out: float) -> np.ndarray:
    n = int(math.floor(t_end / dt_out + 1e-9))
    grid = np.arange(n + 1) * dt_out
    if t_end - grid[-1] > 1e-9 * max(dt_out, t_end):
        grid = np.append(grid, t_end)
    else:
        grid[-1] = t_end if n > 0 else 0.0
    return grid


def integrate(model: ModelInstance, x0, t_end: float, cfg: IntegratorConfig | None = None) -> Trajectory:
    """Integrate ``model`` from ``x0`` over ``[0, t_end]``.

    Steps that would push an active component below zero, or produce a
    non-finite state, are retried at half the step.  If the step falls below
    ``cfg.min_step`` the run ends with ``stepped_to_axis``.  Once any component
    exceeds ``cfg.max_state`` the run ends with ``diverged`` and the offending
    state is stored as the final (off-grid) sample.
    """
    cfg = cfg or IntegratorConfig()
    if not (math.isfinite(t_end) and t_end >= 0):
        raise ContractViolation(f"t_end must be a nonnegative finite time, got {t_end!r}")
    start = coerce_state(model, x0)
    if np.any(start < 0):
        raise ContractViolation("initial state has negative components")
    StateVec.from_array(start, model.mask)

    rhs = model.rhs
    active = model.active_indices
    stats = IntegrationStats()
    adaptive = cfg.method is Method.RK45_ADAPTIVE

    grid = output_grid(t_end, cfg.dt_out) if t_end > 0 else np.array([0.0])
    out_t = [0.0]
    out_x = [tuple(float(v) for v in start)]
    next_out = 1

    t = 0.0
    x = out_x[0]
    k1 = rhs(*x)
    stats.n_fev += 1
    h = cfg.dt
    status = Termination.COMPLETED

    while t_end - t > 0 and next_out <= len(grid):
        if stats.n_steps + stats.n_rejected + stats.n_positivity_rejected >= cfg.max_steps:
            status, stats.reason = Termination.DIVERGED, "step budget exhausted"
            break
        remaining = t_end - t
        if h >= remaining or remaining - h < 1e-9 * h:
            h = remaining
            t_new = t_end
        else:
            t_new = t + h

        if adaptive:
            x_new, ks, err_vec = _dp_step(rhs, x, k1, h)
            stats.n_fev += 6
        else:
            x_new = _rk4_step(rhs, x, k1, h)
            stats.n_fev += 3

        finite = all(math.isfinite(v) for v in x_new)
        if not finite or any(x_new[i] < 0 for i in active):
            stats.n_positivity_rejected += 1
            h *= 0.5
            if h < cfg.min_step:
                if finite:
                    status, stats.reason = Termination.STEPPED_TO_AXIS, "step floor reached at axis"
                else:
                    status, stats.reason = Termination.DIVERGED, "non-finite state"
                break
            continue

        if adaptive:
            acc = 0.0
            for i in active:
                scale = cfg.abs_tol + cfg.rel_tol * max(abs(x[i]), abs(x_new[i]))
                acc += (err_vec[i] / scale) ** 2
            err = math.sqrt(acc / len(active))
            if err > 1.0:
                stats.n_rejected += 1
                h *= max(0.2, 0.9 * err ** -0.2)
                if h < cfg.min_step:
                    status, stats.reason = Termination.DIVERGED, "step size collapsed under error control"
                    break
                continue
            k_new = ks[6]
        else:
            k_new = rhs(*x_new)
            stats.n_fev += 1

        stats.n_steps += 1
        while next_out < len(grid) and grid[next_out] <= t_new + 1e-9 * h:
            tg = float(grid[next_out])
            if abs(tg - t_new) <= 1e-9 * h:
                xs = x_new
            else:
                theta = (tg - t) / h
                xs = _dp_dense(x, h, ks, theta) if adaptive else hermite(x, k1, x_new, k_new, h, theta)
                xs = tuple(max(v, 0.0) for v in xs)
            out_t.append(tg)
            out_x.append(xs)
            next_out += 1

        t, x, k1 = t_new, x_new, k_new
        if max(x[i] for i in active) > cfg.max_state:
            if out_t[-1] != t:
                out_t.append(t)
                out_x.append(x)
            status, stats.reason = Termination.DIVERGED, "state exceeded max_state"
            break

        if adaptive:
            h = h * (10.0 if err == 0 else min(10.0, 0.9 * err ** -0.2))
        else:
            h = cfg.dt

    stats.t_final = t
    times = np.array(out_t)
    states = np.array(out_x, dtype=float)
    for i in range(3):
        if i not in active:
            states[:, i] = 0.0
    return Trajectory(times, states, model, status, stats, cfg)


def sample_dense(traj: Trajectory, t: float) -> StateVec:
    """Cubic Hermite interpolation of the stored samples at time ``t``."""
    times = traj.times
    if not (times[0] <= t <= times[-1]):
        raise DomainError(f"time {t!r} outside [{times[0]}, {times[-1]}]")
    k = int(np.searchsorted(times, t, side="left"))
    if k < len(times) and times[k] == t:
        return traj.state(k)
    left = k - 1
    h = times[k] - times[left]
    d = traj.derivatives
    x = hermite(traj.states[left], d[left], traj.states[k], d[k], h, (t - times[left]) / h)
    return StateVec.from_array([max(v, 0.0) if VARIABLES[i] in traj.model.mask else 0.0 for i, v in enumerate(x)],
                               traj.model.mask)


def poincare_crossings(traj: Trajectory, variable: str, level: float, direction: str = "up"):
    """Times where ``variable`` crosses ``level`` in ``direction`` ('up' or 'down').

    Each crossing is bracketed on the sample grid and refined on the dense
    output to 1e-9 in time.  Returns a list of ``(time, StateVec)``.
    """
    if direction not in ("up", "down"):
        raise ContractViolation(f"direction must be 'up' or 'down', got {direction!r}")
    g = traj.column(variable) - level
    idx = INDEX[variable]
    if direction == "up":
        hits = np.nonzero((g[:-1] < 0) & (g[1:] >= 0))[0]
    else:
        hits = np.nonzero((g[:-1] > 0) & (g[1:] <= 0))[0]

    def residual(t):
        return sample_dense(traj, t).as_array()[idx] - level

    out = []
    for k in hits:
        if g[k + 1] == 0:
            t_star = float(traj.times[k + 1])
        else:
            t_star = brentq(residual, traj.times[k], traj.times[k + 1], xtol=1e-12, rtol=4 * np.finfo(float).eps)
        out.append((t_star, sample_dense(traj, t_star)))
    return out
