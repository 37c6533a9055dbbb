"""Geometry of sampled orbits: orientation, amplitude trend and cycle classification."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from cyclelab.integrate import Termination, Trajectory, poincare_crossings
from cyclelab.models import ModelInstance, coupling_graph


class Orientation(str, Enum):
    COUNTERCLOCKWISE = "counterclockwise"
    CLOCKWISE = "clockwise"
    UNDETERMINED = "undetermined"


class Trend(str, Enum):
    GROWING = "growing"
    DAMPED = "damped"
    STEADY = "steady"
    UNDETERMINED = "undetermined"


class CycleClass(str, Enum):
    GOODWIN_CYCLE = "goodwin_cycle"
    PSEUDO_GOODWIN_CYCLE = "pseudo_goodwin_cycle"
    DAMPED_OSCILLATION = "damped_oscillation"
    OUTWARD_SPIRAL = "outward_spiral"
    NO_CYCLE = "no_cycle"


@dataclass(frozen=True)
class TrendSettings:
    growth_band: float = 0.01
    discard: int = 1
    min_maxima: int = 3


def winding_turns(a: np.ndarray, b: np.ndarray) -> float:
    """Signed number of turns the curve makes around its centroid."""
    da, db = a - a.mean(), b - b.mean()
    angle = np.unwrap(np.arctan2(db, da))
    return float((angle[-1] - angle[0]) / (2 * np.pi))


def signed_area(a: np.ndarray, b: np.ndarray) -> float:
    """Twice the accumulated signed area swept about the centroid (shoelace sum)."""
    da, db = a - a.mean(), b - b.mean()
    return float(np.sum(da[:-1] * db[1:] - da[1:] * db[:-1]))


def orbit_orientation(traj: Trajectory, plane: tuple[str, str] = ("y", "w")) -> Orientation:
    """Rotation sense of the orbit projected on ``plane`` (first variable horizontal).

    Needs at least one full turn around the centroid; otherwise undetermined.
    """
    a, b = traj.column(plane[0]), traj.column(plane[1])
    if len(a) < 3 or abs(winding_turns(a, b)) < 1.0:
        return Orientation.UNDETERMINED
    area = signed_area(a, b)
    if area > 0:
        return Orientation.COUNTERCLOCKWISE
    if area < 0:
        return Orientation.CLOCKWISE
    return Orientation.UNDETERMINED


def _refined_extrema(x: np.ndarray, kind: str) -> list[tuple[int, float]]:
    if kind == "max":
        idx = np.nonzero((x[1:-1] > x[:-2]) & (x[1:-1] >= x[2:]))[0] + 1
    else:
        idx = np.nonzero((x[1:-1] < x[:-2]) & (x[1:-1] <= x[2:]))[0] + 1
    out = []
    for k in idx:
        left, mid, right = x[k - 1], x[k], x[k + 1]
        curv = left - 2 * mid + right
        value = mid - (right - left) ** 2 / (8 * curv) if curv != 0 else mid
        out.append((int(k), float(value)))
    return out


def local_maxima(traj: Trajectory, variable: str) -> list[tuple[float, float]]:
    """``(time, value)`` of local maxima, values refined by a parabola through three samples."""
    x = traj.column(variable)
    return [(float(traj.times[k]), v) for k, v in _refined_extrema(x, "max")]


def swing_amplitudes(traj: Trajectory, variable: str) -> list[float]:
    """Peak-to-trough swing for every local maximum that has a preceding minimum."""
    x = traj.column(variable)
    maxima = _refined_extrema(x, "max")
    minima = _refined_extrema(x, "min")
    swings = []
    j = 0
    last_min = None
    for k, peak in maxima:
        while j < len(minima) and minima[j][0] < k:
            last_min = minima[j][1]
            j += 1
        if last_min is not None:
            swings.append(peak - last_min)
    return swings


def amplitude_ratio(traj: Trajectory, variable: str, settings: TrendSettings = TrendSettings()) -> float | None:
    """Geometric-mean ratio of consecutive oscillation swings after the transient."""
    if len(_refined_extrema(traj.column(variable), "max")) < settings.min_maxima:
        return None
    swings = swing_amplitudes(traj, variable)[settings.discard:]
    if len(swings) < 2 or swings[0] <= 0 or swings[-1] <= 0:
        return None
    return float((swings[-1] / swings[0]) ** (1.0 / (len(swings) - 1)))


def amplitude_trend(traj: Trajectory, variable: str, settings: TrendSettings = TrendSettings()) -> Trend:
    rho = amplitude_ratio(traj, variable, settings)
    if rho is None:
        return Trend.UNDETERMINED
    if rho > 1.0 + settings.growth_band:
        return Trend.GROWING
    if rho < 1.0 - settings.growth_band:
        return Trend.DAMPED
    return Trend.STEADY


@dataclass(frozen=True)
class CycleReport:
    orientation: Orientation
    amplitude_trend: dict[str, Trend]
    period_estimate: float | None
    enslaved: frozenset[str]
    classification: CycleClass
    plane: tuple[str, str]
    closure_gap: float | None = None
    drivers: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "orientation": self.orientation.value,
            "amplitude_trend": {k: v.value for k, v in self.amplitude_trend.items()},
            "period_estimate": self.period_estimate,
            "enslaved": sorted(self.enslaved),
            "classification": self.classification.value,
            "plane": list(self.plane),
            "closure_gap": self.closure_gap,
            "drivers": list(self.drivers),
        }


def return_map(traj: Trajectory, plane: tuple[str, str]):
    """Upward crossings of the first plane variable through its mean level."""
    a = traj.column(plane[0])
    return poincare_crossings(traj, plane[0], float(a.mean()), "up")


def classify_cycle(
    model: ModelInstance,
    traj: Trajectory,
    settings: TrendSettings = TrendSettings(),
    closure_tol: float = 1e-3,
) -> CycleReport:
    """Decide whether ``traj`` is a Goodwin cycle, a pseudo-Goodwin cycle, or neither.

    The cycle plane is ``(y, w)``; a model without a wage share (Minsky) is
    read in ``(y, f)``, its analogue under the variable substitution.
    A steady orbit counts as closed when the last two returns to the section
    through the mean level agree within ``closure_tol`` of the orbit diameter.
    """
    plane = ("y", "w") if "w" in model.mask else ("y", "f")
    graph = coupling_graph(model)
    enslaved = graph.enslaved
    trends = {v: amplitude_trend(traj, v, settings) for v in plane}
    orientation = orbit_orientation(traj, plane)

    returns = return_map(traj, plane)
    period = None
    gap = None
    if len(returns) >= 2:
        times = [t for t, _ in returns]
        tail = np.diff(times)[-min(5, len(times) - 1):]
        period = float(np.mean(tail))
        pa = returns[-2][1].as_array()
        pb = returns[-1][1].as_array()
        cols = [traj.column(v) for v in plane]
        diameter = max(float(np.ptp(c)) for c in cols)
        idx = [("y", "w", "f").index(v) for v in plane]
        gap = float(np.abs(pb[idx] - pa[idx]).max() / diameter) if diameter > 0 else None

    # drivers: variables besides y that neither are enslaved nor are the cycle partner
    drivers = tuple(v for v in model.variable_names if v not in enslaved and v not in plane)

    values = set(trends.values())
    if traj.terminated is Termination.DIVERGED and Trend.GROWING in values:
        cls = CycleClass.OUTWARD_SPIRAL
    elif orientation is Orientation.UNDETERMINED:
        cls = CycleClass.NO_CYCLE
    elif Trend.GROWING in values:
        cls = CycleClass.OUTWARD_SPIRAL
    elif Trend.DAMPED in values:
        cls = CycleClass.DAMPED_OSCILLATION
    elif values != {Trend.STEADY} or gap is None or gap >= closure_tol:
        cls = CycleClass.NO_CYCLE
    elif orientation is not Orientation.COUNTERCLOCKWISE:
        cls = CycleClass.NO_CYCLE
    elif plane[1] in enslaved:
        cls = CycleClass.PSEUDO_GOODWIN_CYCLE
    elif graph.has_edge("y", plane[1]) and graph.has_edge(plane[1], "y"):
        cls = CycleClass.GOODWIN_CYCLE
    else:
        cls = CycleClass.NO_CYCLE
    return CycleReport(orientation, trends, period, enslaved, cls, plane, gap, drivers)
