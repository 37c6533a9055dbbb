"""Fixed points, eigenvalues, stability scans, orbit classification and definition checks."""

from cyclelab.analysis.definitions import Definition, DefinitionReport, check_definition
from cyclelab.analysis.eigen import EigenTriple, eigenvalues
from cyclelab.analysis.fixed_points import NewtonResult, find_fixed_point_newton
from cyclelab.analysis.orbits import (
    CycleClass,
    CycleReport,
    Orientation,
    Trend,
    TrendSettings,
    amplitude_trend,
    classify_cycle,
    orbit_orientation,
)
from cyclelab.analysis.stability import (
    HopfCrossing,
    ScanResult,
    Stability,
    StabilityClass,
    classify_stability,
    detect_hopf,
    linearize,
    scan_parameter,
)

__all__ = [
    "CycleClass",
    "CycleReport",
    "Definition",
    "DefinitionReport",
    "EigenTriple",
    "HopfCrossing",
    "NewtonResult",
    "Orientation",
    "ScanResult",
    "Stability",
    "StabilityClass",
    "Trend",
    "TrendSettings",
    "amplitude_trend",
    "check_definition",
    "classify_cycle",
    "classify_stability",
    "detect_hopf",
    "eigenvalues",
    "find_fixed_point_newton",
    "linearize",
    "orbit_orientation",
    "scan_parameter",
]
