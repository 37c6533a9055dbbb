"""``cyclelab`` command-line entry point.

Exit codes: 0 on success (computational findings such as divergence or a
failed definition check are recorded, not raised), 2 on malformed input,
3 when ``verify`` finds a broken invariant.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

import cyclelab
from cyclelab.analysis.definitions import Definition, check_definition
from cyclelab.analysis.fixed_points import find_fixed_point_newton
from cyclelab.analysis.stability import classify_stability, detect_hopf, linearize, scan_parameter
from cyclelab.cli import io
from cyclelab.cli.presets import ALIASES, PRESETS, resolve_preset
from cyclelab.cli.svg import render_svg
from cyclelab.cli.verify import SUITES, run_suites
from cyclelab.errors import ContractViolation
from cyclelab.integrate import IntegratorConfig, Method, Trajectory, integrate
from cyclelab.models import (
    VARIABLES,
    coupling_graph,
    eval_jacobian_analytic,
    interior_fixed_point_closed_form,
    make_model,
)

log = logging.getLogger("cyclelab")

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunSpec:
    command: str = ""
    model: str | None = None
    params: dict = field(default_factory=dict)
    init: dict = field(default_factory=dict)
    t_end: float = 40.0
    method: str = Method.RK45_ADAPTIVE.value
    tol: float = 1e-10
    dt: float = 0.01
    dt_out: float = 0.01
    max_state: float = 1e6
    out: str | None = None
    format: str = "csv"
    svg: str | None = None
    plane: tuple | None = None
    scan: str | None = None
    checks: list = field(default_factory=list)
    region: dict = field(default_factory=dict)
    grid_density: int | None = None
    preset: str | None = None
    seed: int = 0
    suites: list = field(default_factory=list)
    input: str | None = None
    arrows: bool = True
    arrow_density: int = 15

    def integrator_config(self) -> IntegratorConfig:
        return IntegratorConfig(method=self.method, dt=self.dt, rel_tol=self.tol, abs_tol=self.tol,
                                dt_out=self.dt_out, max_state=self.max_state)


CONFIG_KEYS = {f.name for f in fields(RunSpec)} - {"command", "preset", "out", "svg", "input"}


def _number(text: str, key: str) -> float:
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"value for {key!r} is not a number: {text!r}") from None


def parse_assignments(text: str, what: str) -> dict[str, float]:
    out = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in item:
            raise UsageError(f"malformed {what} assignment {item!r}; expected key=value")
        key, value = item.split("=", 1)
        out[key.strip()] = _number(value, key.strip())
    return out


def parse_region(text: str) -> dict[str, tuple[float, float]]:
    out = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        try:
            key, bounds = item.split("=", 1)
            lo, hi = bounds.split(":")
        except ValueError:
            raise UsageError(f"malformed region {item!r}; expected var=lo:hi") from None
        out[key.strip()] = (_number(lo, key), _number(hi, key))
    return out


def parse_grid(text: str) -> tuple[str, list[float]]:
    """``param=lo:hi:step`` (inclusive of ``hi``) or ``param=value``."""
    if "=" not in text:
        raise UsageError(f"malformed scan {text!r}; expected param=lo:hi:step")
    name, spec = (p.strip() for p in text.split("=", 1))
    parts = spec.split(":")
    if len(parts) == 1:
        return name, [_number(parts[0], name)]
    if len(parts) != 3:
        raise UsageError(f"malformed scan range {spec!r}; expected lo:hi:step")
    lo, hi, step = (_number(p, name) for p in parts)
    if step <= 0:
        raise UsageError("scan step must be positive")
    if hi < lo:
        raise UsageError(f"scan grid {spec!r} is empty")
    n = int(np.floor((hi - lo) / step + 1e-9))
    return name, [round(lo + k * step, 12) for k in range(n + 1)]


def parse_plane(text: str) -> tuple[str, str]:
    parts = tuple(p.strip() for p in text.split(","))
    if len(parts) != 2 or any(p not in VARIABLES for p in parts) or parts[0] == parts[1]:
        raise UsageError(f"plane must name two distinct variables from y,w,f; got {text!r}")
    return parts


def _merge(spec: RunSpec, layer: dict) -> None:
    for key, value in layer.items():
        if key in ("params", "init", "region"):
            getattr(spec, key).update(value)
        else:
            setattr(spec, key, value)


def resolve_spec(args: argparse.Namespace) -> RunSpec:
    """Layer defaults < preset < config file < flags into one RunSpec."""
    spec = RunSpec(command=args.command)
    preset = getattr(args, "preset", None)
    if preset:
        try:
            _merge(spec, resolve_preset(preset))
        except KeyError:
            raise UsageError(f"unknown preset {preset!r}; see list-presets") from None
        spec.preset = preset
    config = getattr(args, "config", None)
    if config:
        try:
            data = json.loads(Path(config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {config}: {exc}") from None
        unknown = sorted(set(data) - CONFIG_KEYS)
        if unknown:
            raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
        if "plane" in data:
            data["plane"] = tuple(data["plane"])
        if "model" in data and data["model"] != spec.model:
            spec.params, spec.init = {}, {}
        _merge(spec, data)

    flags = {}
    if getattr(args, "model", None):
        if args.model != spec.model:
            spec.params, spec.init = {}, {}
        flags["model"] = args.model
    if getattr(args, "set", None):
        flags["params"] = parse_assignments(args.set, "--set")
    if getattr(args, "init", None):
        flags["init"] = parse_assignments(args.init, "--init")
    for name in ("t_end", "dt_out", "tol", "dt", "max_state", "method", "out", "format", "svg", "scan",
                 "grid_density", "seed", "input", "arrow_density"):
        value = getattr(args, name, None)
        if value is not None:
            flags[name] = value
    if getattr(args, "plane", None):
        flags["plane"] = parse_plane(args.plane)
    if getattr(args, "region", None):
        flags["region"] = parse_region(args.region)
    if getattr(args, "check", None):
        flags["checks"] = list(args.check)
    if getattr(args, "suite", None):
        flags["suites"] = list(args.suite)
    if getattr(args, "no_arrows", False):
        flags["arrows"] = False
    _merge(spec, flags)
    return spec


def build_model(spec: RunSpec):
    if not spec.model:
        raise UsageError("no model given; use --model or --preset")
    try:
        return make_model(spec.model, spec.params)
    except ContractViolation as exc:
        raise UsageError(str(exc)) from None


def build_state(model, init: dict):
    try:
        return model.state(**init)
    except ContractViolation as exc:
        raise UsageError(str(exc)) from None


def run_trajectory(spec: RunSpec) -> tuple[Trajectory, dict]:
    model = build_model(spec)
    x0 = build_state(model, spec.init)
    try:
        cfg = spec.integrator_config()
        traj = integrate(model, x0, float(spec.t_end), cfg)
    except (ContractViolation, ValueError) as exc:
        raise UsageError(str(exc)) from None
    return traj, x0.active()


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _default_plane(model) -> tuple[str, str]:
    return ("y", "w") if "w" in model.mask else ("y", "f")


def _svg(traj: Trajectory, spec: RunSpec) -> str:
    plane = spec.plane or _default_plane(traj.model)
    for v in plane:
        if v not in traj.model.mask:
            raise UsageError(f"plane variable {v!r} is not active in model {traj.model.kind.value!r}")
    return render_svg(traj, tuple(plane), arrows=spec.arrows, arrow_density=spec.arrow_density)


def cmd_simulate(spec: RunSpec) -> int:
    traj, x0 = run_trajectory(spec)
    meta = io.trajectory_sidecar(traj, x0, float(spec.t_end), cyclelab.__version__)
    if spec.format == "json":
        doc = dict(meta)
        doc["times"] = traj.times.tolist()
        doc["states"] = {v: traj.column(v).tolist() for v in traj.model.variable_names}
        _emit(io.json_dumps(doc), spec.out)
    else:
        _emit(io.trajectory_csv(traj), spec.out)
        if spec.out:
            io.sidecar_path(Path(spec.out)).write_text(io.json_dumps(meta))
    if spec.svg:
        Path(spec.svg).write_text(_svg(traj, spec))
    log.info("simulate: %s, %d samples, %s", traj.model.kind.value, len(traj), traj.terminated.value)
    return EXIT_OK


def _check_name(text: str) -> Definition:
    try:
        return Definition(text.replace("-", "_"))
    except ValueError:
        raise UsageError(f"unknown definition {text!r}; choose from "
                         f"{', '.join(d.value.replace('_', '-') for d in Definition)}") from None


def analyze_report(spec: RunSpec) -> dict:
    model = build_model(spec)
    fp = interior_fixed_point_closed_form(model)
    graph = coupling_graph(model)
    report = {
        "version": cyclelab.__version__,
        "model": model.kind.value,
        "params": model.param_dict(),
        "fixed_point": None,
        "interior": fp is not None,
        "newton": None,
        "jacobian": None,
        "eigenvalues": None,
        "stability": None,
        "coupling_graph": graph.to_dict(),
        "enslaved": sorted(graph.enslaved),
        "checks": [],
    }
    if fp is None:
        report["note"] = "no interior fixed point"
    else:
        report["fixed_point"] = [fp[v] if v in model.mask else None for v in VARIABLES]
        guess = build_state(model, spec.init) if spec.init else fp.as_array() * 1.05
        res = find_fixed_point_newton(model, guess)
        report["newton"] = {
            "converged": res.converged,
            "point": None if res.point is None else [res.point[v] if v in model.mask else None for v in VARIABLES],
            "iterations": res.iterations,
            "residual": res.residual,
            "reason": res.reason,
        }
        report["jacobian"] = eval_jacobian_analytic(model, fp).tolist()
        e = linearize(model, fp)
        st = classify_stability(e)
        report["eigenvalues"] = e.as_pairs()
        report["stability"] = {"class": st.value, "signs": list(st.signs)}
    for name in spec.checks:
        which = _check_name(name)
        density = spec.grid_density or (200 if model.dimension == 2 else 60)
        try:
            rep = check_definition(model, which, spec.region or None, density)
        except ContractViolation as exc:
            raise UsageError(str(exc)) from None
        report["checks"].append(rep.to_dict())
    return report


def cmd_analyze(spec: RunSpec) -> int:
    _emit(io.json_dumps(analyze_report(spec)), spec.out)
    return EXIT_OK


def cmd_scan(spec: RunSpec) -> int:
    if not spec.scan:
        raise UsageError("scan needs --scan param=lo:hi:step")
    param, grid = parse_grid(spec.scan)
    if not grid:
        raise UsageError("scan grid is empty")
    params = dict(spec.params)
    params.setdefault(param, grid[0])
    spec.params = params
    base = build_model(spec)
    try:
        result = scan_parameter(base, grid, param)
    except ContractViolation as exc:
        raise UsageError(str(exc)) from None
    crossings = detect_hopf(result)
    summary = {
        "version": cyclelab.__version__,
        "model": base.kind.value,
        "params": {k: v for k, v in base.param_dict().items() if k != param},
        "parameter": param,
        "grid": {"spec": spec.scan, "n": len(grid), "first": grid[0], "last": grid[-1]},
        "n_non_interior": sum(not r.interior for r in result.rows),
        "hopf": [
            {param: c.value, "pair": [c.pair.real, c.pair.imag], "transversality": c.transversality,
             "bracket": list(c.bracket)}
            for c in crossings
        ],
    }
    if spec.format == "json":
        summary["rows"] = [
            {param: r.value, "interior": r.interior,
             "fixed_point": None if r.fixed_point is None else [r.fixed_point[v] if v in base.mask else None
                                                                for v in VARIABLES],
             "eigenvalues": None if r.eigen is None else r.eigen.as_pairs(),
             "class": r.stability.value if r.interior else "non_interior"}
            for r in result.rows
        ]
        _emit(io.json_dumps(summary), spec.out)
        return EXIT_OK
    _emit(io.scan_csv(result), spec.out)
    text = io.json_dumps(summary)
    if spec.out:
        io.sidecar_path(Path(spec.out)).write_text(text)
    else:
        sys.stderr.write(text)
    return EXIT_OK


def cmd_plot(spec: RunSpec) -> int:
    if spec.input:
        model = build_model(spec) if spec.model else None
        try:
            traj = io.load_trajectory(Path(spec.input), model)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot load trajectory {spec.input}: {exc}") from None
    else:
        traj, _ = run_trajectory(spec)
    _emit(_svg(traj, spec), spec.svg or spec.out)
    return EXIT_OK


def cmd_verify(spec: RunSpec) -> int:
    names = spec.suites or ["all"]
    for name in names:
        if name != "all" and name not in SUITES:
            raise UsageError(f"unknown suite {name!r}; choose from all, {', '.join(SUITES)}")
    traj = None
    if spec.input:
        try:
            traj = io.load_trajectory(Path(spec.input), build_model(spec) if spec.model else None)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot load trajectory {spec.input}: {exc}") from None
        if traj.model.kind.value not in ("goodwin", "minsky"):
            raise UsageError("conservation check on a trajectory needs a goodwin or minsky run")
    checks = run_suites(names, spec.seed, traj)
    failed = [c for c in checks if not c.passed]
    doc = {"passed": not failed, "seed": spec.seed, "checks": [c.to_dict() for c in checks],
           "failures": [c.name for c in failed]}
    _emit(io.json_dumps(doc), spec.out)
    for c in failed:
        sys.stderr.write(f"FAILED {c.suite}/{c.name}: {c.value:.3e} (tolerance {c.tolerance:.1e})\n")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_list_presets(spec: RunSpec) -> int:
    if spec.format == "json":
        _emit(io.json_dumps({name: {**p, "plane": list(p["plane"])} for name, p in PRESETS.items()}), spec.out)
        return EXIT_OK
    lines = []
    for name, p in PRESETS.items():
        params = ",".join(f"{k}={io.fmt_num(v)}" for k, v in p["params"].items())
        init = ",".join(f"{k}={io.fmt_num(v)}" for k, v in p["init"].items())
        lines.append(f"{name:<11} {p['model']:<20} {params:<20} {init:<18} t_end={io.fmt_num(p['t_end'])}")
    for alias, target in ALIASES.items():
        lines.append(f"{alias:<11} -> {target}")
    _emit("\n".join(lines) + "\n", spec.out)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "scan": cmd_scan,
    "plot": cmd_plot,
    "verify": cmd_verify,
    "list-presets": cmd_list_presets,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", help="named figure preset (see list-presets)")
    common.add_argument("--config", help="JSON file of RunSpec keys")
    common.add_argument("--model", help="goodwin | minsky | minsky_reserve_army | full")
    common.add_argument("--set", metavar="K=V,...", help="parameter assignments, e.g. r=1,c=1")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--seed", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    run = argparse.ArgumentParser(add_help=False)
    run.add_argument("--init", metavar="K=V,...", help="initial condition, e.g. y=0.6,w=0.5")
    run.add_argument("--t-end", dest="t_end", type=float)
    run.add_argument("--dt-out", dest="dt_out", type=float)
    run.add_argument("--dt", type=float, help="fixed step (rk4) or initial step (rk45)")
    run.add_argument("--tol", type=float, help="relative and absolute tolerance")
    run.add_argument("--method", choices=[m.value for m in Method])
    run.add_argument("--max-state", dest="max_state", type=float)
    run.add_argument("--plane", metavar="A,B")
    run.add_argument("--svg", metavar="PATH")

    parser = argparse.ArgumentParser(prog="cyclelab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=cyclelab.__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common, run], help="integrate an orbit to CSV/JSON")
    p = sub.add_parser("analyze", parents=[common, run], help="fixed point, eigenvalues, coupling, definitions")
    p.add_argument("--check", action="append", metavar="DEFINITION")
    p.add_argument("--region", metavar="V=LO:HI,...")
    p.add_argument("--grid-density", dest="grid_density", type=int)
    p = sub.add_parser("scan", parents=[common], help="eigenvalue scan with Hopf detection")
    p.add_argument("--scan", metavar="PARAM=LO:HI:STEP")
    p = sub.add_parser("plot", parents=[common, run], help="SVG phase portrait")
    p.add_argument("--input", metavar="CSV", help="trajectory CSV written by simulate")
    p.add_argument("--no-arrows", dest="no_arrows", action="store_true")
    p.add_argument("--arrow-density", dest="arrow_density", type=int)
    p = sub.add_parser("verify", parents=[common], help="run invariant suites")
    p.add_argument("--suite", action="append", metavar="NAME", help="all | " + " | ".join(SUITES))
    p.add_argument("--input", metavar="CSV", help="check V-drift of a simulated trajectory")
    sub.add_parser("list-presets", parents=[common], help="show figure presets")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        spec = resolve_spec(args)
        return COMMANDS[args.command](spec)
    except UsageError as exc:
        sys.stderr.write(f"cyclelab {args.command}: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
