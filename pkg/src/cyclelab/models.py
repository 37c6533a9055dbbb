"""The four business-cycle vector fields and their structural properties.

Every model lives on the same state layout ``(y, w, f)``: output, wage share
and financial fragility.  Two-dimensional models use only the slots their
variables name; the remaining slot is held at exactly zero.

==================== ========== ==============================================
kind                 variables  field
==================== ========== ==============================================
goodwin              y, w       y' = y(1 - w),      w' = w(-c + r y)
minsky               y, f       y' = y(1 - f),      f' = f(-1 + p y)
minsky_reserve_army  y, w, f    minsky plus         w' = w(-c + r y - w)
full_wage_led        y, w, f    y' = y(1 - f + s w), w' and f' as above
==================== ========== ==============================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from cyclelab.errors import ContractViolation, DomainError

VARIABLES = ("y", "w", "f")
INDEX = {name: i for i, name in enumerate(VARIABLES)}


class ModelKind(str, Enum):
    GOODWIN = "goodwin"
    MINSKY = "minsky"
    MINSKY_RESERVE_ARMY = "minsky_reserve_army"
    FULL_WAGE_LED = "full_wage_led"


def _require_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise ContractViolation(f"parameter {name!r} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class GoodwinParams:
    r: float
    c: float

    def __post_init__(self):
        _require_positive("r", self.r)
        _require_positive("c", self.c)


@dataclass(frozen=True)
class MinskyParams:
    p: float

    def __post_init__(self):
        _require_positive("p", self.p)


@dataclass(frozen=True)
class MinskyReserveArmyParams:
    p: float
    r: float
    c: float

    def __post_init__(self):
        for name in ("p", "r", "c"):
            _require_positive(name, getattr(self, name))


@dataclass(frozen=True)
class FullWageLedParams:
    p: float
    r: float
    c: float
    s: float

    def __post_init__(self):
        for name in ("p", "r", "c"):
            _require_positive(name, getattr(self, name))
        if not math.isfinite(self.s):
            raise ContractViolation(f"parameter 's' must be finite, got {self.s!r}")


PARAM_TYPES = {
    ModelKind.GOODWIN: GoodwinParams,
    ModelKind.MINSKY: MinskyParams,
    ModelKind.MINSKY_RESERVE_ARMY: MinskyReserveArmyParams,
    ModelKind.FULL_WAGE_LED: FullWageLedParams,
}

ACTIVE_VARIABLES = {
    ModelKind.GOODWIN: ("y", "w"),
    ModelKind.MINSKY: ("y", "f"),
    ModelKind.MINSKY_RESERVE_ARMY: ("y", "w", "f"),
    ModelKind.FULL_WAGE_LED: ("y", "w", "f"),
}


@dataclass(frozen=True)
class ModelInstance:
    """A named vector field together with its parameter record."""

    kind: ModelKind
    params: GoodwinParams | MinskyParams | MinskyReserveArmyParams | FullWageLedParams

    def __post_init__(self):
        kind = ModelKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if type(self.params) is not PARAM_TYPES[kind]:
            raise ContractViolation(
                f"model {kind.value!r} needs {PARAM_TYPES[kind].__name__}, got {type(self.params).__name__}"
            )

    @property
    def variable_names(self) -> tuple[str, ...]:
        return ACTIVE_VARIABLES[self.kind]

    @property
    def dimension(self) -> int:
        return len(self.variable_names)

    @property
    def mask(self) -> frozenset[str]:
        return frozenset(self.variable_names)

    @property
    def active_indices(self) -> tuple[int, ...]:
        return tuple(INDEX[v] for v in self.variable_names)

    def param_dict(self) -> dict[str, float]:
        return {f.name: getattr(self.params, f.name) for f in fields(self.params)}

    def with_params(self, **changes: float) -> "ModelInstance":
        values = self.param_dict()
        for key in changes:
            if key not in values:
                raise ContractViolation(f"model {self.kind.value!r} has no parameter {key!r}")
        values.update(changes)
        return ModelInstance(self.kind, PARAM_TYPES[self.kind](**values))

    def state(self, **components: float) -> "StateVec":
        """Build a state for this model from keyword components (``y=..., w=...``)."""
        for key in components:
            if key not in VARIABLES:
                raise ContractViolation(f"unknown state variable {key!r}")
            if key not in self.mask:
                raise ContractViolation(f"variable {key!r} is not active in model {self.kind.value!r}")
        missing = [v for v in self.variable_names if v not in components]
        if missing:
            raise ContractViolation(f"missing initial value for {', '.join(missing)}")
        return StateVec(mask=self.mask, **{k: float(v) for k, v in components.items()})

    def rhs(self, y, w, f):
        """Raw field on scalars or broadcastable arrays; returns ``(y', w', f')``."""
        q = self.params
        if self.kind is ModelKind.GOODWIN:
            return y * (1.0 - w), w * (-q.c + q.r * y), 0.0 * f
        if self.kind is ModelKind.MINSKY:
            return y * (1.0 - f), 0.0 * w, f * (-1.0 + q.p * y)
        s = q.s if self.kind is ModelKind.FULL_WAGE_LED else 0.0
        return (
            y * (1.0 - f + s * w),
            w * (-q.c + q.r * y - w),
            f * (-1.0 + q.p * y),
        )

    def jacobian_entries(self, y, w, f):
        """Analytic partials as a nested 3x3 list; entry [i][j] = d(field_i)/d(x_j)."""
        q = self.params
        zero = 0.0 * (y + w + f)
        if self.kind is ModelKind.GOODWIN:
            return [
                [1.0 - w, -y, zero],
                [q.r * w, -q.c + q.r * y, zero],
                [zero, zero, zero],
            ]
        if self.kind is ModelKind.MINSKY:
            return [
                [1.0 - f, zero, -y],
                [zero, zero, zero],
                [q.p * f, zero, -1.0 + q.p * y],
            ]
        s = q.s if self.kind is ModelKind.FULL_WAGE_LED else 0.0
        return [
            [1.0 - f + s * w, s * y, -y],
            [q.r * w, -q.c + q.r * y - 2.0 * w, zero],
            [q.p * f, zero, -1.0 + q.p * y],
        ]


def goodwin(r: float = 1.0, c: float = 1.0) -> ModelInstance:
    return ModelInstance(ModelKind.GOODWIN, GoodwinParams(r=float(r), c=float(c)))


def minsky(p: float = 1.0) -> ModelInstance:
    return ModelInstance(ModelKind.MINSKY, MinskyParams(p=float(p)))


def minsky_reserve_army(p: float = 1.0, r: float = 1.0, c: float = 1.0) -> ModelInstance:
    return ModelInstance(ModelKind.MINSKY_RESERVE_ARMY, MinskyReserveArmyParams(float(p), float(r), float(c)))


def full_wage_led(p: float = 1.0, r: float = 1.0, c: float = 1.0, s: float = 1.0) -> ModelInstance:
    return ModelInstance(ModelKind.FULL_WAGE_LED, FullWageLedParams(float(p), float(r), float(c), float(s)))


MODEL_ALIASES = {
    "goodwin": ModelKind.GOODWIN,
    "minsky": ModelKind.MINSKY,
    "minsky_reserve_army": ModelKind.MINSKY_RESERVE_ARMY,
    "minsky-reserve-army": ModelKind.MINSKY_RESERVE_ARMY,
    "mra": ModelKind.MINSKY_RESERVE_ARMY,
    "full_wage_led": ModelKind.FULL_WAGE_LED,
    "full-wage-led": ModelKind.FULL_WAGE_LED,
    "full": ModelKind.FULL_WAGE_LED,
}


def make_model(kind: str | ModelKind, params: Mapping[str, float]) -> ModelInstance:
    """Build a model from a kind name and a complete parameter mapping.

    Unknown or missing parameter names raise :class:`ContractViolation`
    naming the offending key.
    """
    try:
        kind = MODEL_ALIASES[kind] if isinstance(kind, str) and not isinstance(kind, ModelKind) else ModelKind(kind)
    except (KeyError, ValueError):
        raise ContractViolation(f"unknown model {kind!r}") from None
    cls = PARAM_TYPES[kind]
    names = [f.name for f in fields(cls)]
    for key in params:
        if key not in names:
            raise ContractViolation(f"model {kind.value!r} has no parameter {key!r}")
    missing = [n for n in names if n not in params]
    if missing:
        raise ContractViolation(f"model {kind.value!r} is missing parameter(s) {', '.join(missing)}")
    return ModelInstance(kind, cls(**{k: float(params[k]) for k in names}))


@dataclass(frozen=True)
class StateVec:
    """A point ``(y, w, f)`` of the nonnegative orthant with an active-variable mask."""

    y: float = 0.0
    w: float = 0.0
    f: float = 0.0
    mask: frozenset[str] = field(default_factory=lambda: frozenset(VARIABLES))

    def __post_init__(self):
        mask = frozenset(self.mask)
        object.__setattr__(self, "mask", mask)
        if not mask <= set(VARIABLES) or len(mask) not in (2, 3) or "y" not in mask:
            raise ContractViolation(f"invalid variable mask {sorted(mask)}")
        for name in VARIABLES:
            value = float(getattr(self, name))
            object.__setattr__(self, name, value)
            if name in mask:
                if not math.isfinite(value) or value < 0:
                    raise ContractViolation(f"state component {name}={value!r} must be finite and >= 0")
            elif value != 0.0:
                raise ContractViolation(f"inactive component {name} must be exactly 0, got {value!r}")

    @classmethod
    def from_array(cls, x: Sequence[float], mask: Iterable[str]) -> "StateVec":
        return cls(float(x[0]), float(x[1]), float(x[2]), frozenset(mask))

    def as_array(self) -> np.ndarray:
        return np.array([self.y, self.w, self.f])

    def active(self) -> dict[str, float]:
        return {v: getattr(self, v) for v in VARIABLES if v in self.mask}

    def __getitem__(self, name: str) -> float:
        return getattr(self, name)


def coerce_state(model: ModelInstance, x) -> np.ndarray:
    """Return ``x`` as a length-3 array after checking it against ``model``.

    Accepts a :class:`StateVec`, a length-3 sequence in ``(y, w, f)`` order, or
    a sequence of length ``model.dimension`` listing only the active components.
    """
    if isinstance(x, StateVec):
        if x.mask != model.mask:
            raise ContractViolation(
                f"state mask {sorted(x.mask)} does not match model {model.kind.value!r} {sorted(model.mask)}"
            )
        return x.as_array()
    arr = np.asarray(x, dtype=float)
    if arr.shape == (model.dimension,) and model.dimension == 2:
        full = np.zeros(3)
        full[list(model.active_indices)] = arr
        arr = full
    if arr.shape != (3,):
        raise ContractViolation(f"state has shape {arr.shape}, model {model.kind.value!r} needs 3 or {model.dimension}")
    for i, name in enumerate(VARIABLES):
        if name not in model.mask and arr[i] != 0.0:
            raise ContractViolation(f"component {name} is inactive in model {model.kind.value!r} but nonzero")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation("state has non-finite components")
    return arr


def eval_field(model: ModelInstance, x) -> np.ndarray:
    """Time derivative ``(y', w', f')`` at ``x``; inactive components are 0."""
    y, w, f = coerce_state(model, x)
    return np.array(model.rhs(y, w, f), dtype=float)


def eval_jacobian_analytic(model: ModelInstance, x) -> np.ndarray:
    y, w, f = coerce_state(model, x)
    return np.array(model.jacobian_entries(y, w, f), dtype=float)


def eval_jacobian_fd(model: ModelInstance, x, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian; columns of inactive variables are zero."""
    if not h > 0:
        raise ContractViolation(f"step h must be positive, got {h!r}")
    base = coerce_state(model, x)
    for i in model.active_indices:
        if base[i] <= h:
            raise DomainError(f"component {VARIABLES[i]}={base[i]!r} is too close to the axis for step {h}")
    jac = np.zeros((3, 3))
    for j in model.active_indices:
        up, down = base.copy(), base.copy()
        up[j] += h
        down[j] -= h
        jac[:, j] = (np.array(model.rhs(*up)) - np.array(model.rhs(*down))) / (2.0 * h)
    return jac


def active_block(model: ModelInstance, matrix: np.ndarray) -> np.ndarray:
    """Restrict a padded 3x3 matrix to the model's active rows and columns."""
    idx = list(model.active_indices)
    return np.asarray(matrix)[np.ix_(idx, idx)]


def interior_fixed_point_closed_form(model: ModelInstance) -> StateVec | None:
    """The interior equilibrium, or ``None`` when it leaves the open orthant."""
    q = model.params
    if model.kind is ModelKind.GOODWIN:
        return model.state(y=q.c / q.r, w=1.0)
    if model.kind is ModelKind.MINSKY:
        return model.state(y=1.0 / q.p, f=1.0)
    s = q.s if model.kind is ModelKind.FULL_WAGE_LED else 0.0
    y_star = 1.0 / q.p
    w_star = q.r / q.p - q.c
    f_star = q.r * s / q.p - q.c * s + 1.0
    if w_star <= 0 or f_star <= 0:
        return None
    return model.state(y=y_star, w=w_star, f=f_star)


def conserved_quantity(model: ModelInstance, x) -> float | None:
    """Lotka-Volterra first integral ``r y - c ln y + z - ln z``.

    ``z`` is the wage share for the Goodwin model and fragility for the Minsky
    model, where ``(r, c)`` become ``(p, 1)``.  The 3-D models have no such
    integral and return ``None``.
    """
    if model.kind not in (ModelKind.GOODWIN, ModelKind.MINSKY):
        return None
    y, w, f = coerce_state(model, x)
    if model.kind is ModelKind.GOODWIN:
        r, c, z = model.params.r, model.params.c, w
    else:
        r, c, z = model.params.p, 1.0, f
    if y <= 0 or z <= 0:
        raise DomainError("conserved quantity is singular on the axes")
    return r * y - c * math.log(y) + z - math.log(z)


def conserved_gradient(model: ModelInstance, x) -> np.ndarray | None:
    if model.kind not in (ModelKind.GOODWIN, ModelKind.MINSKY):
        return None
    y, w, f = coerce_state(model, x)
    if model.kind is ModelKind.GOODWIN:
        return np.array([model.params.r - model.params.c / y, 1.0 - 1.0 / w, 0.0])
    return np.array([model.params.p - 1.0 / y, 0.0, 1.0 - 1.0 / f])


# ---------------------------------------------------------------------------
# Coupling graph
# ---------------------------------------------------------------------------

POSITIVE = "+"
NEGATIVE = "-"
STATE_DEPENDENT = "state-dependent"


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    sign: str
    term: str


@dataclass(frozen=True)
class CouplingGraph:
    """Influence graph: an edge ``a -> b`` means ``b``'s rate depends on ``a``."""

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    self_loops: tuple[Edge, ...] = ()

    @property
    def enslaved(self) -> frozenset[str]:
        drivers = {e.source for e in self.edges if e.source != e.target}
        return frozenset(n for n in self.nodes if n not in drivers)

    def has_edge(self, source: str, target: str) -> bool:
        return any(e.source == source and e.target == target for e in self.edges)

    def edge(self, source: str, target: str) -> Edge | None:
        for e in self.edges:
            if e.source == source and e.target == target:
                return e
        return None

    def to_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": [{"from": e.source, "to": e.target, "sign": e.sign, "term": e.term} for e in self.edges],
            "self_loops": [{"node": e.source, "sign": e.sign, "term": e.term} for e in self.self_loops],
            "enslaved": sorted(self.enslaved),
        }


def _declared_edges(model: ModelInstance) -> tuple[list[Edge], list[Edge]]:
    kind = model.kind
    if kind is ModelKind.GOODWIN:
        edges = [Edge("y", "w", POSITIVE, "r y w"), Edge("w", "y", NEGATIVE, "-y w")]
        loops = [Edge("y", "y", STATE_DEPENDENT, "y (1 - w)"), Edge("w", "w", STATE_DEPENDENT, "w (-c + r y)")]
        return edges, loops
    if kind is ModelKind.MINSKY:
        edges = [Edge("y", "f", POSITIVE, "p y f"), Edge("f", "y", NEGATIVE, "-y f")]
        loops = [Edge("y", "y", STATE_DEPENDENT, "y (1 - f)"), Edge("f", "f", STATE_DEPENDENT, "f (-1 + p y)")]
        return edges, loops
    edges = [
        Edge("y", "w", POSITIVE, "r y w"),
        Edge("y", "f", POSITIVE, "p y f"),
        Edge("f", "y", NEGATIVE, "-y f"),
    ]
    y_loop = "y (1 - f)"
    if kind is ModelKind.FULL_WAGE_LED and model.params.s != 0.0:
        s = model.params.s
        edges.append(Edge("w", "y", POSITIVE if s > 0 else NEGATIVE, "s y w"))
        y_loop = "y (1 - f + s w)"
    loops = [
        Edge("y", "y", STATE_DEPENDENT, y_loop),
        Edge("w", "w", STATE_DEPENDENT, "w (-c + r y - w)"),
        Edge("f", "f", STATE_DEPENDENT, "f (-1 + p y)"),
    ]
    return edges, loops


def sampled_edge_signs(
    model: ModelInstance, n_points: int = 100, seed: int = 0, low: float = 0.1, high: float = 3.0
) -> dict[tuple[str, str], str]:
    """Cross-variable influence read off finite-difference Jacobians at random interior points.

    Returns ``{(source, target): sign}`` for every pair with a nonzero entry.
    """
    rng = np.random.default_rng(seed)
    names = model.variable_names
    seen: dict[tuple[str, str], set[int]] = {}
    for _ in range(n_points):
        x = np.zeros(3)
        x[list(model.active_indices)] = rng.uniform(low, high, size=model.dimension)
        jac = eval_jacobian_fd(model, x)
        scale = 1.0 + np.abs(jac).max()
        for a in names:
            for b in names:
                if a == b:
                    continue
                entry = jac[INDEX[b], INDEX[a]]
                if abs(entry) > 1e-7 * scale:
                    seen.setdefault((a, b), set()).add(1 if entry > 0 else -1)
    out = {}
    for key, signs in seen.items():
        out[key] = STATE_DEPENDENT if len(signs) > 1 else (POSITIVE if 1 in signs else NEGATIVE)
    return out


def coupling_graph(model: ModelInstance, validate: bool = True, n_points: int = 100, seed: int = 0) -> CouplingGraph:
    """Structural influence graph of ``model``.

    Edges come from the equations' symbolic form.  With ``validate`` the
    declaration is checked against sign samples of the finite-difference
    Jacobian; any disagreement raises ``RuntimeError``.
    """
    edges, loops = _declared_edges(model)
    graph = CouplingGraph(model.variable_names, tuple(edges), tuple(loops))
    if validate:
        sampled = sampled_edge_signs(model, n_points=n_points, seed=seed)
        declared = {(e.source, e.target): e.sign for e in edges}
        if sampled != declared:
            raise RuntimeError(f"coupling graph of {model.kind.value} disagrees with sampled Jacobian: "
                               f"declared {declared}, sampled {sampled}")
    return graph
