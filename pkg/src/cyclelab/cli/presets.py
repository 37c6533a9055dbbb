"""Named run configurations reproducing the published figures."""

from __future__ import annotations

REFERENCE = {"p": 2.0, "r": 5.0, "c": 1.5}
APPENDIX_INIT = {"y": 0.5, "w": 1.0, "f": 0.75}

PRESETS: dict[str, dict] = {
    "fig1": {
        "model": "goodwin",
        "params": {"r": 1.0, "c": 1.0},
        "init": {"y": 0.6, "w": 0.5},
        "t_end": 40.0,
        "plane": ("y", "w"),
    },
    "fig3": {
        "model": "minsky",
        "params": {"p": 1.0},
        "init": {"y": 0.6, "f": 0.5},
        "t_end": 40.0,
        "plane": ("y", "f"),
    },
    "fig5a": {
        "model": "minsky_reserve_army",
        "params": {"p": 1.0, "r": 1.0, "c": 1.0},
        "init": {"y": 0.6, "w": 0.4, "f": 0.5},
        "t_end": 40.0,
        "plane": ("y", "w"),
    },
    "fig5b": {
        "model": "minsky_reserve_army",
        "params": dict(REFERENCE),
        "init": {"y": 0.6, "w": 0.4, "f": 0.5},
        "t_end": 200.0,
        "plane": ("y", "w"),
    },
    "fig8": {
        "model": "full_wage_led",
        "params": {"p": 1.0, "r": 1.0, "c": 1.0, "s": 1.0},
        "init": {"y": 0.6, "w": 0.4, "f": 0.5},
        "t_end": 40.0,
        "plane": ("y", "w"),
    },
    "app-s0": {
        "model": "full_wage_led",
        "params": dict(REFERENCE, s=0.0),
        "init": dict(APPENDIX_INIT),
        "t_end": 200.0,
        "plane": ("y", "f"),
    },
    "app-s0p03": {
        "model": "full_wage_led",
        "params": dict(REFERENCE, s=0.03),
        "init": dict(APPENDIX_INIT),
        "t_end": 200.0,
        "plane": ("y", "f"),
    },
    "app-sm0p01": {
        "model": "full_wage_led",
        "params": dict(REFERENCE, s=-0.01),
        "init": dict(APPENDIX_INIT),
        "t_end": 200.0,
        "plane": ("y", "f"),
    },
}

ALIASES = {"fig5-stockhammer": "fig5b", "fig5-unit": "fig5a"}


def resolve_preset(name: str) -> dict:
    key = ALIASES.get(name, name)
    if key not in PRESETS:
        raise KeyError(name)
    preset = PRESETS[key]
    return {
        "model": preset["model"],
        "params": dict(preset["params"]),
        "init": dict(preset["init"]),
        "t_end": preset["t_end"],
        "plane": tuple(preset["plane"]),
    }
