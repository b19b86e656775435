"""Shipped regression-constant presets and experiment design grids."""

from __future__ import annotations

import json
from importlib import resources

from .predictor import ModelConstants
from .simulation import SimDesign, load_design
from .taplog import constants_from_dict

__all__ = [
    "list_presets",
    "preset_dict",
    "load_preset",
    "list_design_presets",
    "load_design_preset",
]

_PRESETS = ("exp1", "exp2", "exp3")
_DESIGNS = ("exp1", "exp2", "exp3")


def _data_path(name: str):
    return resources.files("edgetap.data").joinpath(name)


def list_presets() -> list[dict]:
    """Names and source descriptions of the shipped constant presets."""
    out = []
    for name in _PRESETS:
        d = json.loads(_data_path(f"{name}.json").read_text(encoding="utf-8"))
        out.append({"name": d["preset_name"], "source": d["source"]})
    return out


def preset_dict(name: str) -> dict:
    if name not in _PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(_PRESETS)}")
    return json.loads(_data_path(f"{name}.json").read_text(encoding="utf-8"))


def load_preset(name: str) -> ModelConstants:
    return constants_from_dict(preset_dict(name))


def list_design_presets() -> list[str]:
    return list(_DESIGNS)


def load_design_preset(name: str) -> SimDesign:
    if name not in _DESIGNS:
        raise KeyError(f"unknown design {name!r}; available: {', '.join(_DESIGNS)}")
    with resources.as_file(_data_path(f"{name}_design.json")) as path:
        return load_design(path)
