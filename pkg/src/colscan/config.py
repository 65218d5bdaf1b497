"""Run parameter bundle and strict override application.

Overrides come from the scenario file's ``params`` object (nested by group)
or from the CLI as dotted ``group.field=value`` pairs. Unknown groups or
fields are rejected.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any

from .kinematics import KinematicsParams
from .mission import MissionParams
from .perception import DetectorConfig
from .sensors import SensorConfig


@dataclass
class SimParams:
    sensors: SensorConfig = field(default_factory=SensorConfig)
    kinematics: KinematicsParams = field(default_factory=KinematicsParams)
    mission: MissionParams = field(default_factory=MissionParams)
    detector: DetectorConfig = field(default_factory=DetectorConfig)

    def to_dict(self) -> dict:
        out: dict[str, dict[str, Any]] = {}
        for group in ("sensors", "kinematics", "mission", "detector"):
            cfg = getattr(self, group)
            out[group] = {
                f.name: getattr(cfg, f.name) for f in dataclasses.fields(cfg)
            }
        # report headings in degrees for readability
        out["kinematics"]["yaw_rate_max"] = math.degrees(out["kinematics"]["yaw_rate_max"])
        return out


_GROUPS = ("sensors", "kinematics", "mission", "detector")
_DEG_FIELDS = {("kinematics", "yaw_rate_max")}


def apply_overrides(params: SimParams, overrides: dict) -> SimParams:
    """Return a copy of params with nested overrides applied.

    ``overrides`` maps group name to a dict of field values, e.g.
    ``{"mission": {"area_threshold": 0.12}}``. Angle limits given under
    degree-named fields are converted.
    """
    unknown = set(overrides) - set(_GROUPS)
    if unknown:
        raise ValueError(f"unknown params group(s): {sorted(unknown)}")
    new = SimParams(
        sensors=params.sensors,
        kinematics=params.kinematics,
        mission=params.mission,
        detector=params.detector,
    )
    for group, values in overrides.items():
        if not isinstance(values, dict):
            raise ValueError(f"params.{group}: expected an object of field overrides")
        cfg = getattr(new, group)
        valid = {f.name for f in dataclasses.fields(cfg)}
        changes = {}
        for key, value in values.items():
            if key not in valid:
                raise ValueError(f"params.{group}.{key}: unknown field")
            if (group, key) in _DEG_FIELDS:
                value = math.radians(float(value))
            changes[key] = value
        setattr(new, group, dataclasses.replace(cfg, **changes))
    return new


def parse_cli_overrides(pairs: list[str]) -> dict:
    """Convert ["mission.area_threshold=0.12", ...] to the nested form."""
    out: dict[str, dict[str, Any]] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"--set expects group.field=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        if key.count(".") != 1:
            raise ValueError(f"--set key must be group.field, got {key!r}")
        group, fieldname = key.split(".")
        value: Any
        try:
            value = int(raw)
        except ValueError:
            try:
                value = float(raw)
            except ValueError:
                value = {"true": True, "false": False}.get(raw.lower(), raw)
        out.setdefault(group, {})[fieldname] = value
    return out
