"""TOML trial configuration and the bundled robot profiles."""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Dict, Tuple

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .detection_filter import FilterConfig
from .errors import ConfigError, InvalidParameter, VinerowError
from .navigator import NavConfig
from .row_estimation import RowConfig
from .simulator import MIN_TRUNK_SEPARATION, SensorModel

PROFILES = ("aliengo", "hyqreal", "ideal")


@dataclass(frozen=True)
class WorldConfig:
    trunks: int = 5
    trunk_spacing: float = 0.8
    rows: int = 1
    row_spacing: float = 2.0
    lateral_jitter: float = 0.0

    def __post_init__(self):
        if self.trunks < 1:
            raise InvalidParameter("trunks must be >= 1")
        if self.rows < 1:
            raise InvalidParameter("rows must be >= 1")
        if not self.trunk_spacing >= MIN_TRUNK_SEPARATION:
            raise InvalidParameter(f"trunk_spacing must be >= {MIN_TRUNK_SEPARATION}")


@dataclass(frozen=True)
class RobotConfig:
    profile: str = "aliengo"
    max_speed: float = 0.5
    max_yaw_rate: float = 1.0
    footprint_length: float = 0.61
    start: Tuple[float, float, float] = (-2.0, 1.0, 0.0)
    start_jitter: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not self.max_speed > 0:
            raise InvalidParameter("max_speed must be > 0")
        if not self.footprint_length >= 0:
            raise InvalidParameter("footprint_length must be >= 0")


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.1
    max_time: float = 300.0

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidParameter("dt must be > 0")
        if not self.max_time > 0:
            raise InvalidParameter("max_time must be > 0")


@dataclass(frozen=True)
class ReferenceConfig:
    """Hardware error statistics for narrative comparison only."""

    mean_error_m: float = float("nan")
    std_error_m: float = float("nan")


@dataclass(frozen=True)
class TrialConfig:
    world: WorldConfig = field(default_factory=WorldConfig)
    robot: RobotConfig = field(default_factory=RobotConfig)
    sensor: SensorModel = field(default_factory=SensorModel)
    filter: FilterConfig = field(default_factory=FilterConfig)
    row: RowConfig = field(default_factory=RowConfig)
    navigator: NavConfig = field(default_factory=NavConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    reference: ReferenceConfig = field(default_factory=ReferenceConfig)
    name: str = "custom"


_SECTIONS = {f.name: f.default_factory for f in dataclasses.fields(TrialConfig)
             if f.name != "name"}


def _coerce(section: str, key: str, value: Any, default: Any) -> Any:
    where = f"{section}.{key}"
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, int):
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif isinstance(default, float):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        if ok:
            value = float(value)
    elif isinstance(default, str):
        ok = isinstance(value, str)
    elif isinstance(default, tuple):
        ok = (isinstance(value, list) and len(value) == len(default)
              and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value))
        if ok:
            value = tuple(float(v) for v in value)
    else:
        ok = True
    if not ok:
        raise ConfigError(f"{where}: expected {type(default).__name__}, got {value!r}", key=where)
    return value


def from_dict(data: Dict[str, Any], name: str = "custom") -> TrialConfig:
    parts = {}
    for section, payload in data.items():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]", key=section)
        if not isinstance(payload, dict):
            raise ConfigError(f"[{section}] must be a table", key=section)
        defaults = _SECTIONS[section]()
        known = {f.name for f in dataclasses.fields(defaults)}
        kwargs = {}
        for key, value in payload.items():
            if key not in known:
                raise ConfigError(f"unknown key {section}.{key}", key=f"{section}.{key}")
            kwargs[key] = _coerce(section, key, value, getattr(defaults, key))
        try:
            parts[section] = dataclasses.replace(defaults, **kwargs)
        except VinerowError as exc:
            # validation messages start with the field name
            bad = next((k for k in kwargs if str(exc).startswith(k)), None)
            key = f"{section}.{bad}" if bad else section
            raise ConfigError(f"{key}: {exc}", key=key) from None
    return TrialConfig(name=name, **parts)


def load_config(path_or_profile) -> TrialConfig:
    """Load a TOML file, or a bundled profile by name (``aliengo``, ``hyqreal``, ``ideal``)."""
    text_name = str(path_or_profile)
    if text_name in PROFILES and not Path(text_name).exists():
        text = resources.files("vinerow.profiles").joinpath(f"{text_name}.toml").read_text()
        name = text_name
    else:
        path = Path(path_or_profile)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        name = path.stem
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{text_name}: {exc}") from None
    return from_dict(data, name=name)
