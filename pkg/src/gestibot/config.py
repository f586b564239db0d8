"""Serve-mode configuration: a flat key=value file plus CLI overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields

from .geometry import (
    DEFAULT_R_EXT,
    DEFAULT_R_INT,
    DEFAULT_ROT_LIMIT_DEG,
    Workspace,
)
from .robot import DEFAULT_LIN_SPEED, DEFAULT_ROT_SPEED

__all__ = ["ServeConfig", "ConfigError", "load_config_file"]


class ConfigError(ValueError):
    """Malformed config file or invalid value."""


@dataclass
class ServeConfig:
    host: str = "127.0.0.1"
    client_port: int = 8765
    robot_port: int = 8766
    model_path: str = ""
    r_int: float = DEFAULT_R_INT
    r_ext: float = DEFAULT_R_EXT
    rot_limit_deg: float = DEFAULT_ROT_LIMIT_DEG
    back_off: float = 1.0
    watchdog_timeout_ms: float = 200.0
    lin_speed: float = DEFAULT_LIN_SPEED
    rot_speed: float = DEFAULT_ROT_SPEED
    tick_hz: float = 100.0
    telemetry_hz: float = 10.0

    def __post_init__(self) -> None:
        # port 0 means "ephemeral", so two zeros cannot collide
        if self.client_port == self.robot_port != 0:
            raise ConfigError("client_port and robot_port must differ")
        # workspace/watchdog constructors re-validate their own ranges
        self.workspace()
        if self.watchdog_timeout_ms <= 10.0:
            raise ConfigError("watchdog_timeout_ms must exceed the sample period")
        if self.tick_hz <= 0 or self.telemetry_hz <= 0:
            raise ConfigError("rates must be positive")
        if self.lin_speed <= 0 or self.rot_speed <= 0:
            raise ConfigError("speeds must be positive")

    def workspace(self) -> Workspace:
        limit = (-self.rot_limit_deg, self.rot_limit_deg)
        try:
            return Workspace(
                r_int=self.r_int,
                r_ext=self.r_ext,
                rot_limits=(limit, limit, limit),
                back_off=self.back_off,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_mapping(cls, mapping: dict[str, str],
                     **overrides) -> "ServeConfig":
        """Build from string key=value pairs; keyword overrides win."""
        spec = {f.name: f.type for f in fields(cls)}
        kwargs: dict = {}
        for key, raw in mapping.items():
            if key not in spec:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[key] = _coerce(key, raw)
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in spec:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[key] = value
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


_INT_KEYS = {"client_port", "robot_port"}
_STR_KEYS = {"host", "model_path"}


def _coerce(key: str, raw: str):
    if key in _STR_KEYS:
        return raw
    try:
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError:
        raise ConfigError(f"config key {key!r}: bad value {raw!r}") from None


def load_config_file(path: str) -> dict[str, str]:
    """Flat key=value lines; blank lines and # comments ignored."""
    mapping: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key=value")
            key, _, value = line.partition("=")
            mapping[key.strip()] = value.strip()
    return mapping
