"""Service configuration: TOML file, MAGBIKE_* environment overrides, flags.

Precedence from lowest to highest: built-in defaults, config file, environment
variables, explicit overrides (command-line flags).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

ENV_PREFIX = "MAGBIKE_"


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8765
    telemetry_rate_hz: float = 20.0
    pace_scale: float = 1.0          # wall seconds per simulated second
    v_max: float = 0.2               # m/s command limit
    record_path: str = ""            # session log destination; empty disables
    map_path: str = ""               # optional marker overlay for consoles


def load_config(path: str | os.PathLike | None = None,
                env: dict | None = None, **overrides) -> ServiceConfig:
    values: dict = {}
    if path:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
        section = data.get("service", data)
        values.update({k: v for k, v in section.items()
                       if k in {f.name for f in fields(ServiceConfig)}})
    env = dict(os.environ if env is None else env)
    for f in fields(ServiceConfig):
        key = ENV_PREFIX + f.name.upper()
        if key in env:
            values[f.name] = env[key]
    for k, v in overrides.items():
        if v is not None:
            values[k] = v
    return ServiceConfig(**{k: _coerce(v, getattr(ServiceConfig, k)) for k, v in values.items()})


def _coerce(raw, default):
    if isinstance(default, bool):
        return str(raw).lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return str(raw)
