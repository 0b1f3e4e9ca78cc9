"""Flat ``key = value`` run configuration.

Lines are ``key = value``; ``#`` starts a comment.  Angle keys take radians,
or degrees when written with a ``_deg`` suffix (``theta_x_deg = 30``).
Parsed configs hold radians only, so :func:`dump_config` output re-parses
to the same values.
"""
from __future__ import annotations

import math
from pathlib import Path


class ConfigError(ValueError):
    def __init__(self, message: str, source: str = "<config>", line: int | None = None):
        self.source, self.line = source, line
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


def _u64(s: str) -> int:
    v = int(s, 0)
    if not 0 <= v < 2**64:
        raise ValueError("must be an unsigned 64-bit integer")
    return v


def _positive_int(s: str) -> int:
    v = int(float(s)) if "e" in s.lower() else int(s)
    if v <= 0:
        raise ValueError("must be a positive integer")
    return v


def _float_list(s: str) -> tuple[float, ...]:
    return tuple(float(p) for p in s.split(",") if p.strip())


def _choice(*options):
    def conv(s: str) -> str:
        if s not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return s
    return conv


ANGLE = "angle"

SCHEMA = {
    "seed": _u64,
    "mx": _positive_int,
    "my": _positive_int,
    "theta_x": ANGLE,
    "theta_y": ANGLE,
    "snr_grid_db": _float_list,
    "min_errors": _positive_int,
    "max_trials_per_point": _positive_int,
    "gain": complex,
    "initial_phase": ANGLE,
    "wavelength": float,
    "target_ber": float,
    "averaging": _choice("worst_case_antenna", "uniform_antenna"),
    "antennas": _positive_int,
    "spacing": float,
    "source_speed": float,
    "sample_rate": float,
    "duration": float,
    "perpendicular_offset_model": _choice("standard", "extra_divisor"),
    "bound_cases": _positive_int,
}


def parse_config(text: str, source: str = "<config>") -> dict:
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", source, lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        degrees = key.endswith("_deg")
        name = key[:-4] if degrees else key
        conv = SCHEMA.get(name)
        if conv is None or (degrees and conv is not ANGLE):
            raise ConfigError(f"unknown key {key!r}", source, lineno)
        if name in out:
            raise ConfigError(f"key {name!r} given more than once", source, lineno)
        if not value:
            raise ConfigError(f"key {key!r} has no value", source, lineno)
        try:
            if conv is ANGLE:
                v = float(value)
                out[name] = math.radians(v) if degrees else v
            else:
                out[name] = conv(value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {value!r} ({exc})", source, lineno) from None
    return out


def load_config(path, required=()) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from None
    cfg = parse_config(text, str(path))
    require(cfg, required, str(path))
    return cfg


def require(cfg: dict, keys, source: str = "<config>") -> None:
    for key in keys:
        if key not in cfg:
            raise ConfigError(f"missing required key {key!r}", source)


def _format(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(repr(v) for v in value)
    if isinstance(value, complex):
        return repr(value).strip("()")
    return str(value) if isinstance(value, (int, str)) else repr(value)


def dump_config(cfg: dict) -> str:
    return "".join(f"{k} = {_format(v)}\n" for k, v in cfg.items())
