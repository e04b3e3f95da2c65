"""Flat key=value config files.

One `key = value` pair per line; blank lines and '#' comments are ignored.
Values are coerced against a dataclass's field types.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path
from typing import get_args, get_origin

from .errors import ConfigError


def parse_flat_config(path: str | Path) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = stripped.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _coerce(raw: str, typ):
    origin = get_origin(typ)
    if origin is not None and origin is not tuple:
        args = [a for a in get_args(typ) if a is not type(None)]
        if args:
            typ = args[0]
            origin = get_origin(typ)
    if typ is bool:
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"cannot parse boolean from {raw!r}")
    if typ is int:
        return int(raw)
    if typ is float:
        return float(raw)
    if origin is tuple:
        inner = get_args(typ)[0] if get_args(typ) else int
        return tuple(_coerce(part.strip(), inner) for part in raw.split(",") if part.strip())
    return raw


def dataclass_from_flat(cls, values: dict[str, str], **overrides):
    """Build a dataclass from string values, erroring on unknown keys."""
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(values) - set(fields)
    if unknown:
        raise ConfigError(f"unknown config keys for {cls.__name__}: {sorted(unknown)}")
    kwargs = {}
    for name, raw in values.items():
        try:
            kwargs[name] = _coerce(raw, _resolve(cls, name))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for {name!r}: {raw!r} ({exc})") from exc
    kwargs.update(overrides)
    return cls(**kwargs)


def _resolve(cls, name: str):
    import typing

    hints = typing.get_type_hints(cls)
    return hints[name]


def split_prefixed(values: dict[str, str], prefix: str) -> dict[str, str]:
    """Extract `prefix.key` entries with the prefix removed."""
    plen = len(prefix) + 1
    return {k[plen:]: v for k, v in values.items() if k.startswith(prefix + ".")}
