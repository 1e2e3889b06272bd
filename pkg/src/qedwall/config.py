"""Flat ``key = value`` configuration files.

Lines starting with ``#`` and blank lines are ignored.  Recognized keys are
those of :attr:`AtomicConstants.CONFIG_KEYS`.  The file named by the
``QEDWALL_CONFIG`` environment variable is read when no path is given.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Mapping

from .errors import DomainError
from .hydrogen import AtomicConstants

ENV_VAR = "QEDWALL_CONFIG"


class ConfigError(DomainError):
    """Malformed configuration content."""


def parse_config(text: str, source: str = "<config>") -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in AtomicConstants.CONFIG_KEYS:
            known = ", ".join(sorted(AtomicConstants.CONFIG_KEYS))
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r} (known: {known})")
        out[key] = value
    return out


def load_config(path: str | os.PathLike | None = None) -> dict[str, str]:
    """Read a config file; ``None`` falls back to $QEDWALL_CONFIG, then to no file.

    Raises OSError if the file cannot be read.
    """
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return {}
    p = Path(path)
    return parse_config(p.read_text(encoding="utf-8"), str(p))


def resolve_constants(file_values: Mapping[str, str], overrides: Mapping[str, object] | None = None) -> AtomicConstants:
    """Constants from file values with non-None ``overrides`` taking precedence."""
    merged: dict[str, object] = dict(file_values)
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    try:
        return AtomicConstants.from_mapping(merged)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
