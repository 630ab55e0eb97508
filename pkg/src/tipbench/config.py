"""Plain-text key-value configuration files.

Format: one ``key = value`` pair per line, ``#`` starts a comment, blank
lines are ignored, duplicate keys are rejected.  Paths are interpreted
relative to the working directory.
"""

from __future__ import annotations

from typing import Mapping

from .errors import ConfigError

__all__ = ["parse_kv", "KVConfig"]


def parse_kv(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {line_no}: empty key")
        if key in entries:
            raise ConfigError(f"line {line_no}: duplicate key {key!r}")
        entries[key] = value
    return entries


class KVConfig:
    """Typed access to parsed key-value entries with error context."""

    def __init__(self, entries: Mapping[str, str], source: str = "config"):
        self.entries = dict(entries)
        self.source = source
        self._used: set[str] = set()

    @classmethod
    def from_text(cls, text: str, source: str = "config") -> "KVConfig":
        return cls(parse_kv(text), source)

    def _raw(self, key: str, default=None, required: bool = False):
        if key in self.entries:
            self._used.add(key)
            return self.entries[key]
        if required:
            raise ConfigError(f"{self.source}: missing required key {key!r}")
        return default

    def get_str(self, key: str, default: str | None = None, required: bool = False):
        return self._raw(key, default, required)

    def get_int(self, key: str, default: int | None = None, required: bool = False):
        raw = self._raw(key, None, required)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{self.source}: {key} must be an integer, got {raw!r}") from None

    def get_float(self, key: str, default: float | None = None, required: bool = False):
        raw = self._raw(key, None, required)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{self.source}: {key} must be a number, got {raw!r}") from None

    def get_bool(self, key: str, default: bool = False) -> bool:
        raw = self._raw(key)
        if raw is None:
            return default
        lowered = raw.lower()
        if lowered in ("true", "yes", "1", "on"):
            return True
        if lowered in ("false", "no", "0", "off"):
            return False
        raise ConfigError(f"{self.source}: {key} must be a boolean, got {raw!r}")

    def get_int_list(self, key: str, default: tuple[int, ...] | None = None):
        raw = self._raw(key)
        if raw is None:
            return default
        try:
            return tuple(int(part.strip()) for part in raw.split(",") if part.strip())
        except ValueError:
            raise ConfigError(
                f"{self.source}: {key} must be a comma-separated integer list, got {raw!r}"
            ) from None

    def get_float_pair(self, key: str, default: tuple[float, float] | None = None):
        raw = self._raw(key)
        if raw is None:
            return default
        parts = [part.strip() for part in raw.split(",")]
        if len(parts) != 2:
            raise ConfigError(f"{self.source}: {key} must be two comma-separated numbers")
        try:
            return (float(parts[0]), float(parts[1]))
        except ValueError:
            raise ConfigError(f"{self.source}: {key} must be numeric, got {raw!r}") from None

    def unused_keys(self) -> list[str]:
        return sorted(set(self.entries) - self._used)
