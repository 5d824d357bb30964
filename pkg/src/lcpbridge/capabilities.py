"""Capability registry: what each platform can export and import.

The data ships as a human-readable TOML file so vendor updates do not need
a code change; ``--capabilities <file>`` swaps in a different registry.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from . import _toml
from .errors import ConfigError, UnknownPlatformError

LEVELS = ("none", "partial", "full")
FORMAT_TOKENS = ("JSON", "XLSX", "CSV", "XML", "DS", "SQL")
MODEL_KINDS = ("data", "gui", "behavior")
DIRECTIONS = ("export", "import")

_DEFAULT_PATH = Path(__file__).parent / "assets" / "capabilities.toml"


@dataclass(frozen=True)
class CapabilityRecord:
    platform_id: str
    direction: str
    data: str
    gui: str
    behavior: str
    third_party: bool
    formats: tuple[str, ...]

    def level(self, kind: str) -> str:
        return {"data": self.data, "gui": self.gui, "behavior": self.behavior}[kind]

    def describe(self) -> str:
        kinds = ", ".join(f"{k}={self.level(k)}" for k in MODEL_KINDS)
        star = " (3rd-party app required)" if self.third_party else ""
        formats = "+".join(self.formats) if self.formats else "-"
        return f"{self.direction}: {kinds}, format {formats}{star}"


@dataclass(frozen=True)
class CapabilityMatrix:
    records: dict  # (platform_id, direction) -> CapabilityRecord
    displays: dict  # platform_id -> display name

    def platform_ids(self) -> tuple[str, ...]:
        return tuple(self.displays)

    def display_name(self, platform_id: str) -> str:
        return self.displays.get(platform_id, platform_id)

    def get(self, platform_id: str, direction: str) -> CapabilityRecord:
        if direction not in DIRECTIONS:
            raise ConfigError(f"direction must be export or import, not {direction!r}")
        try:
            return self.records[(platform_id, direction)]
        except KeyError:
            raise UnknownPlatformError(
                f"unknown platform {platform_id!r}; known: {', '.join(self.displays)}")


def _check_level(value, where: str) -> str:
    if value not in LEVELS:
        raise ConfigError(f"{where}: support level must be one of {LEVELS}, not {value!r}")
    return value


def load_capabilities(path: str | Path) -> CapabilityMatrix:
    """Parse a capability file; validates levels and format tokens."""
    try:
        raw = _toml.load(path)
    except (_toml.TomlError, OSError) as exc:
        raise ConfigError(f"cannot load capabilities from {path}: {exc}") from exc

    records = {}
    displays = {}
    for platform_id, body in raw.items():
        if not isinstance(body, dict):
            raise ConfigError(f"platform {platform_id!r}: expected a table")
        displays[platform_id] = body.get("display", platform_id)
        for direction in DIRECTIONS:
            section = body.get(direction)
            if section is None:
                raise ConfigError(f"platform {platform_id!r} lacks [{platform_id}.{direction}]")
            formats = tuple(section.get("formats", []))
            for token in formats:
                if token not in FORMAT_TOKENS:
                    raise ConfigError(
                        f"platform {platform_id!r} {direction}: unknown format token {token!r}")
            records[(platform_id, direction)] = CapabilityRecord(
                platform_id=platform_id,
                direction=direction,
                data=_check_level(section.get("data", "none"), f"{platform_id}.{direction}.data"),
                gui=_check_level(section.get("gui", "none"), f"{platform_id}.{direction}.gui"),
                behavior=_check_level(section.get("behavior", "none"),
                                      f"{platform_id}.{direction}.behavior"),
                third_party=bool(section.get("third_party", False)),
                formats=formats,
            )
    return CapabilityMatrix(records=records, displays=displays)


@lru_cache(maxsize=1)
def default_matrix() -> CapabilityMatrix:
    return load_capabilities(_DEFAULT_PATH)


def query_capabilities(platform_id: str, direction: str,
                       matrix: CapabilityMatrix | None = None) -> CapabilityRecord:
    """Return the registry row for (platform, direction) verbatim."""
    return (matrix or default_matrix()).get(platform_id, direction)
