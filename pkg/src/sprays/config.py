"""Config loading from sprays.toml."""

from __future__ import annotations

import sys
import tomllib
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any


@dataclass(frozen=True)
class Settings:
    zero_tol: float = 1e-9
    height: float = 200.0
    delta: float = 1.0
    max_denominator: int = 64
    lattice_tol: float = 1e-9
    path_cap: int = 10**8
    sim_tol: float = 1e-12
    collapse: bool = True
    workers: int = 1
    method: str = "auto"

    def merged(self, overrides: dict[str, Any] | None) -> Settings:
        """Copy with the known keys of overrides applied; None values and unknown keys skipped."""
        if not overrides:
            return self
        known = {f.name for f in fields(self)}
        changes = {}
        for key, value in overrides.items():
            if key not in known or value is None:
                continue
            current = getattr(self, key)
            changes[key] = type(current)(value) if not isinstance(current, bool) else bool(value)
        return replace(self, **changes)


@dataclass
class Config:
    log_level: str = "info"
    settings: Settings = field(default_factory=Settings)


def load_config(path: Path | None = None) -> Config:
    """Load config from sprays.toml. Returns defaults if file missing."""
    if path is None:
        path = Path.cwd() / "sprays.toml"
    if not path.exists():
        return Config()
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        print(f"Error in {path.name}: {e}", file=sys.stderr)
        sys.exit(1)
    sprays = data.get("sprays", {})
    return Config(
        log_level=sprays.get("log_level", Config.log_level),
        settings=Settings().merged(sprays.get("settings")),
    )
