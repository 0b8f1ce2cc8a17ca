"""Run configuration: one flat key=value file, overridable by flags.

The file format is a subset of TOML: `key = value` lines, `#` comments,
integer lists as comma-separated values. A config can be serialized back
out and reproduces the run exactly, which the pipeline uses to record
every run's effective parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from .errors import FormatError

DEFAULT_K_VALUES = (0, 5, 10, 20, 30, 40, 50, 60, 70)
DEFAULT_R_VALUES = (1, 5, 10)


@dataclass(frozen=True)
class RunConfig:
    seed: int = 7
    dim: int = 64
    k_values: tuple[int, ...] = DEFAULT_K_VALUES
    r_values: tuple[int, ...] = DEFAULT_R_VALUES
    split_fraction: float = 0.9
    threshold: float = 0.5
    max_distance: Optional[float] = None
    popularity_scope: str = "selected_set"

    def __post_init__(self):
        ks = self.k_values
        if not ks or list(ks) != sorted(set(ks)) or ks[0] < 0:
            raise FormatError(f"k_values must be unique, ascending and non-negative: {ks}")
        if not self.r_values or any(r < 1 for r in self.r_values):
            raise FormatError(f"r_values must be positive: {self.r_values}")
        if not 0.0 < self.split_fraction < 1.0:
            raise FormatError(f"split_fraction must be in (0, 1), got {self.split_fraction}")
        if not 0.0 <= self.threshold <= 1.0:
            raise FormatError(f"threshold must be in [0, 1], got {self.threshold}")
        if self.dim < 2:
            raise FormatError(f"dim must be at least 2, got {self.dim}")


_INT_LIST_KEYS = {"k_values", "r_values"}
_INT_KEYS = {"seed", "dim"}
_FLOAT_KEYS = {"split_fraction", "threshold", "max_distance"}
_STR_KEYS = {"popularity_scope"}
_ALL_KEYS = _INT_LIST_KEYS | _INT_KEYS | _FLOAT_KEYS | _STR_KEYS


def _parse_value(key: str, raw: str, where: str):
    raw = raw.strip().strip('"')
    try:
        if key in _INT_LIST_KEYS:
            return tuple(int(x.strip()) for x in raw.split(",") if x.strip())
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return None if raw in ("", "none") else float(raw)
        return raw
    except ValueError as exc:
        raise FormatError(f"{where}: bad value for {key}: {raw!r}") from exc


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise FormatError(f"config file not found: {path}") from exc
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise FormatError(f"{path}:{lineno}: expected key = value")
        key, _, raw = line.partition("=")
        key = key.strip()
        if key not in _ALL_KEYS:
            raise FormatError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _parse_value(key, raw, f"{path}:{lineno}")
    return RunConfig(**values)


def save_config(path: str | Path, config: RunConfig) -> None:
    lines = []
    for f in fields(config):
        value = getattr(config, f.name)
        if value is None:
            continue
        if isinstance(value, tuple):
            value = ",".join(str(x) for x in value)
        lines.append(f"{f.name} = {value}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def apply_overrides(config: RunConfig, **overrides) -> RunConfig:
    """Replace fields with any non-None override values (flags win)."""
    actual = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **actual) if actual else config
