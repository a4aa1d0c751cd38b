"""INI configuration: a ``[run]`` section plus one optional section per suite.

Values are parsed as int, float, ``inf``, booleans or comma-separated lists
of those.  Only keys that a suite declares in its defaults are accepted.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_SEED = 1729


class ConfigError(ValueError):
    """Malformed or inconsistent configuration (maps to exit code 2)."""


@dataclass(frozen=True)
class SuiteSpec:
    suite: str
    params: dict
    seed: int = DEFAULT_SEED
    corpus: tuple | None = None

    def __post_init__(self):
        for key, val in self.params.items():
            if "tol" in key:
                vals = val if isinstance(val, (list, tuple)) else [val]
                if not all(isinstance(v, (int, float)) and v > 0 for v in vals):
                    raise ConfigError(f"{self.suite}: tolerance {key} must be positive, got {val!r}")


def _scalar(text: str):
    t = text.strip()
    low = t.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if low in ("inf", "infinity"):
        return float("inf")
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        return t


def parse_value(text: str, like):
    if isinstance(like, (list, tuple)):
        body = text.strip()
        if body.startswith("[") and body.endswith("]"):  # brackets optional
            body = body[1:-1]
        items = [s for s in body.split(",") if s.strip()]
        return [_scalar(s) for s in items]
    val = _scalar(text)
    if isinstance(like, float) and isinstance(val, int) and not isinstance(val, bool):
        val = float(val)
    return val


@dataclass
class RunConfig:
    seed: int = DEFAULT_SEED
    overrides: dict = field(default_factory=dict)  # suite id -> {key: value}
    corpus: dict = field(default_factory=dict)  # suite id -> tuple of names


def load_config(path, registry) -> RunConfig:
    """Read ``path``; ``registry`` maps suite ids to objects with ``defaults``."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(Path(path)) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    cfg = RunConfig()
    for section in cp.sections():
        items = dict(cp.items(section))
        if section == "run":
            for key, val in items.items():
                if key != "seed":
                    raise ConfigError(f"[run]: unknown key {key!r}")
                v = _scalar(val)
                if not isinstance(v, int) or v < 0:
                    raise ConfigError("[run] seed must be a nonnegative integer")
                cfg.seed = v
            continue
        if section not in registry:
            raise ConfigError(f"unknown suite section [{section}]")
        defaults = registry[section].defaults
        over = {}
        for key, val in items.items():
            if key == "corpus":
                cfg.corpus[section] = tuple(s.strip() for s in val.split(",") if s.strip())
                continue
            if key not in defaults:
                raise ConfigError(f"[{section}]: unknown key {key!r}")
            over[key] = parse_value(val, defaults[key])
        cfg.overrides[section] = over
    return cfg


def make_spec(suite: str, registry, cfg: RunConfig | None = None, seed: int | None = None) -> SuiteSpec:
    if suite not in registry:
        raise ConfigError(f"unknown suite {suite!r}")
    cfg = cfg or RunConfig()
    params = dict(registry[suite].defaults)
    params.update(cfg.overrides.get(suite, {}))
    return SuiteSpec(suite, params, cfg.seed if seed is None else seed, cfg.corpus.get(suite))
