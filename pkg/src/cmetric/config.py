"""Resolved analysis parameters shared by the estimator, ``classify`` and the CLI."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError
from .graph import DEFAULT_MU, DEFAULT_N_MAX
from .ingest import DEFAULT_FRAME_RATE_HZ
from .signal import DEFAULT_EPSILON, DEFAULT_POLY_DEGREE, DEFAULT_WINDOW, DEFAULT_ZERO_TOL

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


@dataclass(frozen=True)
class Config:
    mu: float = DEFAULT_MU
    window: int = DEFAULT_WINDOW
    poly_degree: int = DEFAULT_POLY_DEGREE
    epsilon: int = DEFAULT_EPSILON
    zero_tol: float = DEFAULT_ZERO_TOL
    # closeness slope, 1/(m*s)
    threshold_overtake: float = 0.1
    # new slower neighbours per second
    threshold_overspeed: float = 2.0
    # epsilon-sharpness of closeness extrema, 1/(m*s)
    sharp_tol: float = 0.03
    min_extrema: int = 3
    frame_rate_hz: float = DEFAULT_FRAME_RATE_HZ
    n_max: int = DEFAULT_N_MAX
    interval: tuple | None = None

    def __post_init__(self):
        if self.interval is not None:
            object.__setattr__(self, "interval", tuple(int(v) for v in self.interval))
        self.validate()

    def validate(self):
        problems = []
        if not self.mu > 0:
            problems.append("mu must be positive")
        if self.window < 1 or self.window % 2 == 0:
            problems.append("window must be a positive odd integer")
        if self.poly_degree < 0 or self.window < self.poly_degree + 2:
            problems.append("window must be >= poly_degree + 2")
        if self.epsilon < 1:
            problems.append("epsilon must be >= 1")
        if self.zero_tol < 0:
            problems.append("zero_tol must be non-negative")
        for name in ("threshold_overtake", "threshold_overspeed", "sharp_tol"):
            if not getattr(self, name) > self.zero_tol:
                problems.append(f"{name} must exceed zero_tol")
        if self.min_extrema < 2:
            problems.append("min_extrema must be >= 2")
        if not self.frame_rate_hz > 0:
            problems.append("frame_rate_hz must be positive")
        if self.n_max < 1:
            problems.append("n_max must be >= 1")
        if self.interval is not None and (len(self.interval) != 2 or self.interval[1] < self.interval[0]):
            problems.append("interval must be [start, end] with start <= end")
        if problems:
            raise ConfigError("; ".join(problems))

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.interval is not None:
            d["interval"] = list(self.interval)
        return d

    def updated(self, **overrides) -> "Config":
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        try:
            return replace(self, **{k: v for k, v in overrides.items() if v is not None})
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_file(cls, path) -> "Config":
        return cls().updated(**read_config_file(path))


def read_config_file(path) -> dict:
    """Raw overrides from a TOML (by suffix) or JSON file; an optional ``[cmetric]`` table is unwrapped."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        if path.suffix.lower() == ".toml":
            data = tomllib.loads(text)
        else:
            data = json.loads(text)
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must contain a table/object")
    data = data.get("cmetric", data)
    if not isinstance(data, dict):
        raise ConfigError("[cmetric] must be a table")
    return data
