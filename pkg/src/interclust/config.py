"""Analysis configuration: flat ``key=value`` files merged with CLI flags."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields

from .search import SearchConfig


class ConfigError(ValueError):
    pass


DEFAULT_PERCENTILES = (20, 25, 30, 35, 40, 45, 50, 55, 60, 65, 70)


@dataclass(frozen=True)
class AnalysisConfig:
    k: int = 2
    alpha: float = 1.0
    alpha_tilde: float = 1.0
    restarts: int = 20
    total_global_steps: int = 40
    local_moves_per_global: int = 500
    seed: int = 0
    threshold_kind: str = ""  # empty: chosen from the array kind
    cutoff: float = 0.0
    percentiles: str = ",".join(str(p) for p in DEFAULT_PERCENTILES)
    percentile_method: str = "nearest-rank"
    polish: bool = True
    trace: bool = False

    def __post_init__(self):
        try:
            self.search_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not self.alpha > 0:
            raise ConfigError(f"alpha: must be positive, got {self.alpha}")
        if self.threshold_kind not in ("", "raw-count", "agreement-ratio"):
            raise ConfigError(f"threshold_kind: unknown value {self.threshold_kind!r}")
        try:
            self.percentile_list()
        except ValueError:
            raise ConfigError(f"percentiles: cannot parse {self.percentiles!r}") from None

    def percentile_list(self) -> list[float]:
        vals = [float(x) for x in str(self.percentiles).split(",") if x.strip()]
        if not vals or any(not 0 <= v <= 100 for v in vals):
            raise ValueError("percentiles out of range")
        return vals

    def search_config(self) -> SearchConfig:
        return SearchConfig(k=self.k, alpha_tilde=self.alpha_tilde,
                            local_moves_per_global=self.local_moves_per_global,
                            total_global_steps=self.total_global_steps, restarts=self.restarts,
                            seed=self.seed, record_trace=self.trace)

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    @classmethod
    def resolve(cls, file_values: dict | None = None, overrides: dict | None = None) -> "AnalysisConfig":
        merged = {}
        merged.update(file_values or {})
        merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
        known = {f.name: f for f in fields(cls)}
        kw = {}
        for key, val in merged.items():
            if key not in known:
                raise ConfigError(f"{key}: unknown configuration key")
            kw[key] = _coerce(key, known[key].type, val)
        return cls(**kw)


def _coerce(key, typ, val):
    typ = typ if isinstance(typ, str) else typ.__name__
    try:
        if typ == "bool":
            if isinstance(val, bool):
                return val
            s = str(val).strip().lower()
            if s not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                raise ValueError
            return s in ("1", "true", "yes", "on")
        if typ == "int":
            f = float(val)
            if f != int(f):
                raise ValueError
            return int(f)
        if typ == "float":
            return float(val)
        return str(val)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot interpret {val!r} as {typ}") from None


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            if "=" not in s:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            k, v = s.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out
