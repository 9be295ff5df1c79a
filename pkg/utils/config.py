# utils/config.py
import json
import os
from dataclasses import dataclass, fields, replace
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict

from dotenv import load_dotenv

from core.errors import ConfigError

ROOT = Path(__file__).resolve().parent.parent
DEFAULTS_PATH = ROOT / "config" / "defaults.json"

ROUTES = {"auto", "psd", "h", "h_psd", "eigen", "zmin"}

# env var -> RunConfig field
ENV_OVERRIDES = {
    "VQFP_THREADS": ("threads", int),
    "VQFP_SEED": ("seed", int),
}


def _matches(value, kind: type) -> bool:
    if isinstance(value, bool):
        return kind is bool
    if kind is float:
        return isinstance(value, (int, float))
    if kind is tuple:
        return isinstance(value, tuple) and all(isinstance(v, str) for v in value)
    return isinstance(value, kind)


@dataclass(frozen=True)
class RunConfig:
    sym_tol: float = 1e-8
    psd_tol: float = 1e-9
    g_pos_tol: float = 1e-9
    feas_tol: float = 1e-9
    kkt_tol: float = 1e-8
    strict_tol: float = 1e-9
    sign_tol: float = 1e-9
    z_tol: float = 1e-6
    dom_tol: float = 1e-9
    alpha_tol: float = 1e-9
    point_tol: float = 1e-6
    jacobi_sweeps: int = 30
    grid_dims_max: int = 4
    multistart: int = 32
    bb_node_budget: int = 200000
    max_iter: int = 100
    sweep_divisions: int = 10
    grid_cap: int = 10_000_000
    seed: int = 0
    threads: int = 1
    route: str = "auto"
    route_order: tuple[str, ...] = ("psd", "h_psd", "eigen", "zmin")

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not _matches(value, type(f.default)):
                raise ConfigError(f"{f.name} must be a {type(f.default).__name__}, got {value!r}")
            if f.name.endswith("_tol") and not getattr(self, f.name) > 0:
                raise ConfigError(f"{f.name} must be > 0, got {getattr(self, f.name)!r}")
        if self.route not in ROUTES:
            raise ConfigError(f"unknown route {self.route!r}; expected one of {sorted(ROUTES)}")
        bad = [r for r in self.route_order if r not in ROUTES - {"auto"}]
        if bad:
            raise ConfigError(f"unknown routes in route_order: {bad}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    def with_overrides(self, **updates) -> "RunConfig":
        updates = {k: v for k, v in updates.items() if v is not None}
        if "route_order" in updates:
            updates["route_order"] = tuple(updates["route_order"])
        return replace(self, **updates)

    def tolerances(self) -> Dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name.endswith("_tol")}


def _read(path: Path) -> Dict[str, Any]:
    if not path.exists():
        return {}
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: {e}") from e


def _from_mapping(data: Dict[str, Any]) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    data = dict(data)
    if isinstance(data.get("route_order"), list):
        data["route_order"] = tuple(data["route_order"])
    return RunConfig(**data)


@lru_cache(maxsize=1)
def default_config() -> RunConfig:
    """Defaults from config/defaults.json (no env, no user file)."""
    return _from_mapping(_read(DEFAULTS_PATH))


def load_cfg(path: str | os.PathLike | None = None, **overrides) -> RunConfig:
    """Defaults < user file (arg or VQFP_CONFIG) < environment < overrides."""
    load_dotenv()
    data = _read(DEFAULTS_PATH)
    user_path = path or os.getenv("VQFP_CONFIG")
    if user_path:
        p = Path(user_path)
        if not p.exists():
            raise ConfigError(f"config file not found: {p}")
        data.update(_read(p))
    for env, (key, cast) in ENV_OVERRIDES.items():
        raw = os.getenv(env)
        if raw:
            try:
                data[key] = cast(raw)
            except ValueError as e:
                raise ConfigError(f"{env}={raw!r} is not a valid {cast.__name__}") from e
    return _from_mapping(data).with_overrides(**overrides)
