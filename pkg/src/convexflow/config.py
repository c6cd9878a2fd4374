"""Run configuration: strict parsing, canonical serialization, object building."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass

import yaml

from .curves import (
    CurvatureProfile,
    SupportCoefficients,
    circle_profile,
    ellipse_profile,
    random_convex_profile,
    support_fourier_profile,
)
from .flows import FlowSpec, FlowVariant, SolverConfig
from .grid import AngleGrid

ENV_SEED = "CONVEXFLOW_SEED"

_FLOW_NAMES = {v.value: v for v in FlowVariant}
_SCHEMES = ("explicit_rk4", "imex")
_INIT_PARAMS = {
    "circle": {"R"},
    "ellipse": {"a", "b"},
    "support_fourier": {"a0", "harmonics"},
    "random": {"seed", "budget", "j_max"},
}


class ConfigError(ValueError):
    """Malformed run configuration; the message names the offending key."""


@dataclass(frozen=True)
class RunConfig:
    init_type: str
    init_params: dict
    flow: FlowVariant
    t_end: float
    n: int = 256
    cfl: float = 0.25
    scheme: str = "explicit_rk4"
    record_stride: int = 20
    projection: bool = False
    radii_seed: int = 0
    snapshot_stride: int = 0


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ConfigError(f"missing required key '{context}{key}'")
    return mapping[key]


def _reject_unknown(mapping: dict, allowed, context: str) -> None:
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"unknown key '{context}{key}'")


def _number(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"key '{key}' must be a number, got {value!r}")
    return float(value)


def _integer(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"key '{key}' must be an integer, got {value!r}")
    return value


def _boolean(value, key: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"key '{key}' must be a boolean, got {value!r}")
    return value


def _parse_init(section) -> tuple[str, dict]:
    if not isinstance(section, dict):
        raise ConfigError("key 'init' must be a mapping")
    kind = _require(section, "type", "init.")
    if kind not in _INIT_PARAMS:
        raise ConfigError(
            f"unknown key 'init.type' value {kind!r}; expected one of {sorted(_INIT_PARAMS)}"
        )
    _reject_unknown(section, {"type"} | _INIT_PARAMS[kind], "init.")
    params: dict = {}
    if kind == "circle":
        params["R"] = _number(_require(section, "R", "init."), "init.R")
    elif kind == "ellipse":
        params["a"] = _number(_require(section, "a", "init."), "init.a")
        params["b"] = _number(_require(section, "b", "init."), "init.b")
    elif kind == "support_fourier":
        params["a0"] = _number(_require(section, "a0", "init."), "init.a0")
        raw = section.get("harmonics", [])
        if not isinstance(raw, list):
            raise ConfigError("key 'init.harmonics' must be a list of [j, c, s] triples")
        harmonics = []
        for item in raw:
            if not isinstance(item, (list, tuple)) or len(item) != 3:
                raise ConfigError("key 'init.harmonics' entries must be [j, c, s] triples")
            j, c, s = item
            harmonics.append(
                [
                    _integer(j, "init.harmonics[].j"),
                    _number(c, "init.harmonics[].c"),
                    _number(s, "init.harmonics[].s"),
                ]
            )
        params["harmonics"] = harmonics
    elif kind == "random":
        params["seed"] = _integer(_require(section, "seed", "init."), "init.seed")
        params["budget"] = _number(_require(section, "budget", "init."), "init.budget")
        params["j_max"] = _integer(_require(section, "j_max", "init."), "init.j_max")
    return kind, params


def parse_config(text: str) -> RunConfig:
    """Parse a YAML/JSON run configuration.

    Unknown keys are rejected by name; omitted optional keys take the
    documented defaults (n=256, cfl=0.25, scheme=explicit_rk4,
    record_stride=20, projection off).
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not well-formed YAML/JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping of sections")
    _reject_unknown(data, {"grid", "init", "flow", "time", "geometry", "output", "t_end"}, "")

    init_type, init_params = _parse_init(_require(data, "init", ""))

    flow_name = _require(data, "flow", "")
    if flow_name not in _FLOW_NAMES:
        raise ConfigError(
            f"unknown key 'flow' value {flow_name!r}; expected one of {sorted(_FLOW_NAMES)}"
        )

    grid = data.get("grid", {})
    if not isinstance(grid, dict):
        raise ConfigError("key 'grid' must be a mapping")
    _reject_unknown(grid, {"n"}, "grid.")
    n = _integer(grid.get("n", 256), "grid.n")
    if n < 16 or n % 2 != 0:
        raise ConfigError(f"key 'grid.n' must be even and >= 16, got {n}")

    time_section = data.get("time", {})
    if not isinstance(time_section, dict):
        raise ConfigError("key 'time' must be a mapping")
    _reject_unknown(
        time_section, {"t_end", "cfl", "scheme", "record_stride", "projection"}, "time."
    )
    if "t_end" in data and "t_end" in time_section:
        raise ConfigError("key 't_end' given both at top level and under 'time'")
    if "t_end" in data:
        t_end = _number(data["t_end"], "t_end")
    else:
        t_end = _number(_require(time_section, "t_end", "time."), "time.t_end")
    if t_end <= 0:
        raise ConfigError(f"key 'time.t_end' must be positive, got {t_end}")
    cfl = _number(time_section.get("cfl", 0.25), "time.cfl")
    if not 0.0 < cfl <= 1.0:
        raise ConfigError(f"key 'time.cfl' must lie in (0, 1], got {cfl}")
    scheme = time_section.get("scheme", "explicit_rk4")
    if scheme not in _SCHEMES:
        raise ConfigError(f"key 'time.scheme' must be one of {_SCHEMES}, got {scheme!r}")
    record_stride = _integer(time_section.get("record_stride", 20), "time.record_stride")
    if record_stride < 1:
        raise ConfigError(f"key 'time.record_stride' must be >= 1, got {record_stride}")
    projection = _boolean(time_section.get("projection", False), "time.projection")

    geometry = data.get("geometry", {})
    if not isinstance(geometry, dict):
        raise ConfigError("key 'geometry' must be a mapping")
    _reject_unknown(geometry, {"radii_seed"}, "geometry.")
    radii_seed = _integer(geometry.get("radii_seed", 0), "geometry.radii_seed")

    output = data.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("key 'output' must be a mapping")
    _reject_unknown(output, {"snapshot_stride"}, "output.")
    snapshot_stride = _integer(output.get("snapshot_stride", 0), "output.snapshot_stride")
    if snapshot_stride < 0:
        raise ConfigError(f"key 'output.snapshot_stride' must be >= 0, got {snapshot_stride}")

    return RunConfig(
        init_type=init_type,
        init_params=init_params,
        flow=_FLOW_NAMES[flow_name],
        t_end=t_end,
        n=n,
        cfl=cfl,
        scheme=scheme,
        record_stride=record_stride,
        projection=projection,
        radii_seed=radii_seed,
        snapshot_stride=snapshot_stride,
    )


def serialize_config(cfg: RunConfig) -> dict:
    """Canonical dict form with every default made explicit."""
    return {
        "grid": {"n": cfg.n},
        "init": {"type": cfg.init_type, **cfg.init_params},
        "flow": cfg.flow.value,
        "time": {
            "t_end": cfg.t_end,
            "cfl": cfg.cfl,
            "scheme": cfg.scheme,
            "record_stride": cfg.record_stride,
            "projection": cfg.projection,
        },
        "geometry": {"radii_seed": cfg.radii_seed},
        "output": {"snapshot_stride": cfg.snapshot_stride},
    }


def config_hash(cfg: RunConfig) -> str:
    canonical = json.dumps(serialize_config(cfg), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()


def apply_env_seed(cfg: RunConfig) -> RunConfig:
    """CONVEXFLOW_SEED, when set, overrides the init and geometry seeds."""
    raw = os.environ.get(ENV_SEED)
    if raw is None:
        return cfg
    try:
        seed = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{ENV_SEED} must be an integer, got {raw!r}") from exc
    params = dict(cfg.init_params)
    if cfg.init_type == "random":
        params["seed"] = seed
    return RunConfig(
        init_type=cfg.init_type,
        init_params=params,
        flow=cfg.flow,
        t_end=cfg.t_end,
        n=cfg.n,
        cfl=cfg.cfl,
        scheme=cfg.scheme,
        record_stride=cfg.record_stride,
        projection=cfg.projection,
        radii_seed=seed,
        snapshot_stride=cfg.snapshot_stride,
    )


def build_initial(cfg: RunConfig) -> CurvatureProfile:
    grid = AngleGrid(cfg.n)
    params = cfg.init_params
    if cfg.init_type == "circle":
        return circle_profile(params["R"], grid)
    if cfg.init_type == "ellipse":
        return ellipse_profile(params["a"], params["b"], grid)
    if cfg.init_type == "support_fourier":
        coeffs = SupportCoefficients(
            params["a0"], tuple((j, c, s) for j, c, s in params.get("harmonics", []))
        )
        return support_fourier_profile(coeffs, grid)
    if cfg.init_type == "random":
        return random_convex_profile(params["seed"], params["budget"], params["j_max"], grid)
    raise ConfigError(f"unknown init type {cfg.init_type!r}")


def build_flow_spec(cfg: RunConfig) -> FlowSpec:
    return FlowSpec(cfg.flow)


def build_solver_config(cfg: RunConfig) -> SolverConfig:
    return SolverConfig(
        t_end=cfg.t_end,
        scheme=cfg.scheme,
        cfl=cfg.cfl,
        record_stride=cfg.record_stride,
        projection=cfg.projection,
    )
