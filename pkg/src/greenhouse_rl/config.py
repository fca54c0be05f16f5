"""Run configuration: one versioned JSON document drives every subcommand.

A config file contains ``config_version`` plus overrides of the documented
default tree below; unknown keys anywhere are rejected so typos fail loudly.
``resolve_config`` expands a user document into the fully-explicit form that
gets echoed into every output directory.  Builder helpers turn a resolved
config into the runtime objects.

``tau_outdoor_s`` may be null to disable outdoor coupling for a variable.
"""

from __future__ import annotations

import copy
import json
import math
from importlib import resources
from pathlib import Path

from .agent import (
    ActionGrid,
    ControlScenario,
    Hyperparams,
    ObservationSpec,
    RewardParams,
)
from .crop import OracleParams, PeriodParams
from .env import (
    ActuatorParams,
    ConstantChannel,
    OutdoorProfile,
    SineChannel,
    VariableActuator,
)
from .gate import GateThresholds
from .surrogate import TrainConfig

CONFIG_VERSION = 1

# Keys where JSON null is meaningful (null tau_outdoor_s = no coupling).
_NULLABLE_KEYS = {"tau_outdoor_s"}

_DEFAULT_CONFIG: dict = {
    "config_version": CONFIG_VERSION,
    "env": {
        "dt_s": 300.0,
        "t0_s": 32400.0,  # episodes start at 09:00 simulation time
        "base_cost_per_step": 0.002,
        "actuators": {
            "temperature_c": {
                "tau_actuator_s": 1800.0,
                "tau_outdoor_s": 7200.0,
                "range_min": 10.0,
                "range_max": 35.0,
                "kappa": 0.004,
                "noise_sigma": 0.0,
            },
            "humidity_rel": {
                "tau_actuator_s": 1800.0,
                "tau_outdoor_s": 7200.0,
                "range_min": 0.3,
                "range_max": 0.9,
                "kappa": 0.1,
                "noise_sigma": 0.0,
            },
            "light_ppfd": {
                "tau_actuator_s": 300.0,
                "tau_outdoor_s": 7200.0,
                "range_min": 0.0,
                "range_max": 800.0,
                "kappa": 2e-05,
                "noise_sigma": 0.0,
            },
            "co2_ppm": {
                "tau_actuator_s": 600.0,
                "tau_outdoor_s": 7200.0,
                "range_min": 350.0,
                "range_max": 1200.0,
                "kappa": 2e-05,
                "noise_sigma": 0.0,
            },
        },
        "outdoor": {
            "temperature_c": {
                "kind": "sine",
                "mean": 12.0,
                "amplitude": 8.0,
                "period_s": 86400.0,
                "peak_time_s": 46800.0,
            },
            "humidity_rel": {"kind": "constant", "value": 0.6},
            "light_ppfd": {
                "kind": "sine",
                "mean": 250.0,
                "amplitude": 450.0,
                "period_s": 86400.0,
                "peak_time_s": 46800.0,
            },
            "co2_ppm": {"kind": "constant", "value": 420.0},
        },
    },
    "oracle": {
        "stem_max_cm": 80.0,
        "lambda_leaf_per_cm": 0.1,
        "alpha_area_cm2_per_leaf": 6.0,
        "delta1_cm": 2.0,
        "delta2_cm": 15.0,
        "mature_duration_s": 43200.0,
        "p_female": 0.5,
        "gs_stem_weight": 1.0,
        "gs_leaf_weight": 1.0,
        "periods": {
            "germination": {
                "mu": [26.0, 0.7, 250.0, 700.0],
                "sigma": [6.0, 0.2, 350.0, 400.0],
                "r_stem_cm_per_day": 8.0,
                "r_flower_cm3_per_day": 0.0,
            },
            "seedling": {
                "mu": [24.0, 0.65, 450.0, 900.0],
                "sigma": [6.0, 0.2, 350.0, 400.0],
                "r_stem_cm_per_day": 10.0,
                "r_flower_cm3_per_day": 0.0,
            },
            "mature": {
                "mu": [22.0, 0.6, 550.0, 1000.0],
                "sigma": [6.0, 0.2, 350.0, 400.0],
                "r_stem_cm_per_day": 8.0,
                "r_flower_cm3_per_day": 0.0,
            },
            "blooming": {
                "mu": [20.0, 0.55, 650.0, 800.0],
                "sigma": [5.0, 0.18, 300.0, 350.0],
                "r_stem_cm_per_day": 3.0,
                "r_flower_cm3_per_day": 60.0,
            },
        },
    },
    "dataset": {"episodes": 50, "steps": 1900},
    "surrogate": {
        "window_len": 4,
        "hidden": 32,
        "learning_rate": 0.05,
        "momentum": 0.9,
        "lr_decay": 1.0,
        "batch_size": 128,
        "epochs": 250,
        "val_fraction": 0.2,
    },
    "gate": {
        "delta1_cm": 2.0,
        "delta2_cm": 15.0,
        "learning_rate": 0.5,
        "epochs": 400,
        "holdout_fraction": 0.25,
    },
    "agent": {
        "grid_levels": 3,
        "mode": "embedded",
        "observation": "augmented",
        "flower_obs_scale": 100.0,
        "reward": {"growth_coeff": 1.0, "cost_coeff": 0.5, "gs_mode": "increment"},
        "hyperparams": {
            "gamma": 0.95,
            "eps_start": 1.0,
            "eps_end": 0.05,
            "eps_decay_steps": 10000,
            "learning_rate": 0.001,
            "batch_size": 32,
            "target_sync_interval": 500,
            "buffer_capacity": 50000,
            "hidden": 64,
        },
    },
    "run": {
        "seed": 1234,
        "episode_steps": 240,
        "train_episodes": 150,
        "eval_episodes": 20,
        "out_dir": "runs/default",
    },
}


class ConfigError(Exception):
    """Configuration file violates the schema."""


def default_config() -> dict:
    return copy.deepcopy(_DEFAULT_CONFIG)


def _merge(default, user, path: str):
    if isinstance(default, dict):
        if not isinstance(user, dict):
            raise ConfigError(f"{path or 'config'}: expected an object")
        unknown = sorted(set(user) - set(default))
        if unknown:
            raise ConfigError(f"{path or 'config'}: unknown keys {unknown}")
        return {
            key: _merge(default[key], user[key], f"{path}.{key}" if path else key)
            if key in user
            else copy.deepcopy(default[key])
            for key in default
        }
    if isinstance(default, list):
        if not isinstance(user, list) or len(user) != len(default):
            raise ConfigError(f"{path}: expected a list of length {len(default)}")
        return [
            _merge(d, u, f"{path}[{i}]") for i, (d, u) in enumerate(zip(default, user))
        ]
    leaf = path.rsplit(".", 1)[-1]
    if user is None and leaf in _NULLABLE_KEYS:
        return None
    if isinstance(default, bool) or isinstance(user, bool):
        if type(user) is not bool or type(default) is not bool:
            raise ConfigError(f"{path}: expected {type(default).__name__}")
        return user
    if isinstance(default, (int, float)):
        if not isinstance(user, (int, float)):
            raise ConfigError(f"{path}: expected a number")
        if isinstance(default, int) and not float(user).is_integer():
            raise ConfigError(f"{path}: expected an integer")
        return type(default)(user) if isinstance(default, int) else float(user)
    if isinstance(default, str):
        if not isinstance(user, str):
            raise ConfigError(f"{path}: expected a string")
        return user
    raise ConfigError(f"{path}: unsupported value {user!r}")


def resolve_config(user: dict) -> dict:
    """Expand a user config over the defaults; strict about unknown keys."""
    if not isinstance(user, dict):
        raise ConfigError("config root must be a JSON object")
    if user.get("config_version") != CONFIG_VERSION:
        raise ConfigError(
            f"config_version must be {CONFIG_VERSION}, got {user.get('config_version')!r}"
        )
    resolved = _merge(_DEFAULT_CONFIG, user, "")
    if resolved["run"]["seed"] < 0:
        raise ConfigError("run.seed must be >= 0")
    return resolved


def load_config_file(path: str | Path) -> dict:
    p = Path(path)
    try:
        raw = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"{p}: invalid JSON: {e}")
    return resolve_config(raw)


def bundled_config_path(name: str) -> Path:
    """Path of a bundled config ('default', 'small', 'tiny')."""
    ref = resources.files("greenhouse_rl.configs").joinpath(f"{name}.json")
    if not ref.is_file():
        raise ConfigError(f"no bundled config named {name!r}")
    return Path(str(ref))


def dump_config(cfg: dict) -> str:
    return json.dumps(cfg, indent=2) + "\n"


# --- builders ----------------------------------------------------------------


def build_actuators(cfg: dict) -> ActuatorParams:
    def var(name: str) -> VariableActuator:
        c = cfg["env"]["actuators"][name]
        tau_out = c["tau_outdoor_s"]
        return VariableActuator(
            tau_actuator_s=c["tau_actuator_s"],
            tau_outdoor_s=math.inf if tau_out is None else tau_out,
            range_min=c["range_min"],
            range_max=c["range_max"],
            kappa=c["kappa"],
            noise_sigma=c["noise_sigma"],
        )

    try:
        return ActuatorParams(
            temperature_c=var("temperature_c"),
            humidity_rel=var("humidity_rel"),
            light_ppfd=var("light_ppfd"),
            co2_ppm=var("co2_ppm"),
        )
    except ValueError as e:
        raise ConfigError(f"env.actuators: {e}")


def build_profile(cfg: dict) -> OutdoorProfile:
    def channel(name: str):
        c = cfg["env"]["outdoor"][name]
        if c["kind"] == "constant":
            return ConstantChannel(value=c["value"])
        if c["kind"] == "sine":
            return SineChannel(
                mean=c["mean"],
                amplitude=c["amplitude"],
                period_s=c["period_s"],
                peak_time_s=c["peak_time_s"],
            )
        raise ConfigError(f"env.outdoor.{name}.kind: unknown kind {c['kind']!r}")

    return OutdoorProfile(
        temperature_c=channel("temperature_c"),
        humidity_rel=channel("humidity_rel"),
        light_ppfd=channel("light_ppfd"),
        co2_ppm=channel("co2_ppm"),
    )


def build_oracle(cfg: dict) -> OracleParams:
    o = cfg["oracle"]

    def period(name: str) -> PeriodParams:
        p = o["periods"][name]
        return PeriodParams(
            mu=tuple(p["mu"]),
            sigma=tuple(p["sigma"]),
            r_stem_cm_per_day=p["r_stem_cm_per_day"],
            r_flower_cm3_per_day=p["r_flower_cm3_per_day"],
        )

    try:
        return OracleParams(
            germination=period("germination"),
            seedling=period("seedling"),
            mature=period("mature"),
            blooming=period("blooming"),
            stem_max_cm=o["stem_max_cm"],
            lambda_leaf_per_cm=o["lambda_leaf_per_cm"],
            alpha_area_cm2_per_leaf=o["alpha_area_cm2_per_leaf"],
            delta1_cm=o["delta1_cm"],
            delta2_cm=o["delta2_cm"],
            mature_duration_s=o["mature_duration_s"],
            p_female=o["p_female"],
            gs_stem_weight=o["gs_stem_weight"],
            gs_leaf_weight=o["gs_leaf_weight"],
        )
    except ValueError as e:
        raise ConfigError(f"oracle: {e}")


def build_scenario(cfg: dict) -> ControlScenario:
    return ControlScenario(
        env_params=build_actuators(cfg),
        profile=build_profile(cfg),
        dt=cfg["env"]["dt_s"],
        base_cost_per_step=cfg["env"]["base_cost_per_step"],
        t0=cfg["env"]["t0_s"],
        oracle=build_oracle(cfg),
        episode_steps=cfg["run"]["episode_steps"],
    )


def build_grid(cfg: dict) -> ActionGrid:
    return ActionGrid.from_actuators(build_actuators(cfg), cfg["agent"]["grid_levels"])


def build_obs_spec(cfg: dict) -> ObservationSpec:
    return ObservationSpec.from_scenario(
        build_actuators(cfg),
        build_oracle(cfg),
        flower_scale=cfg["agent"]["flower_obs_scale"],
        mode=cfg["agent"]["observation"],
    )


def build_reward(cfg: dict) -> RewardParams:
    r = cfg["agent"]["reward"]
    try:
        return RewardParams(
            growth_coeff=r["growth_coeff"],
            cost_coeff=r["cost_coeff"],
            gs_mode=r["gs_mode"],
        )
    except ValueError as e:
        raise ConfigError(f"agent.reward: {e}")


def build_hyperparams(cfg: dict) -> Hyperparams:
    h = cfg["agent"]["hyperparams"]
    try:
        return Hyperparams(
            gamma=h["gamma"],
            eps_start=h["eps_start"],
            eps_end=h["eps_end"],
            eps_decay_steps=h["eps_decay_steps"],
            learning_rate=h["learning_rate"],
            batch_size=h["batch_size"],
            target_sync_interval=h["target_sync_interval"],
            buffer_capacity=h["buffer_capacity"],
            hidden=h["hidden"],
        )
    except ValueError as e:
        raise ConfigError(f"agent.hyperparams: {e}")


def surrogate_scale_floors(cfg: dict) -> tuple[float, float, float, float]:
    # One measurement unit per field; leaf area is quantized by one leaf.
    return (0.01, 1.0, cfg["oracle"]["alpha_area_cm2_per_leaf"], 0.01)


def build_train_config(cfg: dict, seed: int) -> TrainConfig:
    s = cfg["surrogate"]
    try:
        return TrainConfig(
            window_len=s["window_len"],
            hidden=s["hidden"],
            learning_rate=s["learning_rate"],
            momentum=s["momentum"],
            lr_decay=s["lr_decay"],
            batch_size=s["batch_size"],
            epochs=s["epochs"],
            seed=seed,
            val_fraction=s["val_fraction"],
            target_scale_floors=surrogate_scale_floors(cfg),
        )
    except ValueError as e:
        raise ConfigError(f"surrogate: {e}")


def build_gate_thresholds(cfg: dict) -> GateThresholds:
    try:
        return GateThresholds(
            delta1_cm=cfg["gate"]["delta1_cm"], delta2_cm=cfg["gate"]["delta2_cm"]
        )
    except ValueError as e:
        raise ConfigError(f"gate: {e}")
