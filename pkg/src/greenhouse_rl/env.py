"""Discrete-time greenhouse climate simulator.

Four controlled variables (temperature, relative humidity, light PPFD, CO2)
each follow a first-order lag toward the commanded setpoint plus a first-order
coupling toward the outdoor ambient, integrated with explicit Euler:

    x' = x + (dt/tau_act) * (u - x) + (dt/tau_out) * (o(t) - x) + sigma*sqrt(dt)*xi

States are clamped to physical bounds after every step.  Each step is charged
a standing base cost plus a per-variable cost proportional to the
actuation-induced state change, so aggressive setpoint moves are expensive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Canonical variable order wherever a climate vector is flattened.
VARIABLES = ("temperature_c", "humidity_rel", "light_ppfd", "co2_ppm")

# Simulator clamp bounds, independent of what the actuators can target.
PHYSICAL_BOUNDS = {
    "temperature_c": (-20.0, 60.0),
    "humidity_rel": (0.0, 1.0),
    "light_ppfd": (0.0, math.inf),
    "co2_ppm": (0.0, math.inf),
}


def _clamp(value: float, bounds: tuple[float, float]) -> float:
    lo, hi = bounds
    return min(max(value, lo), hi)


@dataclass(frozen=True)
class EnvState:
    """Climate snapshot: degrees C, RH fraction, umol m-2 s-1, ppm."""

    temperature_c: float
    humidity_rel: float
    light_ppfd: float
    co2_ppm: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.temperature_c, self.humidity_rel, self.light_ppfd, self.co2_ppm)

    def clamped(self) -> "EnvState":
        return EnvState(
            *(_clamp(v, PHYSICAL_BOUNDS[name]) for name, v in zip(VARIABLES, self.as_tuple()))
        )

    def is_physical(self) -> bool:
        return all(
            PHYSICAL_BOUNDS[name][0] <= v <= PHYSICAL_BOUNDS[name][1]
            for name, v in zip(VARIABLES, self.as_tuple())
        )


@dataclass(frozen=True)
class Setpoints:
    """Target value per climate variable, same units as :class:`EnvState`."""

    temperature_c: float
    humidity_rel: float
    light_ppfd: float
    co2_ppm: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.temperature_c, self.humidity_rel, self.light_ppfd, self.co2_ppm)


@dataclass(frozen=True)
class VariableActuator:
    """Lag dynamics, achievable range and cost coefficient for one variable."""

    tau_actuator_s: float
    tau_outdoor_s: float  # math.inf disables outdoor coupling
    range_min: float
    range_max: float
    kappa: float = 0.0  # cost units per unit of actuation-induced change
    noise_sigma: float = 0.0  # process noise scale per sqrt(second)

    def __post_init__(self) -> None:
        if not self.tau_actuator_s > 0:
            raise ValueError("tau_actuator_s must be > 0")
        if not self.tau_outdoor_s > 0:
            raise ValueError("tau_outdoor_s must be > 0 (use math.inf to disable)")
        if not self.range_min < self.range_max:
            raise ValueError("range_min must be < range_max")
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")


@dataclass(frozen=True)
class ActuatorParams:
    temperature_c: VariableActuator
    humidity_rel: VariableActuator
    light_ppfd: VariableActuator
    co2_ppm: VariableActuator

    def get(self, name: str) -> VariableActuator:
        return getattr(self, name)

    def noiseless(self) -> bool:
        return all(self.get(name).noise_sigma == 0.0 for name in VARIABLES)


@dataclass(frozen=True)
class ConstantChannel:
    value: float

    def at(self, t: float) -> float:
        return self.value


@dataclass(frozen=True)
class SineChannel:
    """Sinusoidal day cycle; value peaks at peak_time_s within each period."""

    mean: float
    amplitude: float
    period_s: float = 86400.0
    peak_time_s: float = 0.0

    def at(self, t: float) -> float:
        phase = 2.0 * math.pi * (t - self.peak_time_s) / self.period_s
        return self.mean + self.amplitude * math.cos(phase)


@dataclass(frozen=True)
class OutdoorProfile:
    """Deterministic ambient conditions as a function of simulation time."""

    temperature_c: ConstantChannel | SineChannel
    humidity_rel: ConstantChannel | SineChannel
    light_ppfd: ConstantChannel | SineChannel
    co2_ppm: ConstantChannel | SineChannel

    def get(self, name: str) -> ConstantChannel | SineChannel:
        return getattr(self, name)


@dataclass
class CostLedger:
    """Accumulates per-step operating cost; never decreases over a run."""

    base_cost_per_step: float = 0.0
    accumulated_cost: float = 0.0

    def charge(self, amount: float) -> None:
        if amount < 0:
            raise ValueError("cost charge must be >= 0")
        self.accumulated_cost += amount


def outdoor_at(profile: OutdoorProfile, t: float) -> EnvState:
    """Ambient climate at time t, clamped to physical bounds. Pure."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return EnvState(*(profile.get(name).at(t) for name in VARIABLES)).clamped()


def check_euler_preconditions(params: ActuatorParams, dt: float) -> None:
    """Reject time steps that break explicit-Euler stability."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    for name in VARIABLES:
        var = params.get(name)
        if dt / var.tau_actuator_s > 1.0:
            raise ValueError(
                f"dt={dt} exceeds tau_actuator_s={var.tau_actuator_s} for {name}"
            )
        if math.isfinite(var.tau_outdoor_s) and dt / var.tau_outdoor_s > 1.0:
            raise ValueError(
                f"dt={dt} exceeds tau_outdoor_s={var.tau_outdoor_s} for {name}"
            )


def env_step(
    x: EnvState,
    u: Setpoints,
    params: ActuatorParams,
    profile: OutdoorProfile,
    t: float,
    dt: float,
    rng: np.random.Generator | None = None,
    ledger: CostLedger | None = None,
) -> tuple[EnvState, float]:
    """Advance the climate one step under setpoints u; returns (state, cost).

    The step cost is the ledger's standing base cost plus
    sum_v kappa_v * |(dt/tau_act_v) * (u_v - x_v)|.  With all noise sigmas at
    zero the step is a pure function of (x, u, t, dt).
    """
    check_euler_preconditions(params, dt)
    ambient = outdoor_at(profile, t)

    new_values = []
    actuation_cost = 0.0
    for name in VARIABLES:
        var = params.get(name)
        xv = getattr(x, name)
        uv = getattr(u, name)
        if not var.range_min <= uv <= var.range_max:
            raise ValueError(
                f"setpoint {uv} for {name} outside actuator range "
                f"[{var.range_min}, {var.range_max}]"
            )
        drift = (dt / var.tau_actuator_s) * (uv - xv)
        pull = 0.0
        if math.isfinite(var.tau_outdoor_s):
            pull = (dt / var.tau_outdoor_s) * (getattr(ambient, name) - xv)
        noise = 0.0
        if var.noise_sigma > 0.0:
            if rng is None:
                raise ValueError("noise_sigma > 0 requires an rng")
            noise = var.noise_sigma * math.sqrt(dt) * rng.standard_normal()
        new_values.append(_clamp(xv + drift + pull + noise, PHYSICAL_BOUNDS[name]))
        actuation_cost += var.kappa * abs(drift)

    base = ledger.base_cost_per_step if ledger is not None else 0.0
    step_cost = base + actuation_cost
    if ledger is not None:
        ledger.charge(step_cost)
    return EnvState(*new_values), step_cost


def reset(profile: OutdoorProfile) -> EnvState:
    """Initial climate: outdoor ambient at t = 0."""
    return outdoor_at(profile, 0.0)


@dataclass
class GreenhouseEnv:
    """Stateful wrapper driving env_step with its own clock and cost ledger.

    Single-threaded per instance; independent instances are safe in parallel.
    """

    params: ActuatorParams
    profile: OutdoorProfile
    dt: float
    base_cost_per_step: float = 0.0
    rng: np.random.Generator | None = None
    t0: float = 0.0
    state: EnvState = field(init=False)
    t: float = field(init=False)
    ledger: CostLedger = field(init=False)

    def __post_init__(self) -> None:
        check_euler_preconditions(self.params, self.dt)
        self.reset()

    def reset(self) -> EnvState:
        self.t = self.t0
        self.state = outdoor_at(self.profile, self.t)
        self.ledger = CostLedger(base_cost_per_step=self.base_cost_per_step)
        return self.state

    def step(self, u: Setpoints) -> tuple[EnvState, float]:
        self.state, cost = env_step(
            self.state, u, self.params, self.profile, self.t, self.dt,
            rng=self.rng, ledger=self.ledger,
        )
        self.t += self.dt
        return self.state, cost
