"""Ground-truth crop growth oracle.

Plays the role of the real plant in desk-scale experiments.  Growth is
logistic in stem length, scaled by a multiplicative Gaussian suitability of
the current climate; each growing period has its own climate optima and
rates.  Leaf count is derived from stem length, flower volume accumulates
only while blooming, and period transitions follow stem-length thresholds
(germination -> seedling -> mature) and a residence time (mature -> blooming).
Sex is drawn at sowing but hidden until the mature period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

import numpy as np

from .env import (
    VARIABLES,
    ActuatorParams,
    EnvState,
    GreenhouseEnv,
    OutdoorProfile,
    Setpoints,
)
from .seeding import substream

# Exponent floor keeps suitability strictly positive under extreme climates.
_MIN_LOG_SUITABILITY = -700.0


class GrowingPeriod(Enum):
    GERMINATION = 0
    SEEDLING = 1
    MATURE = 2
    BLOOMING = 3

    def __lt__(self, other: "GrowingPeriod") -> bool:
        return self.value < other.value

    def __le__(self, other: "GrowingPeriod") -> bool:
        return self.value <= other.value

    def __gt__(self, other: "GrowingPeriod") -> bool:
        return self.value > other.value

    def __ge__(self, other: "GrowingPeriod") -> bool:
        return self.value >= other.value


class Sex(Enum):
    FEMALE = "female"
    MALE = "male"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Morphology:
    stem_length_cm: float
    leaf_count: int
    leaf_area_cm2: float
    flower_volume_cm3: float

    def __post_init__(self) -> None:
        if self.stem_length_cm < 0 or self.leaf_area_cm2 < 0 or self.flower_volume_cm3 < 0:
            raise ValueError("morphology fields must be >= 0")
        if self.leaf_count < 0 or not isinstance(self.leaf_count, int):
            raise ValueError("leaf_count must be a non-negative integer")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (
            self.stem_length_cm,
            float(self.leaf_count),
            self.leaf_area_cm2,
            self.flower_volume_cm3,
        )


ZERO_MORPHOLOGY = Morphology(0.0, 0, 0.0, 0.0)


@dataclass(frozen=True)
class PlantState:
    morphology: Morphology
    period: GrowingPeriod
    sex: Sex
    age_s: float
    time_in_period_s: float
    latent_sex: Sex  # drawn at sowing, revealed when the mature period starts

    def __post_init__(self) -> None:
        if not self.age_s >= self.time_in_period_s >= 0:
            raise ValueError("requires age_s >= time_in_period_s >= 0")


@dataclass(frozen=True)
class PeriodParams:
    """Climate response and growth rates for one growing period."""

    mu: tuple[float, float, float, float]  # suitability optimum, order as VARIABLES
    sigma: tuple[float, float, float, float]  # suitability width, > 0
    r_stem_cm_per_day: float
    r_flower_cm3_per_day: float = 0.0

    def __post_init__(self) -> None:
        if len(self.mu) != 4 or len(self.sigma) != 4:
            raise ValueError("mu and sigma must have one entry per climate variable")
        if any(s <= 0 for s in self.sigma):
            raise ValueError("sigma entries must be > 0")
        if self.r_stem_cm_per_day < 0 or self.r_flower_cm3_per_day < 0:
            raise ValueError("growth rates must be >= 0")


@dataclass(frozen=True)
class OracleParams:
    germination: PeriodParams
    seedling: PeriodParams
    mature: PeriodParams
    blooming: PeriodParams
    stem_max_cm: float
    lambda_leaf_per_cm: float  # leaves per cm of stem
    alpha_area_cm2_per_leaf: float
    delta1_cm: float  # germination -> seedling stem threshold
    delta2_cm: float  # seedling -> mature stem threshold
    mature_duration_s: float  # residence time before blooming
    p_female: float
    gs_stem_weight: float = 1.0
    gs_leaf_weight: float = 1.0

    def __post_init__(self) -> None:
        if not 0 < self.delta1_cm < self.delta2_cm < self.stem_max_cm:
            raise ValueError("requires 0 < delta1 < delta2 < stem_max")
        if not 0 <= self.p_female <= 1:
            raise ValueError("p_female must be in [0, 1]")
        if self.lambda_leaf_per_cm < 0 or self.alpha_area_cm2_per_leaf < 0:
            raise ValueError("leaf parameters must be >= 0")
        if self.mature_duration_s < 0:
            raise ValueError("mature_duration_s must be >= 0")

    def for_period(self, period: GrowingPeriod) -> PeriodParams:
        return {
            GrowingPeriod.GERMINATION: self.germination,
            GrowingPeriod.SEEDLING: self.seedling,
            GrowingPeriod.MATURE: self.mature,
            GrowingPeriod.BLOOMING: self.blooming,
        }[period]


def suitability(x: EnvState, period: GrowingPeriod, params: OracleParams) -> float:
    """Climate suitability in (0, 1]: product of per-variable Gaussian factors.

    Equals 1 exactly when every variable sits at the period's optimum.  The
    exponent is floored so the result stays strictly positive for any finite
    climate.
    """
    pp = params.for_period(period)
    log_g = 0.0
    for value, mu, sigma in zip(x.as_tuple(), pp.mu, pp.sigma):
        z = (value - mu) / sigma
        log_g -= 0.5 * z * z
    return math.exp(max(log_g, _MIN_LOG_SUITABILITY))


def period_transition(p: PlantState, params: OracleParams) -> PlantState:
    """Apply at most one forward period transition.

    Stem length drives germination -> seedling (delta1) and seedling ->
    mature (delta2); residence time drives mature -> blooming.  Sex becomes
    known on entering the mature period and never changes afterwards.
    """
    stem = p.morphology.stem_length_cm
    if p.period is GrowingPeriod.GERMINATION and stem >= params.delta1_cm:
        return replace(p, period=GrowingPeriod.SEEDLING, time_in_period_s=0.0)
    if p.period is GrowingPeriod.SEEDLING and stem >= params.delta2_cm:
        return replace(
            p, period=GrowingPeriod.MATURE, time_in_period_s=0.0, sex=p.latent_sex
        )
    if (
        p.period is GrowingPeriod.MATURE
        and p.time_in_period_s >= params.mature_duration_s
    ):
        return replace(p, period=GrowingPeriod.BLOOMING, time_in_period_s=0.0)
    return p


def grow_step(p: PlantState, x: EnvState, dt: float, params: OracleParams) -> PlantState:
    """Advance the plant by dt seconds under climate x.

    Stem grows logistically at the period's maximum rate scaled by climate
    suitability; leaf count is floor(lambda * stem); leaf area is
    alpha * leaf_count; flower volume accumulates only while blooming.
    The period transition rule is applied after growth.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    pp = params.for_period(p.period)
    g = suitability(x, p.period, params)
    days = dt / 86400.0

    stem = p.morphology.stem_length_cm
    stem += pp.r_stem_cm_per_day * g * days * (1.0 - stem / params.stem_max_cm)
    leaf_count = int(math.floor(params.lambda_leaf_per_cm * stem))
    leaf_area = params.alpha_area_cm2_per_leaf * leaf_count
    flower = p.morphology.flower_volume_cm3
    if p.period is GrowingPeriod.BLOOMING:
        flower += pp.r_flower_cm3_per_day * g * days

    grown = replace(
        p,
        morphology=Morphology(stem, leaf_count, leaf_area, flower),
        age_s=p.age_s + dt,
        time_in_period_s=p.time_in_period_s + dt,
    )
    return period_transition(grown, params)


def growth_situation(p: PlantState, w_stem: float = 1.0, w_leaf: float = 1.0) -> float:
    """Scalar crop-progress measure.

    Before blooming: w_stem * stem_length + w_leaf * leaf_count (default
    weights 1/1, i.e. the plain sum).  While blooming: flower volume.
    """
    if p.period is GrowingPeriod.BLOOMING:
        return p.morphology.flower_volume_cm3
    return w_stem * p.morphology.stem_length_cm + w_leaf * p.morphology.leaf_count


def assign_sex(rng: np.random.Generator, p_female: float) -> Sex:
    """One Bernoulli(p_female) draw from the given generator."""
    if not 0 <= p_female <= 1:
        raise ValueError("p_female must be in [0, 1]")
    return Sex.FEMALE if rng.random() < p_female else Sex.MALE


def sow(params: OracleParams, rng: np.random.Generator) -> PlantState:
    """Fresh plant at age zero with a hidden sex draw."""
    return PlantState(
        morphology=ZERO_MORPHOLOGY,
        period=GrowingPeriod.GERMINATION,
        sex=Sex.UNKNOWN,
        age_s=0.0,
        time_in_period_s=0.0,
        latent_sex=assign_sex(rng, params.p_female),
    )


ScheduleFn = Callable[[int, np.random.Generator], Setpoints]


def random_schedule(params: ActuatorParams) -> ScheduleFn:
    """Setpoint schedule drawing each variable uniformly over its range."""

    def schedule(step: int, rng: np.random.Generator) -> Setpoints:
        return Setpoints(
            *(
                rng.uniform(params.get(name).range_min, params.get(name).range_max)
                for name in VARIABLES
            )
        )

    return schedule


@dataclass
class EpisodeTrace:
    """Per-step records of one closed-loop rollout.

    Record n pairs the climate reading achieved during step n with the
    morphology measured at the start of that step, so the reading in record n
    is exactly the climate that drove the morphology change from record n to
    record n+1.  Period and sex labels refer to the start-of-step plant.
    """

    env_states: list[EnvState]
    morphologies: list[Morphology]
    periods: list[GrowingPeriod]
    sexes: list[Sex]
    setpoints: list[Setpoints]
    costs: list[float]
    times_s: list[float]
    latent_sex: Sex

    def __len__(self) -> int:
        return len(self.env_states)


def run_episode(
    env: GreenhouseEnv,
    params: OracleParams,
    steps: int,
    schedule: ScheduleFn,
    schedule_rng: np.random.Generator,
    sow_rng: np.random.Generator,
) -> EpisodeTrace:
    """Roll the climate and the oracle plant forward under a schedule."""
    env.reset()
    plant = sow(params, sow_rng)
    trace = EpisodeTrace([], [], [], [], [], [], [], plant.latent_sex)
    for n in range(steps):
        u = schedule(n, schedule_rng)
        trace.morphologies.append(plant.morphology)
        trace.periods.append(plant.period)
        trace.sexes.append(plant.sex)
        reading, cost = env.step(u)
        trace.env_states.append(reading)
        trace.setpoints.append(u)
        trace.costs.append(cost)
        trace.times_s.append(env.t)
        plant = grow_step(plant, reading, env.dt, params)
    return trace


def generate_dataset(
    env_params: ActuatorParams,
    profile: OutdoorProfile,
    dt: float,
    params: OracleParams,
    episodes: int,
    steps: int,
    seed: int,
    schedule: ScheduleFn | None = None,
    base_cost_per_step: float = 0.0,
    t0: float = 0.0,
) -> list[EpisodeTrace]:
    """Oracle rollouts for surrogate/gate training; deterministic given seed.

    Defaults to a random in-range setpoint schedule.  Each episode draws its
    schedule, sowing, and process-noise streams from named substreams of the
    root seed, so episodes are independent and reproducible.
    """
    if episodes <= 0 or steps <= 0:
        raise ValueError("episodes and steps must be > 0")
    if schedule is None:
        schedule = random_schedule(env_params)
    traces = []
    for ep in range(episodes):
        env = GreenhouseEnv(
            env_params,
            profile,
            dt,
            base_cost_per_step=base_cost_per_step,
            rng=substream(seed, f"env-noise/data/ep{ep}"),
            t0=t0,
        )
        traces.append(
            run_episode(
                env,
                params,
                steps,
                schedule,
                schedule_rng=substream(seed, f"data-schedule/ep{ep}"),
                sow_rng=substream(seed, f"sex/data/ep{ep}"),
            )
        )
    return traces
