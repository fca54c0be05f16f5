"""Setpoint control by per-period Q-learning over a discrete action grid.

The controller picks one of K^4 setpoint combinations each step.  Training
runs the closed loop against either the learned growth surrogate (embedded
mode, the normal path) or the ground-truth oracle (ablation baseline); the
reward is growth_coeff * GS - cost_coeff * cost, with GS taken per step as
either the growth-situation increment (default) or its absolute level.
Evaluation always rolls against the oracle.  A brute-force enumerator over
all action sequences provides exact optima on small deterministic instances.

Every plant starts in germination, so one Q-net per growing period is
maintained and the net matching the current period both selects the action
and receives the transition.  Bootstrap targets use the acting period's own
frozen target copy, also for the rare transitions that cross a period
boundary.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np

from . import nn
from .crop import (
    GrowingPeriod,
    Morphology,
    OracleParams,
    PlantState,
    Sex,
    grow_step,
    growth_situation,
    period_transition,
    sow,
)
from .env import VARIABLES, ActuatorParams, EnvState, OutdoorProfile, Setpoints, env_step, outdoor_at
from .seeding import substream
from .surrogate import GrowthModel, predict_growth

OBSERVATION_DIM = 13


@dataclass(frozen=True)
class RewardParams:
    """Coefficients of the growth/cost trade-off."""

    growth_coeff: float = 1.0  # weight on the growth-situation term
    cost_coeff: float = 0.5  # weight on the cost term
    gs_mode: str = "increment"  # "increment": per-step GS change; "level": absolute GS

    def __post_init__(self) -> None:
        if self.growth_coeff < 0 or self.cost_coeff < 0:
            raise ValueError("coefficients must be >= 0")
        if self.gs_mode not in ("increment", "level"):
            raise ValueError("gs_mode must be 'increment' or 'level'")


def compute_reward(gs: float, cost: float, p: RewardParams) -> float:
    """growth_coeff * GS - cost_coeff * cost.

    In increment mode the caller passes the per-step GS change as gs; in
    level mode the absolute GS.
    """
    if cost < 0:
        raise ValueError("cost must be >= 0")
    return p.growth_coeff * gs - p.cost_coeff * cost


@dataclass(frozen=True)
class ActionGrid:
    """K equally spaced levels per variable; row-major action indexing.

    Variable order (temperature, humidity, light, CO2) with temperature the
    most significant digit, so index 0 is every variable at its range
    minimum and index K^4 - 1 every variable at its maximum.
    """

    levels: tuple[tuple[float, ...], tuple[float, ...], tuple[float, ...], tuple[float, ...]]

    @classmethod
    def from_actuators(cls, params: ActuatorParams, k: int) -> "ActionGrid":
        if k < 2:
            raise ValueError("need at least 2 levels per variable")
        return cls(
            tuple(
                tuple(
                    np.linspace(
                        params.get(name).range_min, params.get(name).range_max, k
                    ).tolist()
                )
                for name in VARIABLES
            )
        )

    @property
    def n_actions(self) -> int:
        return int(np.prod([len(lv) for lv in self.levels]))


def action_to_setpoints(idx: int, grid: ActionGrid) -> Setpoints:
    if not 0 <= idx < grid.n_actions:
        raise ValueError(f"action index {idx} outside [0, {grid.n_actions})")
    values = []
    rem = idx
    for levels in reversed(grid.levels):
        rem, lvl = divmod(rem, len(levels))
        values.append(levels[lvl])
    return Setpoints(*reversed(values))


def setpoints_to_action(u: Setpoints, grid: ActionGrid) -> int:
    idx = 0
    for value, levels in zip(u.as_tuple(), grid.levels):
        deltas = [abs(value - lv) for lv in levels]
        lvl = int(np.argmin(deltas))
        if deltas[lvl] > 1e-9:
            raise ValueError(f"setpoint {value} is not a grid level")
        idx = idx * len(levels) + lvl
    return idx


@dataclass(frozen=True)
class ObservationSpec:
    """Affine feature maps for the 13-dim observation.

    Layout: 4 morphology values, 4 climate values, 4-way period one-hot,
    normalized episode time.  In morphology-only mode (ablation of the
    augmented state) every non-morphology slot is zeroed, keeping the
    vector length fixed.
    """

    morph_scale: tuple[float, float, float, float]
    env_offset: tuple[float, float, float, float]
    env_scale: tuple[float, float, float, float]
    mode: str = "augmented"  # or "morphology"

    def __post_init__(self) -> None:
        if self.mode not in ("augmented", "morphology"):
            raise ValueError("mode must be 'augmented' or 'morphology'")
        if any(s <= 0 for s in self.morph_scale) or any(s <= 0 for s in self.env_scale):
            raise ValueError("scales must be > 0")

    @classmethod
    def from_scenario(
        cls,
        env_params: ActuatorParams,
        oracle: OracleParams,
        flower_scale: float = 100.0,
        mode: str = "augmented",
    ) -> "ObservationSpec":
        leaf_scale = max(1.0, oracle.lambda_leaf_per_cm * oracle.stem_max_cm)
        area_scale = max(1.0, oracle.alpha_area_cm2_per_leaf * leaf_scale)
        return cls(
            morph_scale=(oracle.stem_max_cm, leaf_scale, area_scale, flower_scale),
            env_offset=tuple(env_params.get(n).range_min for n in VARIABLES),
            env_scale=tuple(
                env_params.get(n).range_max - env_params.get(n).range_min
                for n in VARIABLES
            ),
            mode=mode,
        )


def encode_observation(
    plant: PlantState,
    env_state: EnvState,
    t_in_episode_s: float,
    episode_len_s: float,
    spec: ObservationSpec,
) -> np.ndarray:
    """Fixed-order normalized observation vector; pure."""
    obs = np.zeros(OBSERVATION_DIM)
    obs[0:4] = np.asarray(plant.morphology.as_tuple()) / np.asarray(spec.morph_scale)
    if spec.mode == "augmented":
        obs[4:8] = (
            np.asarray(env_state.as_tuple()) - np.asarray(spec.env_offset)
        ) / np.asarray(spec.env_scale)
        obs[8 + plant.period.value] = 1.0
        obs[12] = t_in_episode_s / episode_len_s
    return obs


class Transition(NamedTuple):
    obs: np.ndarray
    action: int
    reward: float
    next_obs: np.ndarray
    done: bool


class ReplayBuffer:
    """Bounded FIFO of transitions with seeded uniform sampling."""

    def __init__(self, capacity: int = 50_000):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._data: list[Transition] = []
        self._pos = 0

    def __len__(self) -> int:
        return len(self._data)

    def push(self, t: Transition) -> None:
        if len(self._data) < self.capacity:
            self._data.append(t)
        else:
            self._data[self._pos] = t
        self._pos = (self._pos + 1) % self.capacity

    def snapshot(self) -> list[Transition]:
        """Stored transitions, oldest first."""
        if len(self._data) < self.capacity:
            return list(self._data)
        return self._data[self._pos :] + self._data[: self._pos]

    def sample(self, batch_size: int, rng: np.random.Generator) -> list[Transition]:
        if len(self._data) < batch_size:
            raise ValueError("buffer smaller than batch size")
        idx = rng.integers(0, len(self._data), size=batch_size)
        return [self._data[i] for i in idx]


@dataclass(frozen=True)
class Hyperparams:
    gamma: float = 0.95
    eps_start: float = 1.0
    eps_end: float = 0.05
    eps_decay_steps: int = 10_000
    learning_rate: float = 1e-3
    batch_size: int = 32
    target_sync_interval: int = 500
    buffer_capacity: int = 50_000
    hidden: int = 64

    def __post_init__(self) -> None:
        if not 0 <= self.gamma < 1:
            raise ValueError("gamma must be in [0, 1)")
        for e in (self.eps_start, self.eps_end):
            if not 0 <= e <= 1:
                raise ValueError("epsilon bounds must be in [0, 1]")
        if self.eps_decay_steps < 1:
            raise ValueError("eps_decay_steps must be >= 1")


def epsilon_at(step: int, hp: Hyperparams) -> float:
    """Exact linear anneal from eps_start to eps_end, then flat at the floor."""
    if step >= hp.eps_decay_steps:
        return hp.eps_end
    frac = max(0.0, step / hp.eps_decay_steps)
    return hp.eps_start + (hp.eps_end - hp.eps_start) * frac


def select_action(q_values: np.ndarray, eps: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy; exploitation breaks ties toward the lowest index.

    With eps = 0 no random draw is consumed, so greedy rollouts never
    advance the generator.
    """
    if not 0 <= eps <= 1:
        raise ValueError("eps must be in [0, 1]")
    if eps > 0 and rng.random() < eps:
        return int(rng.integers(len(q_values)))
    return int(np.argmax(q_values))


def td_target(reward: float, next_q_values: np.ndarray, done: bool, gamma: float) -> float:
    """One-step backup: r, or r + gamma * max(next Q) when not terminal."""
    if not 0 <= gamma < 1:
        raise ValueError("gamma must be in [0, 1)")
    if done:
        return reward
    return reward + gamma * float(np.max(next_q_values))


# --- closed-loop rollout machinery -------------------------------------------


@dataclass(frozen=True)
class ControlScenario:
    """Everything that defines one closed-loop control instance."""

    env_params: ActuatorParams
    profile: OutdoorProfile
    dt: float
    base_cost_per_step: float
    t0: float
    oracle: OracleParams
    episode_steps: int

    def initial_env(self) -> EnvState:
        return outdoor_at(self.profile, self.t0)

    def episode_len_s(self) -> float:
        return self.episode_steps * self.dt


class _LoopState(NamedTuple):
    env: EnvState
    t: float
    plant: PlantState
    gs: float


def _initial_loop_state(scenario: ControlScenario, latent_sex: Sex) -> _LoopState:
    plant = PlantState(
        morphology=Morphology(0.0, 0, 0.0, 0.0),
        period=GrowingPeriod.GERMINATION,
        sex=Sex.UNKNOWN,
        age_s=0.0,
        time_in_period_s=0.0,
        latent_sex=latent_sex,
    )
    gs0 = growth_situation(plant, scenario.oracle.gs_stem_weight, scenario.oracle.gs_leaf_weight)
    return _LoopState(scenario.initial_env(), scenario.t0, plant, gs0)


def _advance_with_surrogate(
    plant: PlantState, morph: Morphology, dt: float, params: OracleParams
) -> PlantState:
    # Surrogate supplies morphology; oracle rules keep period/sex/clock bookkeeping.
    grown = replace(
        plant,
        morphology=morph,
        age_s=plant.age_s + dt,
        time_in_period_s=plant.time_in_period_s + dt,
    )
    return period_transition(grown, params)


def _loop_step(
    scenario: ControlScenario,
    grid: ActionGrid,
    rp: RewardParams,
    state: _LoopState,
    action: int,
    surrogates: dict[GrowingPeriod, GrowthModel] | None = None,
    window: deque | None = None,
    env_rng: np.random.Generator | None = None,
) -> tuple[_LoopState, float, float, Setpoints]:
    """One closed-loop step; returns (next state, reward, step cost, setpoints).

    Shared by agent training, policy evaluation, and brute-force search so
    all three see byte-identical dynamics.  When surrogates are given the
    plant follows the learned model (the climate reading window must be
    supplied); otherwise the oracle.

    The growth-situation rule changes definition at bloom entry (stem +
    leaves before, flower volume after), so increment-mode rewards carry a
    single negative spike on that step; both modes inherit this from the GS
    rules themselves.
    """
    u = action_to_setpoints(action, grid)
    reading, actuation_cost = env_step(
        state.env, u, scenario.env_params, scenario.profile, state.t, scenario.dt,
        rng=env_rng,
    )
    cost = scenario.base_cost_per_step + actuation_cost
    if surrogates is not None:
        window.append(np.asarray(reading.as_tuple()))
        morph = predict_growth(
            surrogates, state.plant.period, np.asarray(window), state.plant.morphology
        )
        plant = _advance_with_surrogate(state.plant, morph, scenario.dt, scenario.oracle)
    else:
        plant = grow_step(state.plant, reading, scenario.dt, scenario.oracle)
    gs = growth_situation(plant, scenario.oracle.gs_stem_weight, scenario.oracle.gs_leaf_weight)
    gs_term = gs - state.gs if rp.gs_mode == "increment" else gs
    reward = compute_reward(gs_term, cost, rp)
    return _LoopState(reading, state.t + scenario.dt, plant, gs), reward, cost, u


def _fresh_window(scenario: ControlScenario, window_len: int) -> deque:
    x0 = np.asarray(scenario.initial_env().as_tuple())
    return deque([x0.copy() for _ in range(window_len)], maxlen=window_len)


# --- training -----------------------------------------------------------------


@dataclass
class PeriodAgent:
    qnet: nn.MLPWeights
    target: nn.MLPWeights
    buffer: ReplayBuffer
    steps: int = 0
    updates: int = 0


def q_loss_and_grads(
    qnet: nn.MLPWeights, x: np.ndarray, actions: np.ndarray, targets: np.ndarray
) -> tuple[float, nn.Grads]:
    """Mean squared TD error over the selected actions, with exact gradients."""
    q, h = nn.forward(qnet, x)
    n = x.shape[0]
    selected = q[np.arange(n), actions]
    err = selected - targets
    loss = float(np.mean(err * err))
    dy = np.zeros_like(q)
    dy[np.arange(n), actions] = 2.0 * err / n
    return loss, nn.backward(qnet, x, h, dy)


def _q_update(ag: PeriodAgent, batch: list[Transition], hp: Hyperparams) -> float:
    x = np.stack([t.obs for t in batch])
    x_next = np.stack([t.next_obs for t in batch])
    next_q, _ = nn.forward(ag.target, x_next)
    targets = np.array(
        [td_target(t.reward, next_q[i], t.done, hp.gamma) for i, t in enumerate(batch)]
    )
    actions = np.array([t.action for t in batch])
    loss, grads = q_loss_and_grads(ag.qnet, x, actions, targets)
    nn.sgd_step(ag.qnet, grads, hp.learning_rate)
    ag.updates += 1
    if ag.updates % hp.target_sync_interval == 0:
        ag.target = ag.qnet.copy()
    return loss


def train_agent(
    scenario: ControlScenario,
    grid: ActionGrid,
    obs_spec: ObservationSpec,
    hp: Hyperparams,
    rp: RewardParams,
    episodes: int,
    seed: int,
    mode: str = "embedded",
    surrogates: dict[GrowingPeriod, GrowthModel] | None = None,
) -> tuple[dict[GrowingPeriod, nn.MLPWeights], list[dict]]:
    """Episodic Q-learning; returns per-period Q-nets and a training log.

    Embedded mode evolves the plant with the learned surrogate (climate
    reading windows are padded with the initial ambient at episode start);
    oracle mode uses the ground-truth plant and serves as the ablation
    baseline.  Deterministic given the seed.
    """
    if mode not in ("embedded", "oracle"):
        raise ValueError("mode must be 'embedded' or 'oracle'")
    use_surrogate = mode == "embedded"
    if use_surrogate:
        if not surrogates:
            raise ValueError("missing surrogate models: embedded mode needs them")
        window_len = next(iter(surrogates.values())).window_len
        if any(m.window_len != window_len for m in surrogates.values()):
            raise ValueError("surrogate models disagree on window length")

    agents: dict[GrowingPeriod, PeriodAgent] = {}
    for period in GrowingPeriod:
        init_rng = substream(seed, f"agent-init/{period.name}")
        qnet = nn.init_mlp(OBSERVATION_DIM, hp.hidden, grid.n_actions, init_rng)
        agents[period] = PeriodAgent(
            qnet=qnet, target=qnet.copy(), buffer=ReplayBuffer(hp.buffer_capacity)
        )

    rng_eps = substream(seed, "agent/epsilon")
    rng_replay = substream(seed, "agent/replay")
    rng_sex = substream(seed, "sex/agent")
    env_rng = substream(seed, "env-noise/agent")

    episode_len_s = scenario.episode_len_s()
    log: list[dict] = []
    for ep in range(episodes):
        state = _initial_loop_state(scenario, sow(scenario.oracle, rng_sex).latent_sex)
        window = _fresh_window(scenario, window_len) if use_surrogate else None
        ep_return = 0.0
        ep_cost = 0.0
        losses: list[float] = []
        for n in range(scenario.episode_steps):
            period = state.plant.period
            ag = agents[period]
            if use_surrogate and period not in surrogates:
                raise ValueError(f"missing surrogate model for period {period.name}")
            obs = encode_observation(
                state.plant, state.env, n * scenario.dt, episode_len_s, obs_spec
            )
            eps = epsilon_at(ag.steps, hp)
            q = nn.forward_one(ag.qnet, obs)
            action = select_action(q, eps, rng_eps)
            next_state, reward, cost, _ = _loop_step(
                scenario, grid, rp, state, action,
                surrogates=surrogates if use_surrogate else None,
                window=window,
                env_rng=env_rng,
            )
            done = n == scenario.episode_steps - 1
            next_obs = encode_observation(
                next_state.plant, next_state.env, (n + 1) * scenario.dt,
                episode_len_s, obs_spec,
            )
            ag.buffer.push(Transition(obs, action, reward, next_obs, done))
            if len(ag.buffer) >= hp.batch_size:
                losses.append(_q_update(ag, ag.buffer.sample(hp.batch_size, rng_replay), hp))
            ag.steps += 1
            ep_return += reward
            ep_cost += cost
            state = next_state
        log.append(
            {
                "episode": ep,
                "return": ep_return,
                "total_cost": ep_cost,
                "final_gs": state.gs,
                "final_period": state.plant.period.name,
                "mean_loss": float(np.mean(losses)) if losses else math.nan,
                "epsilon": epsilon_at(agents[GrowingPeriod.GERMINATION].steps, hp),
            }
        )
    return {p: agents[p].qnet for p in GrowingPeriod}, log


# --- evaluation ---------------------------------------------------------------

ActionFn = Callable[[np.ndarray, GrowingPeriod, int], int]


def greedy_policy(qnets: dict[GrowingPeriod, nn.MLPWeights]) -> ActionFn:
    def act(obs: np.ndarray, period: GrowingPeriod, step: int) -> int:
        return int(np.argmax(nn.forward_one(qnets[period], obs)))

    return act


def random_policy(n_actions: int, rng: np.random.Generator) -> ActionFn:
    def act(obs: np.ndarray, period: GrowingPeriod, step: int) -> int:
        return int(rng.integers(n_actions))

    return act


@dataclass
class EvalEpisode:
    rows: list[dict]
    episode_return: float
    total_cost: float
    final_gs: float
    final_period: GrowingPeriod


def rollout(
    scenario: ControlScenario,
    grid: ActionGrid,
    obs_spec: ObservationSpec,
    rp: RewardParams,
    action_fn: ActionFn,
    latent_sex: Sex,
    env_rng: np.random.Generator | None = None,
) -> EvalEpisode:
    """One oracle-dynamics episode under a policy, logged row by row.

    Each row is a post-step snapshot: the climate reading achieved during
    the step, the setpoints commanded, the morphology/GS after growth, the
    step cost, and the reward.  GS starts at zero for a fresh sowing, so the
    reward column can be recomputed from the gs and step_cost columns alone.
    """
    state = _initial_loop_state(scenario, latent_sex)
    episode_len_s = scenario.episode_len_s()
    rows: list[dict] = []
    ep_return = 0.0
    ep_cost = 0.0
    for n in range(scenario.episode_steps):
        obs = encode_observation(
            state.plant, state.env, n * scenario.dt, episode_len_s, obs_spec
        )
        action = action_fn(obs, state.plant.period, n)
        state, reward, cost, u = _loop_step(
            scenario, grid, rp, state, action, env_rng=env_rng
        )
        ep_return += reward
        ep_cost += cost
        plant = state.plant
        rows.append(
            {
                "step": n,
                "sim_time_s": state.t,
                "period": plant.period.name,
                "sex": plant.sex.value,
                "temperature_c": state.env.temperature_c,
                "humidity_rel": state.env.humidity_rel,
                "light_ppfd": state.env.light_ppfd,
                "co2_ppm": state.env.co2_ppm,
                "set_temperature_c": u.temperature_c,
                "set_humidity_rel": u.humidity_rel,
                "set_light_ppfd": u.light_ppfd,
                "set_co2_ppm": u.co2_ppm,
                "stem_length_cm": plant.morphology.stem_length_cm,
                "leaf_count": plant.morphology.leaf_count,
                "leaf_area_cm2": plant.morphology.leaf_area_cm2,
                "flower_volume_cm3": plant.morphology.flower_volume_cm3,
                "gs": state.gs,
                "step_cost": cost,
                "reward": reward,
            }
        )
    return EvalEpisode(rows, ep_return, ep_cost, state.gs, state.plant.period)


def evaluate_policy(
    scenario: ControlScenario,
    grid: ActionGrid,
    obs_spec: ObservationSpec,
    rp: RewardParams,
    qnets: dict[GrowingPeriod, nn.MLPWeights],
    episodes: int,
    seed: int,
) -> list[EvalEpisode]:
    """Greedy (eps = 0) rollouts against the true oracle, never the surrogate."""
    out = []
    policy = greedy_policy(qnets)
    for ep in range(episodes):
        latent = sow(scenario.oracle, substream(seed, f"sex/eval/ep{ep}")).latent_sex
        env_rng = substream(seed, f"env-noise/eval/ep{ep}")
        out.append(rollout(scenario, grid, obs_spec, rp, policy, latent, env_rng))
    return out


def evaluate_random_policy(
    scenario: ControlScenario,
    grid: ActionGrid,
    obs_spec: ObservationSpec,
    rp: RewardParams,
    episodes: int,
    seed: int,
) -> list[EvalEpisode]:
    """Seeded uniform-random baseline under identical conditions."""
    out = []
    for ep in range(episodes):
        latent = sow(scenario.oracle, substream(seed, f"sex/eval/ep{ep}")).latent_sex
        env_rng = substream(seed, f"env-noise/eval/ep{ep}")
        policy = random_policy(grid.n_actions, substream(seed, f"random-policy/ep{ep}"))
        out.append(rollout(scenario, grid, obs_spec, rp, policy, latent, env_rng))
    return out


# --- brute-force policy oracle -------------------------------------------------


def replay_sequence(
    scenario: ControlScenario,
    grid: ActionGrid,
    rp: RewardParams,
    actions: tuple[int, ...],
) -> float:
    """Deterministic return of a fixed action sequence (oracle dynamics)."""
    state = _initial_loop_state(scenario, Sex.FEMALE)
    total = 0.0
    for action in actions:
        state, reward, _, _ = _loop_step(scenario, grid, rp, state, action)
        total += reward
    return total


def brute_force_optimum(
    scenario: ControlScenario,
    grid: ActionGrid,
    rp: RewardParams,
    horizon: int | None = None,
    max_sequences: int = 1_000_000,
) -> tuple[tuple[int, ...], float]:
    """Exhaustive search over all action sequences; exact on noiseless configs.

    Depth-first over the action-prefix tree so shared prefixes are stepped
    once.  Ties resolve to the lexicographically smallest sequence.  Sex
    never affects growth, so a fixed latent draw is used.
    """
    if not scenario.env_params.noiseless():
        raise ValueError("brute force requires a noiseless scenario")
    steps = scenario.episode_steps if horizon is None else horizon
    n_seq = grid.n_actions**steps
    if n_seq > max_sequences:
        raise ValueError(
            f"search space {grid.n_actions}^{steps} = {n_seq} exceeds cap {max_sequences}"
        )

    best_return = -math.inf
    best_seq: tuple[int, ...] = ()

    def recurse(state: _LoopState, depth: int, acc: float, seq: tuple[int, ...]) -> None:
        nonlocal best_return, best_seq
        if depth == steps:
            if acc > best_return:
                best_return = acc
                best_seq = seq
            return
        for action in range(grid.n_actions):
            nxt, reward, _, _ = _loop_step(scenario, grid, rp, state, action)
            recurse(nxt, depth + 1, acc + reward, seq + (action,))

    recurse(_initial_loop_state(scenario, Sex.FEMALE), 0, 0.0, ())
    return best_seq, best_return


# --- persistence ---------------------------------------------------------------


def qnet_to_doc(
    qnet: nn.MLPWeights, period: GrowingPeriod, hp: Hyperparams, seed: int
) -> dict:
    return {
        "format": nn.WEIGHTS_FORMAT,
        "kind": "q-network",
        "period": period.name,
        "seed": seed,
        "config": {
            "gamma": hp.gamma,
            "eps_start": hp.eps_start,
            "eps_end": hp.eps_end,
            "eps_decay_steps": hp.eps_decay_steps,
            "learning_rate": hp.learning_rate,
            "batch_size": hp.batch_size,
            "target_sync_interval": hp.target_sync_interval,
            "buffer_capacity": hp.buffer_capacity,
            "hidden": hp.hidden,
        },
        **nn.mlp_to_doc(qnet),
    }


def qnet_from_doc(doc: dict) -> tuple[GrowingPeriod, nn.MLPWeights]:
    return GrowingPeriod[doc["period"]], nn.mlp_from_doc(doc)
