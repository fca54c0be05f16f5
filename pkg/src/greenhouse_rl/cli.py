"""Experiment driver.

Subcommands cover the full pipeline: generate-data (oracle rollouts under a
random schedule), train-growth (per-period surrogates), train-gate (stage and
sex classifiers), train-agent (per-period Q-nets against the surrogate or the
oracle), evaluate (greedy rollouts against the oracle, with CSV/NDJSON logs
and a random baseline), brute-force (exact policy oracle), replay-wire
(validate an .ndjson session), and run-all (the whole chain).

Everything is driven by one JSON config (see :mod:`greenhouse_rl.config`);
--seed overrides the config seed and --out the output directory.  The
resolved, fully-expanded config is echoed into the output directory.  Exit
codes: 0 success, 1 usage/config error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import agent as agent_mod
from . import config as config_mod
from . import gate as gate_mod
from . import logs, nn, surrogate, wire
from .config import ConfigError
from .crop import GrowingPeriod, generate_dataset
from .seeding import substream

# Periods with fewer usable windows than this are skipped by train-growth.
MIN_WINDOWS_PER_PERIOD = 10

GATE_METRICS_FILE = "gate/metrics.json"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _load_config(args) -> dict:
    path = Path(args.config)
    if not path.exists() and not path.suffix:
        path = config_mod.bundled_config_path(args.config)
    cfg = config_mod.load_config_file(path)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be >= 0")
        cfg["run"]["seed"] = args.seed
    return cfg


def _out_dir(cfg: dict, args) -> Path:
    out = Path(args.out) if args.out else Path(cfg["run"]["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    cfg["run"]["out_dir"] = str(out)
    (out / "resolved-config.json").write_text(
        config_mod.dump_config(cfg), encoding="utf-8"
    )
    return out


def _require(path: Path, hint: str) -> Path:
    if not path.exists():
        raise RuntimeError(f"missing {hint}: {path} (run the upstream step first)")
    return path


def _dataset_path(out: Path) -> Path:
    return out / "dataset.csv"


def _growth_dir(out: Path) -> Path:
    return out / "growth"


def _derived_seed(root_seed: int, name: str) -> int:
    return int(substream(root_seed, name).integers(2**63))


# --- pipeline stages ----------------------------------------------------------


def stage_generate_data(cfg: dict, out: Path) -> None:
    traces = generate_dataset(
        env_params=config_mod.build_actuators(cfg),
        profile=config_mod.build_profile(cfg),
        dt=cfg["env"]["dt_s"],
        params=config_mod.build_oracle(cfg),
        episodes=cfg["dataset"]["episodes"],
        steps=cfg["dataset"]["steps"],
        seed=cfg["run"]["seed"],
        base_cost_per_step=cfg["env"]["base_cost_per_step"],
        t0=cfg["env"]["t0_s"],
    )
    logs.write_csv(_dataset_path(out), logs.traces_to_rows(traces), logs.DATASET_COLUMNS)
    counts = {p.name: sum(t.periods.count(p) for t in traces) for p in GrowingPeriod}
    print(f"generate-data: {len(traces)} episodes -> {_dataset_path(out)} {counts}")


def stage_train_growth(cfg: dict, out: Path) -> None:
    rows = logs.read_csv(_require(_dataset_path(out), "dataset"))
    traces = logs.rows_to_traces(rows)
    windows = surrogate.build_windows(traces, cfg["surrogate"]["window_len"])
    growth_dir = _growth_dir(out)
    growth_dir.mkdir(exist_ok=True)
    history_rows = []
    metrics: dict = {}
    floors = config_mod.surrogate_scale_floors(cfg)
    for period in GrowingPeriod:
        samples = windows[period]
        if len(samples) < MIN_WINDOWS_PER_PERIOD:
            print(
                f"train-growth: skipping {period.name}: "
                f"{len(samples)} windows < {MIN_WINDOWS_PER_PERIOD}"
            )
            continue
        tc = config_mod.build_train_config(
            cfg, _derived_seed(cfg["run"]["seed"], f"surrogate-seed/{period.name}")
        )
        model, history = surrogate.train(samples, tc)
        nn.save_weights_doc(
            growth_dir / f"{period.name.lower()}.json",
            surrogate.growth_model_to_doc(model, period, tc),
        )
        for epoch, (tr, va) in enumerate(zip(history["train"], history["val"])):
            history_rows.append(
                {"period": period.name, "epoch": epoch, "train_loss": tr, "val_loss": va}
            )
        val_samples = [samples[i] for i in history["val_indices"]]
        nrmse = surrogate.normalized_rmse(model, val_samples, floors)
        metrics[period.name] = {
            "windows": len(samples),
            "best_val_loss": history["best_val"],
            "best_epoch": history["best_epoch"],
            "holdout_nrmse": nrmse.tolist(),
        }
        print(
            f"train-growth: {period.name}: {len(samples)} windows, "
            f"best val loss {history['best_val']:.3g}, "
            f"holdout NRMSE {np.round(nrmse, 4).tolist()}"
        )
    if not metrics:
        raise RuntimeError("train-growth: no period had enough windows to train on")
    logs.write_csv(
        growth_dir / "history.csv",
        history_rows,
        ("period", "epoch", "train_loss", "val_loss"),
    )
    (growth_dir / "metrics.json").write_text(
        json.dumps(metrics, indent=2) + "\n", encoding="utf-8"
    )


def _load_growth_models(out: Path) -> dict:
    growth_dir = _growth_dir(out)
    models = {}
    if growth_dir.is_dir():
        for path in sorted(growth_dir.glob("*.json")):
            if path.name == "metrics.json":
                continue
            doc = nn.load_weights_doc(path, expected_kind="growth-surrogate")
            period, model = surrogate.growth_model_from_doc(doc)
            models[period] = model
    return models


def stage_train_gate(cfg: dict, out: Path) -> None:
    rows = logs.read_csv(_require(_dataset_path(out), "dataset"))
    t0 = cfg["env"]["t0_s"]
    feats, periods, sexes = [], [], []
    for row in rows:
        m = (
            float(row["stem_length_cm"]),
            float(row["leaf_count"]),
            float(row["leaf_area_cm2"]),
            float(row["flower_volume_cm3"]),
        )
        feats.append([*m, float(row["sim_time_s"]) - t0])
        periods.append(row["period"])
        sexes.append(row["sex"])
    feats = np.asarray(feats)
    periods = np.asarray(periods)
    sexes = np.asarray(sexes)

    late = np.isin(periods, (GrowingPeriod.MATURE.name, GrowingPeriod.BLOOMING.name))
    if not late.any():
        raise RuntimeError(
            "train-gate: dataset has no mature/blooming snapshots; "
            "increase dataset.steps"
        )
    stage_x = feats[late]
    stage_y = (periods[late] == GrowingPeriod.BLOOMING.name).astype(int)
    sexed = sexes != "unknown"
    sex_x = feats[sexed]
    sex_y = (sexes[sexed] == "female").astype(int)

    seed = cfg["run"]["seed"]
    holdout = cfg["gate"]["holdout_fraction"]
    metrics = {}
    gate_dir = out / "gate"
    gate_dir.mkdir(exist_ok=True)
    for name, x, y in (("stage", stage_x, stage_y), ("sex", sex_x, sex_y)):
        if len(np.unique(y)) < 2:
            raise RuntimeError(f"train-gate: {name} data has a single class")
        split_rng = substream(seed, f"gate/split/{name}")
        perm = split_rng.permutation(len(y))
        n_hold = max(1, round(len(y) * holdout))
        hold, tr = perm[:n_hold], perm[n_hold:]
        clf = gate_mod.train_classifier(
            x[tr],
            y[tr],
            lr=cfg["gate"]["learning_rate"],
            epochs=cfg["gate"]["epochs"],
            seed=_derived_seed(seed, f"gate-seed/{name}"),
        )
        acc = gate_mod.accuracy(clf, x[hold], y[hold])
        nn.save_weights_doc(
            gate_dir / f"{name}_classifier.json",
            gate_mod.classifier_to_doc(clf, name, seed),
        )
        metrics[f"{name}_holdout_accuracy"] = acc
        metrics[f"{name}_n_train"] = int(len(tr))
        metrics[f"{name}_n_holdout"] = int(len(hold))
        print(f"train-gate: {name} classifier holdout accuracy {acc:.3f}")
    (out / GATE_METRICS_FILE).write_text(
        json.dumps(metrics, indent=2) + "\n", encoding="utf-8"
    )


def stage_train_agent(cfg: dict, out: Path) -> None:
    mode = cfg["agent"]["mode"]
    surrogates = None
    if mode == "embedded":
        surrogates = _load_growth_models(out)
        if not surrogates:
            raise RuntimeError(
                "missing surrogate weights for embedded mode (run train-growth first)"
            )
    qnets, log = agent_mod.train_agent(
        scenario=config_mod.build_scenario(cfg),
        grid=config_mod.build_grid(cfg),
        obs_spec=config_mod.build_obs_spec(cfg),
        hp=config_mod.build_hyperparams(cfg),
        rp=config_mod.build_reward(cfg),
        episodes=cfg["run"]["train_episodes"],
        seed=cfg["run"]["seed"],
        mode=mode,
        surrogates=surrogates,
    )
    agent_dir = out / "agent"
    agent_dir.mkdir(exist_ok=True)
    hp = config_mod.build_hyperparams(cfg)
    for period, qnet in qnets.items():
        nn.save_weights_doc(
            agent_dir / f"qnet_{period.name.lower()}.json",
            agent_mod.qnet_to_doc(qnet, period, hp, cfg["run"]["seed"]),
        )
    logs.write_csv(
        agent_dir / "training_log.csv",
        log,
        ("episode", "return", "total_cost", "final_gs", "final_period", "mean_loss", "epsilon"),
    )
    last = log[-1] if log else {}
    print(
        f"train-agent: {mode} mode, {len(log)} episodes, "
        f"final return {last.get('return', float('nan')):.4f}"
    )


def _load_qnets(out: Path) -> dict:
    agent_dir = out / "agent"
    qnets = {}
    if agent_dir.is_dir():
        for path in sorted(agent_dir.glob("qnet_*.json")):
            period, net = agent_mod.qnet_from_doc(
                nn.load_weights_doc(path, expected_kind="q-network")
            )
            qnets[period] = net
    if len(qnets) < len(GrowingPeriod):
        raise RuntimeError(
            "missing Q-network weights (run train-agent first): "
            f"found {sorted(p.name for p in qnets)}"
        )
    return qnets


def _summary_row(i: int, ep: agent_mod.EvalEpisode) -> dict:
    return {
        "episode": i,
        "return": ep.episode_return,
        "total_cost": ep.total_cost,
        "final_gs": ep.final_gs,
        "final_period": ep.final_period.name,
    }


_SUMMARY_COLUMNS = ("episode", "return", "total_cost", "final_gs", "final_period")


def stage_evaluate(cfg: dict, out: Path) -> None:
    qnets = _load_qnets(out)
    scenario = config_mod.build_scenario(cfg)
    grid = config_mod.build_grid(cfg)
    obs_spec = config_mod.build_obs_spec(cfg)
    rp = config_mod.build_reward(cfg)
    episodes = cfg["run"]["eval_episodes"]
    seed = cfg["run"]["seed"]

    eval_dir = out / "eval"
    eval_dir.mkdir(exist_ok=True)
    results = agent_mod.evaluate_policy(scenario, grid, obs_spec, rp, qnets, episodes, seed)
    for i, ep in enumerate(results):
        logs.write_episode_log(
            ep.rows,
            eval_dir / f"episode_{i:03d}.csv",
            eval_dir / f"episode_{i:03d}.ndjson",
        )
    logs.write_csv(
        eval_dir / "summary.csv",
        [_summary_row(i, ep) for i, ep in enumerate(results)],
        _SUMMARY_COLUMNS,
    )

    baseline = agent_mod.evaluate_random_policy(scenario, grid, obs_spec, rp, episodes, seed)
    logs.write_csv(
        eval_dir / "random_summary.csv",
        [_summary_row(i, ep) for i, ep in enumerate(baseline)],
        _SUMMARY_COLUMNS,
    )
    mean_ret = float(np.mean([ep.episode_return for ep in results]))
    mean_rand = float(np.mean([ep.episode_return for ep in baseline]))
    print(
        f"evaluate: {episodes} episodes, mean return {mean_ret:.4f} "
        f"(random baseline {mean_rand:.4f})"
    )


def stage_brute_force(cfg: dict, out: Path) -> None:
    scenario = config_mod.build_scenario(cfg)
    grid = config_mod.build_grid(cfg)
    rp = config_mod.build_reward(cfg)
    seq, best = agent_mod.brute_force_optimum(scenario, grid, rp)
    doc = {
        "horizon": scenario.episode_steps,
        "n_actions": grid.n_actions,
        "n_sequences": grid.n_actions**scenario.episode_steps,
        "best_return": best,
        "best_sequence": list(seq),
        "best_setpoints": [
            agent_mod.action_to_setpoints(a, grid).as_tuple() for a in seq
        ],
    }
    (out / "brute_force.json").write_text(
        json.dumps(doc, indent=2) + "\n", encoding="utf-8"
    )
    print(f"brute-force: optimum return {best:.6f} over {doc['n_sequences']} sequences")


def stage_replay_wire(path: Path) -> int:
    lines = wire.read_session_lines(_require(path, "wire session log"))
    violations = wire.session_replay(lines)
    if violations:
        for v in violations[:20]:
            print(f"violation at message {v.index}: {v.kind}: {v.detail}", file=sys.stderr)
        print(f"replay-wire: {len(violations)} violation(s) in {len(lines)} messages")
        return 2
    print(f"replay-wire: {len(lines)} messages, zero violations")
    return 0


_STAGES = {
    "generate-data": (stage_generate_data,),
    "train-growth": (stage_train_growth,),
    "train-gate": (stage_train_gate,),
    "train-agent": (stage_train_agent,),
    "evaluate": (stage_evaluate,),
    "brute-force": (stage_brute_force,),
    "run-all": (
        stage_generate_data,
        stage_train_growth,
        stage_train_gate,
        stage_train_agent,
        stage_evaluate,
    ),
}


def main(argv: list[str] | None = None) -> int:
    parser = _Parser(prog="greenhouse-rl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _STAGES:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="config path or bundled name")
        p.add_argument("--seed", type=int, default=None, help="override run.seed")
        p.add_argument("--out", default=None, help="override run.out_dir")
    replay = sub.add_parser("replay-wire")
    replay.add_argument("session", help="path to an .ndjson wire log")

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        if args.command == "replay-wire":
            return stage_replay_wire(Path(args.session))
        cfg = _load_config(args)
        out = _out_dir(cfg, args)
        for stage in _STAGES[args.command]:
            stage(cfg, out)
        return 0
    except ConfigError as e:
        print(f"greenhouse-rl: config error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # runtime failures: missing artifacts, bad state
        print(f"greenhouse-rl: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
