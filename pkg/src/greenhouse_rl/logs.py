"""CSV artifacts and their wire-format companions.

Two row schemas live here: the per-step episode log written during
evaluation, and the dataset rows produced by oracle rollouts.  Episode logs
are also emitted as newline-delimited wire messages and replay-validated, so
every run exercises the telemetry path end to end.  Floats are written in
shortest round-trip form, which keeps files byte-stable across identical
runs and lossless to re-read.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .crop import EpisodeTrace, GrowingPeriod, Morphology, Sex
from .env import VARIABLES, EnvState, Setpoints
from .wire import (
    Ack,
    Message,
    MorphReport,
    SensorReading,
    SetpointCommand,
    session_replay,
    write_session,
)

EPISODE_LOG_COLUMNS = (
    "step",
    "sim_time_s",
    "period",
    "sex",
    "temperature_c",
    "humidity_rel",
    "light_ppfd",
    "co2_ppm",
    "set_temperature_c",
    "set_humidity_rel",
    "set_light_ppfd",
    "set_co2_ppm",
    "stem_length_cm",
    "leaf_count",
    "leaf_area_cm2",
    "flower_volume_cm3",
    "gs",
    "step_cost",
    "reward",
)

DATASET_COLUMNS = ("episode",) + EPISODE_LOG_COLUMNS[:-3] + ("step_cost",)

_SENSOR_NODES = {
    "temperature_c": "sensor-t",
    "humidity_rel": "sensor-h",
    "light_ppfd": "sensor-l",
    "co2_ppm": "sensor-c",
}


def write_csv(path: str | Path, rows: list[dict], columns: tuple[str, ...]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([row[c] for c in columns])


def read_csv(path: str | Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def episode_messages(rows: list[dict]) -> list[Message]:
    """Wire messages for one episode log, in physical order per step:
    command, acknowledgment, the four sensor readings, morphology report."""
    messages: list[Message] = []
    for row in rows:
        ts = int(row["sim_time_s"])
        seq = int(row["step"])
        messages.append(
            SetpointCommand(
                seq=seq,
                temperature_c=row["set_temperature_c"],
                humidity_rel=row["set_humidity_rel"],
                light_ppfd=row["set_light_ppfd"],
                co2_ppm=row["set_co2_ppm"],
                ts=ts,
            )
        )
        messages.append(Ack(seq=seq, status="ok", ts=ts))
        for metric in VARIABLES:
            messages.append(
                SensorReading(
                    node_id=_SENSOR_NODES[metric],
                    metric=metric,
                    value=row[metric],
                    ts=ts,
                )
            )
        messages.append(
            MorphReport(
                node_id="camera-0",
                stem_length_cm=row["stem_length_cm"],
                leaf_count=int(row["leaf_count"]),
                leaf_area_cm2=row["leaf_area_cm2"],
                flower_volume_cm3=row["flower_volume_cm3"],
                ts=ts,
            )
        )
    return messages


def write_episode_log(
    rows: list[dict], csv_path: str | Path, ndjson_path: str | Path | None = None
) -> None:
    """Episode CSV plus companion .ndjson wire log, replay-validated."""
    for i, row in enumerate(rows):
        missing = set(EPISODE_LOG_COLUMNS) - set(row)
        extra = set(row) - set(EPISODE_LOG_COLUMNS)
        if missing or extra:
            raise ValueError(
                f"episode log row {i}: missing {sorted(missing)}, extra {sorted(extra)}"
            )
    write_csv(csv_path, rows, EPISODE_LOG_COLUMNS)
    if ndjson_path is not None:
        messages = episode_messages(rows)
        violations = session_replay(messages)
        if violations:
            raise RuntimeError(f"wire log failed replay validation: {violations[:3]}")
        write_session(ndjson_path, messages)


# --- dataset rows <-> episode traces -----------------------------------------


def traces_to_rows(traces: list[EpisodeTrace]) -> list[dict]:
    rows = []
    for ep, trace in enumerate(traces):
        for n in range(len(trace)):
            x = trace.env_states[n]
            m = trace.morphologies[n]
            u = trace.setpoints[n]
            rows.append(
                {
                    "episode": ep,
                    "step": n,
                    "sim_time_s": trace.times_s[n],
                    "period": trace.periods[n].name,
                    "sex": trace.sexes[n].value,
                    "temperature_c": x.temperature_c,
                    "humidity_rel": x.humidity_rel,
                    "light_ppfd": x.light_ppfd,
                    "co2_ppm": x.co2_ppm,
                    "set_temperature_c": u.temperature_c,
                    "set_humidity_rel": u.humidity_rel,
                    "set_light_ppfd": u.light_ppfd,
                    "set_co2_ppm": u.co2_ppm,
                    "stem_length_cm": m.stem_length_cm,
                    "leaf_count": m.leaf_count,
                    "leaf_area_cm2": m.leaf_area_cm2,
                    "flower_volume_cm3": m.flower_volume_cm3,
                    "step_cost": trace.costs[n],
                }
            )
    return rows


def rows_to_traces(rows: list[dict]) -> list[EpisodeTrace]:
    """Rebuild traces from dataset rows (lossless: floats round-trip)."""
    episodes: dict[int, list[dict]] = {}
    for row in rows:
        episodes.setdefault(int(row["episode"]), []).append(row)
    traces = []
    for ep in sorted(episodes):
        ep_rows = sorted(episodes[ep], key=lambda r: int(r["step"]))
        trace = EpisodeTrace([], [], [], [], [], [], [], Sex.UNKNOWN)
        for row in ep_rows:
            trace.env_states.append(
                EnvState(
                    float(row["temperature_c"]),
                    float(row["humidity_rel"]),
                    float(row["light_ppfd"]),
                    float(row["co2_ppm"]),
                )
            )
            trace.morphologies.append(
                Morphology(
                    float(row["stem_length_cm"]),
                    int(row["leaf_count"]),
                    float(row["leaf_area_cm2"]),
                    float(row["flower_volume_cm3"]),
                )
            )
            trace.periods.append(GrowingPeriod[row["period"]])
            trace.sexes.append(Sex(row["sex"]))
            trace.setpoints.append(
                Setpoints(
                    float(row["set_temperature_c"]),
                    float(row["set_humidity_rel"]),
                    float(row["set_light_ppfd"]),
                    float(row["set_co2_ppm"]),
                )
            )
            trace.costs.append(float(row["step_cost"]))
            trace.times_s.append(float(row["sim_time_s"]))
        traces.append(trace)
    return traces
