"""Line-delimited telemetry codec and session validation.

One JSON object per line, UTF-8, fixed key order per message type, "\n"
terminated.  Four message kinds flow between sensor nodes, the gateway and
the controller: sensor readings, morphology reports, setpoint commands and
acknowledgments.  Encoding is canonical (equal messages yield identical
bytes) and decoding is strict: unknown type tags, missing or extra fields,
wrong field types and invariant violations are all rejected, with
distinguishable error classes per failure kind.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Union

METRICS = ("temperature_c", "humidity_rel", "light_ppfd", "co2_ppm")
STATUSES = ("ok", "rejected")


class WireError(ValueError):
    """Base class for codec failures."""


class MalformedSyntaxError(WireError):
    """Line is not one complete JSON object."""


class UnknownTypeError(WireError):
    """Type tag missing or not one of the known message kinds."""


class InvariantViolationError(WireError):
    """Well-formed JSON with a bad field set, type, or value."""


def _check_float(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvariantViolationError(f"{name} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise InvariantViolationError(f"{name} must be finite")
    return value


def _check_nonneg_float(name: str, value) -> float:
    value = _check_float(name, value)
    if value < 0:
        raise InvariantViolationError(f"{name} must be >= 0")
    return value


def _check_nonneg_int(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvariantViolationError(f"{name} must be an integer, got {value!r}")
    if value < 0:
        raise InvariantViolationError(f"{name} must be >= 0")
    return value


def _check_str(name: str, value, allowed: tuple[str, ...] | None = None) -> str:
    if not isinstance(value, str) or not value:
        raise InvariantViolationError(f"{name} must be a non-empty string")
    if allowed is not None and value not in allowed:
        raise InvariantViolationError(f"{name} must be one of {allowed}, got {value!r}")
    return value


@dataclass(frozen=True)
class SensorReading:
    node_id: str
    metric: str
    value: float
    ts: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "node_id", _check_str("node_id", self.node_id))
        object.__setattr__(self, "metric", _check_str("metric", self.metric, METRICS))
        object.__setattr__(self, "value", _check_float("value", self.value))
        object.__setattr__(self, "ts", _check_nonneg_int("ts", self.ts))


@dataclass(frozen=True)
class MorphReport:
    node_id: str
    stem_length_cm: float
    leaf_count: int
    leaf_area_cm2: float
    flower_volume_cm3: float
    ts: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "node_id", _check_str("node_id", self.node_id))
        for f in ("stem_length_cm", "leaf_area_cm2", "flower_volume_cm3"):
            object.__setattr__(self, f, _check_nonneg_float(f, getattr(self, f)))
        object.__setattr__(self, "leaf_count", _check_nonneg_int("leaf_count", self.leaf_count))
        object.__setattr__(self, "ts", _check_nonneg_int("ts", self.ts))


@dataclass(frozen=True)
class SetpointCommand:
    seq: int
    temperature_c: float
    humidity_rel: float
    light_ppfd: float
    co2_ppm: float
    ts: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "seq", _check_nonneg_int("seq", self.seq))
        for f in ("temperature_c", "humidity_rel", "light_ppfd", "co2_ppm"):
            object.__setattr__(self, f, _check_float(f, getattr(self, f)))
        object.__setattr__(self, "ts", _check_nonneg_int("ts", self.ts))


@dataclass(frozen=True)
class Ack:
    seq: int
    status: str
    ts: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "seq", _check_nonneg_int("seq", self.seq))
        object.__setattr__(self, "status", _check_str("status", self.status, STATUSES))
        object.__setattr__(self, "ts", _check_nonneg_int("ts", self.ts))


Message = Union[SensorReading, MorphReport, SetpointCommand, Ack]

_TYPE_TAGS: dict[type, str] = {
    SensorReading: "sensor",
    MorphReport: "morph",
    SetpointCommand: "setpoint",
    Ack: "ack",
}
_TAG_TYPES = {tag: klass for klass, tag in _TYPE_TAGS.items()}


def encode(m: Message) -> bytes:
    """One canonical UTF-8 JSON line, '\\n' terminated.

    Keys appear in declaration order with the type tag first; numbers render
    in shortest round-trip form, so equal messages produce identical bytes.
    """
    tag = _TYPE_TAGS.get(type(m))
    if tag is None:
        raise UnknownTypeError(f"not a wire message: {type(m).__name__}")
    obj = {"type": tag}
    for f in fields(m):
        obj[f.name] = getattr(m, f.name)
    return (json.dumps(obj, separators=(",", ":"), allow_nan=False) + "\n").encode("utf-8")


def decode(line: bytes | str) -> Message:
    """Strict inverse of :func:`encode` for a single line.

    Raises MalformedSyntaxError when the line is not one JSON object,
    UnknownTypeError for missing/unknown type tags, and
    InvariantViolationError for wrong field sets, field types, or values.
    Integer-valued JSON numbers are accepted for float fields.
    """
    if isinstance(line, (bytes, bytearray)):
        try:
            text = bytes(line).decode("utf-8")
        except UnicodeDecodeError as e:
            raise MalformedSyntaxError(f"not valid UTF-8: {e}") from e
    else:
        text = line
    text = text.strip("\r\n")
    if not text or "\n" in text:
        raise MalformedSyntaxError("expected exactly one JSON object per line")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedSyntaxError(f"invalid JSON: {e}") from e
    if not isinstance(obj, dict):
        raise MalformedSyntaxError("line is not a JSON object")

    tag = obj.pop("type", None)
    if tag is None:
        raise UnknownTypeError("missing type tag")
    klass = _TAG_TYPES.get(tag)
    if klass is None:
        raise UnknownTypeError(f"unknown message type {tag!r}")

    expected = [f.name for f in fields(klass)]
    missing = [name for name in expected if name not in obj]
    extra = [name for name in obj if name not in expected]
    if missing:
        raise InvariantViolationError(f"{tag}: missing fields {missing}")
    if extra:
        raise InvariantViolationError(f"{tag}: unexpected fields {extra}")
    return klass(**{name: obj[name] for name in expected})


@dataclass(frozen=True)
class Violation:
    index: int  # 0-based position in the session stream
    kind: str  # decode-error | seq-monotonicity | unacked-command | unmatched-ack
    detail: str


def session_replay(
    lines: Iterable[bytes | str | Message], ack_window_s: int = 600
) -> list[Violation]:
    """Validate an ordered message stream; violations are reported, not raised.

    Checks: every line decodes; setpoint and ack sequence numbers are each
    strictly increasing (one logical sender per kind); every setpoint command
    is acknowledged with a matching seq within ack_window_s simulation
    seconds.  Late or missing acks are flagged at the command's index.
    """
    violations: list[Violation] = []
    last_seq: dict[str, int] = {}
    pending: dict[int, tuple[int, int]] = {}  # seq -> (index, ts)

    index = -1
    for index, item in enumerate(lines):
        if isinstance(item, (bytes, bytearray, str)):
            try:
                msg = decode(item)
            except WireError as e:
                violations.append(Violation(index, "decode-error", str(e)))
                continue
        else:
            msg = item

        fresh = True
        if isinstance(msg, (SetpointCommand, Ack)):
            sender = _TYPE_TAGS[type(msg)]
            prev = last_seq.get(sender)
            if prev is not None and msg.seq <= prev:
                fresh = False  # replayed/duplicate traffic, not a new command
                violations.append(
                    Violation(
                        index,
                        "seq-monotonicity",
                        f"{sender} seq {msg.seq} after {prev}",
                    )
                )
            else:
                last_seq[sender] = msg.seq

        if isinstance(msg, SetpointCommand):
            if fresh:
                pending[msg.seq] = (index, msg.ts)
        elif isinstance(msg, Ack):
            if msg.seq in pending:
                cmd_index, cmd_ts = pending.pop(msg.seq)
                if msg.ts - cmd_ts > ack_window_s:
                    violations.append(
                        Violation(
                            cmd_index,
                            "unacked-command",
                            f"seq {msg.seq} acked after {msg.ts - cmd_ts}s "
                            f"(window {ack_window_s}s)",
                        )
                    )
            else:
                violations.append(
                    Violation(index, "unmatched-ack", f"no pending command seq {msg.seq}")
                )

    for seq, (cmd_index, _) in sorted(pending.items(), key=lambda kv: kv[1][0]):
        violations.append(
            Violation(cmd_index, "unacked-command", f"seq {seq} never acknowledged")
        )
    violations.sort(key=lambda v: v.index)
    return violations


def write_session(path: str | Path, messages: Iterable[Message]) -> None:
    with open(path, "wb") as fh:
        for m in messages:
            fh.write(encode(m))


def read_session_lines(path: str | Path) -> list[bytes]:
    data = Path(path).read_bytes()
    return [line + b"\n" for line in data.split(b"\n") if line]
