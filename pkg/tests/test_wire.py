"""Wire codec and session validation tests."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from greenhouse_rl.wire import (
    Ack,
    InvariantViolationError,
    MalformedSyntaxError,
    MorphReport,
    SensorReading,
    SetpointCommand,
    UnknownTypeError,
    WireError,
    decode,
    encode,
    read_session_lines,
    session_replay,
    write_session,
)


class TestEncode:
    def test_sensor_reading_exact_bytes(self):
        m = SensorReading(node_id="t1", metric="temperature_c", value=21.5, ts=300)
        assert encode(m) == (
            b'{"type":"sensor","node_id":"t1","metric":"temperature_c",'
            b'"value":21.5,"ts":300}\n'
        )

    def test_ack_exact_bytes(self):
        assert encode(Ack(seq=7, status="ok", ts=0)) == (
            b'{"type":"ack","seq":7,"status":"ok","ts":0}\n'
        )

    def test_canonical_for_equal_messages(self):
        a = SensorReading("n", "co2_ppm", 420, 5)  # int value normalizes to float
        b = SensorReading("n", "co2_ppm", 420.0, 5)
        assert a == b
        assert encode(a) == encode(b)

    def test_non_message_rejected(self):
        with pytest.raises(UnknownTypeError):
            encode({"type": "sensor"})


class TestDecode:
    def test_valid_sensor_line(self):
        line = b'{"type":"sensor","node_id":"t1","metric":"humidity_rel","value":0.61,"ts":12}\n'
        m = decode(line)
        assert m == SensorReading("t1", "humidity_rel", 0.61, 12)

    def test_integer_literal_accepted_for_float_field(self):
        line = b'{"type":"sensor","node_id":"t1","metric":"co2_ppm","value":420,"ts":12}\n'
        m = decode(line)
        assert m.value == 420.0 and isinstance(m.value, float)

    def test_truncated_line_is_malformed(self):
        with pytest.raises(MalformedSyntaxError):
            decode(b'{"type":"sensor","node_id":"t1"')

    def test_empty_and_non_object(self):
        with pytest.raises(MalformedSyntaxError):
            decode(b"")
        with pytest.raises(MalformedSyntaxError):
            decode(b"[1,2,3]\n")
        with pytest.raises(MalformedSyntaxError):
            decode(b"\xff\xfe\n")

    def test_unknown_type_tag(self):
        with pytest.raises(UnknownTypeError):
            decode(b'{"type":"gps","lat":1.0}\n')
        with pytest.raises(UnknownTypeError):
            decode(b'{"node_id":"t1"}\n')

    def test_unknown_metric_is_invariant_violation(self):
        line = b'{"type":"sensor","node_id":"t1","metric":"pressure","value":1.0,"ts":0}\n'
        with pytest.raises(InvariantViolationError, match="metric"):
            decode(line)

    def test_missing_field(self):
        with pytest.raises(InvariantViolationError, match="missing"):
            decode(b'{"type":"ack","seq":1,"ts":0}\n')

    def test_extra_field(self):
        with pytest.raises(InvariantViolationError, match="unexpected"):
            decode(b'{"type":"ack","seq":1,"status":"ok","ts":0,"extra":1}\n')

    def test_wrong_types(self):
        with pytest.raises(InvariantViolationError):
            decode(b'{"type":"ack","seq":1,"status":"ok","ts":"0"}\n')
        with pytest.raises(InvariantViolationError):
            decode(b'{"type":"ack","seq":1.5,"status":"ok","ts":0}\n')
        with pytest.raises(InvariantViolationError):
            decode(b'{"type":"ack","seq":1,"status":"ok","ts":true}\n')

    def test_value_invariants(self):
        with pytest.raises(InvariantViolationError):
            decode(b'{"type":"ack","seq":-1,"status":"ok","ts":0}\n')
        with pytest.raises(InvariantViolationError):
            decode(b'{"type":"ack","seq":1,"status":"maybe","ts":0}\n')
        with pytest.raises(InvariantViolationError):
            decode(
                b'{"type":"morph","node_id":"c","stem_length_cm":-2.0,'
                b'"leaf_count":0,"leaf_area_cm2":0.0,"flower_volume_cm3":0.0,"ts":0}\n'
            )

    def test_error_classes_are_distinguishable(self):
        cases = {
            MalformedSyntaxError: b"{truncated",
            UnknownTypeError: b'{"type":"warp"}\n',
            InvariantViolationError: b'{"type":"ack","seq":1,"status":"ok"}\n',
        }
        for expected, line in cases.items():
            with pytest.raises(expected) as exc_info:
                decode(line)
            assert isinstance(exc_info.value, WireError)
            others = [k for k in cases if k is not expected]
            assert not any(isinstance(exc_info.value, o) for o in others)


_node_ids = st.text(
    st.characters(codec="utf-8", exclude_categories=("Cs", "Cc")), min_size=1, max_size=12
)
_floats = st.floats(allow_nan=False, allow_infinity=False, width=64)
_pos_floats = st.floats(0.0, 1e12)
_ts = st.integers(0, 2**40)


def _messages():
    return st.one_of(
        st.builds(
            SensorReading,
            node_id=_node_ids,
            metric=st.sampled_from(
                ("temperature_c", "humidity_rel", "light_ppfd", "co2_ppm")
            ),
            value=_floats,
            ts=_ts,
        ),
        st.builds(
            MorphReport,
            node_id=_node_ids,
            stem_length_cm=_pos_floats,
            leaf_count=st.integers(0, 10**6),
            leaf_area_cm2=_pos_floats,
            flower_volume_cm3=_pos_floats,
            ts=_ts,
        ),
        st.builds(
            SetpointCommand,
            seq=st.integers(0, 2**40),
            temperature_c=_floats,
            humidity_rel=_floats,
            light_ppfd=_floats,
            co2_ppm=_floats,
            ts=_ts,
        ),
        st.builds(Ack, seq=st.integers(0, 2**40), status=st.sampled_from(("ok", "rejected")), ts=_ts),
    )


@settings(max_examples=300, deadline=None)
@given(_messages())
def test_round_trip_identity(m):
    assert decode(encode(m)) == m


@settings(max_examples=100, deadline=None)
@given(_messages())
def test_encoding_is_canonical(m):
    rebuilt = decode(encode(m))
    assert encode(rebuilt) == encode(m)


class TestSessionReplay:
    def good_session(self):
        return [
            SetpointCommand(seq=0, temperature_c=21.0, humidity_rel=0.6,
                            light_ppfd=400.0, co2_ppm=800.0, ts=0),
            Ack(seq=0, status="ok", ts=0),
            SensorReading("t1", "temperature_c", 20.5, 0),
            SetpointCommand(seq=1, temperature_c=22.0, humidity_rel=0.6,
                            light_ppfd=400.0, co2_ppm=800.0, ts=300),
            Ack(seq=1, status="ok", ts=300),
        ]

    def test_clean_session(self):
        assert session_replay(self.good_session()) == []

    def test_clean_session_from_encoded_lines(self):
        lines = [encode(m) for m in self.good_session()]
        assert session_replay(lines) == []

    def test_duplicate_seq_flagged_once(self):
        msgs = self.good_session()
        msgs.append(SetpointCommand(seq=1, temperature_c=22.0, humidity_rel=0.6,
                                    light_ppfd=400.0, co2_ppm=800.0, ts=600))
        violations = session_replay(msgs)
        assert [v.kind for v in violations] == ["seq-monotonicity"]
        assert violations[0].index == 5

    def test_orphan_ack_flagged(self):
        msgs = self.good_session()
        msgs.append(Ack(seq=9, status="ok", ts=600))
        violations = session_replay(msgs)
        assert [v.kind for v in violations] == ["unmatched-ack"]

    def test_unacked_command_flagged(self):
        msgs = self.good_session()[:1]  # command with no ack
        violations = session_replay(msgs)
        assert [v.kind for v in violations] == ["unacked-command"]
        assert violations[0].index == 0

    def test_late_ack_flagged(self):
        msgs = [
            SetpointCommand(seq=0, temperature_c=21.0, humidity_rel=0.6,
                            light_ppfd=400.0, co2_ppm=800.0, ts=0),
            Ack(seq=0, status="ok", ts=10_000),
        ]
        violations = session_replay(msgs, ack_window_s=600)
        assert [v.kind for v in violations] == ["unacked-command"]

    def test_decode_errors_reported_not_raised(self):
        lines = [encode(self.good_session()[0]), b"garbage\n",
                 encode(self.good_session()[1])]
        violations = session_replay(lines)
        assert [v.kind for v in violations] == ["decode-error"]
        assert violations[0].index == 1

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "session.ndjson"
        write_session(path, self.good_session())
        lines = read_session_lines(path)
        assert [decode(l) for l in lines] == self.good_session()
        assert session_replay(lines) == []
