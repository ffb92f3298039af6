import logging

import pytest

from cantok import (
    AnalysisError,
    CanFrame,
    ParseError,
    Trace,
    load_trace,
    parse_candump_line,
    parse_csv_line,
    partition_by_id,
    write_candump,
)
from cantok.frames import CsvSchema, format_candump_line


class TestParseCandump:
    def test_full_payload(self):
        f = parse_candump_line("(1500000000.000000) can0 0A15#0000000000000000")
        assert f.timestamp == 1500000000.0
        assert f.arbitration_id == 0x0A15
        assert f.dlc == 8
        assert f.payload == bytes(8)

    def test_empty_payload(self):
        f = parse_candump_line("(1.5) can0 123#")
        assert (f.timestamp, f.arbitration_id, f.dlc, f.payload) == (1.5, 0x123, 0, b"")

    def test_odd_length_hex(self):
        with pytest.raises(ParseError, match="odd-length"):
            parse_candump_line("(1.0) can0 123#ABC")

    def test_bad_timestamp(self):
        with pytest.raises(ParseError, match="timestamp"):
            parse_candump_line("(abc) can0 123#00")

    def test_bad_id(self):
        with pytest.raises(ParseError, match="unparsable id"):
            parse_candump_line("(1.0) can0 XYZ#00")

    def test_oversized_payload(self):
        with pytest.raises(ParseError, match="exceeds 8"):
            parse_candump_line("(1.0) can0 123#" + "00" * 9)

    def test_missing_hash(self):
        with pytest.raises(ParseError, match="separator"):
            parse_candump_line("(1.0) can0 12300")

    def test_payload_order(self):
        f = parse_candump_line("(1.0) can0 123#0102")
        assert f.payload == b"\x01\x02"


class TestParseCsv:
    def test_basic(self):
        f = parse_csv_line("1500000000.000000,0A15,8,0001020304050607")
        assert f.arbitration_id == 0x0A15
        assert f.payload == bytes(range(8))

    def test_single_byte(self):
        f = parse_csv_line("1.0,7FF,1,FF")
        assert (f.arbitration_id, f.dlc, f.payload) == (0x7FF, 1, b"\xff")

    def test_dlc_mismatch(self):
        with pytest.raises(ParseError, match="does not match payload"):
            parse_csv_line("1.0,123,2,FF")

    def test_0x_prefix(self):
        f = parse_csv_line("1.0,0x123,1,AA")
        assert f.arbitration_id == 0x123

    def test_decimal_id_schema(self):
        f = parse_csv_line("1.0,291,1,AA", schema=CsvSchema(id_base=10))
        assert f.arbitration_id == 291

    def test_missing_column(self):
        with pytest.raises(ParseError, match="missing column"):
            parse_csv_line("1.0,123,2")


class TestFrameInvariants:
    def test_extended_id_limit(self):
        with pytest.raises(AnalysisError):
            CanFrame(0.0, 0x20000000, 0, b"")

    def test_payload_dlc_mismatch(self):
        with pytest.raises(AnalysisError):
            CanFrame(0.0, 1, 2, b"\x00")

    def test_is_extended(self):
        assert not CanFrame(0.0, 0x7FF, 0, b"").is_extended
        assert CanFrame(0.0, 0x800, 0, b"").is_extended


class TestLoadTrace:
    def _write(self, tmp_path, lines):
        p = tmp_path / "capture.log"
        p.write_text("\n".join(lines) + "\n")
        return p

    def test_file_order_and_counts(self, tmp_path):
        p = self._write(
            tmp_path,
            [
                "(1.0) can0 100#01",
                "",
                "# comment",
                "(2.0) can0 200#0203",
                "(3.0) can0 100#04",
            ],
        )
        trace = load_trace(p)
        assert [f.arbitration_id for f in trace.frames] == [0x100, 0x200, 0x100]
        assert trace.source == str(p)

    def test_strict_aborts_with_line_number(self, tmp_path):
        p = self._write(tmp_path, ["(1.0) can0 100#01", "(1.1) can0 100#ABC"])
        with pytest.raises(ParseError, match="line 2"):
            load_trace(p)

    def test_lenient_skips(self, tmp_path, caplog):
        p = self._write(tmp_path, ["(1.0) can0 100#01", "garbage", "(1.2) can0 100#02"])
        with caplog.at_level(logging.WARNING):
            trace = load_trace(p, strict=False)
        assert len(trace) == 2
        assert "skipped 1" in caplog.text

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(OSError):
            load_trace(tmp_path / "missing.log")

    def test_csv_with_header(self, tmp_path):
        p = tmp_path / "capture.csv"
        p.write_text("timestamp,id,dlc,payload_hex\n1.0,100,1,AA\n")
        trace = load_trace(p, format="csv")
        assert len(trace) == 1

    def test_unknown_format(self, tmp_path):
        with pytest.raises(AnalysisError):
            load_trace(tmp_path / "x", format="pcap")


class TestPartition:
    def test_single_group(self):
        frames = tuple(CanFrame(k * 0.1, 0xA15, 8, bytes(8)) for k in range(10))
        groups = partition_by_id(Trace(frames))
        assert set(groups) == {(0xA15, 8)}
        assert len(groups[(0xA15, 8)]) == 10

    def test_disjoint_groups(self):
        frames = tuple(CanFrame(k * 0.1, 1, 8, bytes(8)) for k in range(5)) + tuple(
            CanFrame(1 + k * 0.1, 2, 4, bytes(4)) for k in range(3)
        )
        groups = partition_by_id(Trace(frames))
        assert {k: len(v) for k, v in groups.items()} == {(1, 8): 5, (2, 4): 3}

    def test_mixed_dlc_split_and_warning(self, caplog):
        frames = tuple(CanFrame(k * 0.1, 1, 8, bytes(8)) for k in range(5)) + tuple(
            CanFrame(1 + k * 0.1, 1, 4, bytes(4)) for k in range(2)
        )
        with caplog.at_level(logging.WARNING):
            groups = partition_by_id(Trace(frames))
        assert {k: len(v) for k, v in groups.items()} == {(1, 8): 5, (1, 4): 2}
        assert "0x1" in caplog.text

    def test_empty_trace(self):
        assert partition_by_id(Trace(())) == {}

    def test_completeness_and_order(self):
        frames = tuple(
            CanFrame(k * 0.1, k % 3, 1, bytes([k])) for k in range(30)
        )
        trace = Trace(frames)
        groups = partition_by_id(trace)
        assert sum(len(g) for g in groups.values()) == len(trace)
        for (arb_id, _), g in groups.items():
            expected = [f for f in frames if f.arbitration_id == arb_id]
            assert list(g.frames) == expected


class TestRoundTrip:
    def test_candump_round_trip(self, tmp_path):
        frames = tuple(
            CanFrame(1500000000.0 + k * 0.000001, arb_id, len(p), bytes(p))
            for k, (arb_id, p) in enumerate(
                [(0x123, [1, 2]), (0x7FF, []), (0x1ABCDEF0, list(range(8)))]
            )
        )
        p = tmp_path / "out.log"
        write_candump(Trace(frames), p)
        back = load_trace(p)
        assert len(back) == len(frames)
        for a, b in zip(frames, back.frames):
            assert abs(a.timestamp - b.timestamp) < 1e-6
            assert (a.arbitration_id, a.dlc, a.payload) == (
                b.arbitration_id,
                b.dlc,
                b.payload,
            )

    def test_id_digit_widths(self):
        assert format_candump_line(CanFrame(1.0, 0x123, 0, b"")).split()[2] == "123#"
        assert (
            format_candump_line(CanFrame(1.0, 0x1ABCDEF0, 0, b"")).split()[2]
            == "1ABCDEF0#"
        )


def test_trace_validate():
    good = Trace((CanFrame(1.0, 1, 0, b""), CanFrame(1.0, 1, 0, b"")))
    good.validate()
    bad = Trace((CanFrame(2.0, 1, 0, b""), CanFrame(1.0, 1, 0, b"")))
    with pytest.raises(AnalysisError):
        bad.validate()
