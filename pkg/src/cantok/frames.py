"""CAN capture ingestion: frame parsing, trace loading, per-ID partitioning.

Supported on-disk formats:

* candump compact: ``(<seconds.fraction>) <iface> <HEXID>#<HEXBYTES>``
* CSV with header ``timestamp,id,dlc,payload_hex``

All produced types are immutable values; downstream analysis may consume
them concurrently.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass

from .errors import AnalysisError, ParseError

log = logging.getLogger(__name__)

STANDARD_ID_MAX = 0x7FF
EXTENDED_ID_MAX = 0x1FFFFFFF
MAX_DLC = 8


@dataclass(frozen=True, slots=True)
class CanFrame:
    """One timestamped CAN message."""

    timestamp: float
    arbitration_id: int
    dlc: int
    payload: bytes

    def __post_init__(self):
        if not 0 <= self.arbitration_id <= EXTENDED_ID_MAX:
            raise AnalysisError(
                f"arbitration id 0x{self.arbitration_id:X} outside extended range"
            )
        if not 0 <= self.dlc <= MAX_DLC:
            raise AnalysisError(f"dlc {self.dlc} outside 0..{MAX_DLC}")
        if len(self.payload) != self.dlc:
            raise AnalysisError(
                f"payload length {len(self.payload)} does not match dlc {self.dlc}"
            )

    @property
    def is_extended(self) -> bool:
        return self.arbitration_id > STANDARD_ID_MAX


@dataclass(frozen=True, slots=True)
class Trace:
    """Chronologically ordered frame stream from one capture."""

    frames: tuple[CanFrame, ...]
    source: str = ""

    def validate(self) -> None:
        """Check the nondecreasing-timestamp invariant; raise on violation."""
        for a, b in zip(self.frames, self.frames[1:]):
            if b.timestamp < a.timestamp:
                raise AnalysisError(
                    f"timestamps decrease: {a.timestamp} -> {b.timestamp}"
                )

    def __len__(self) -> int:
        return len(self.frames)


@dataclass(frozen=True, slots=True)
class IdTrace:
    """All frames of one (arbitration id, dlc) group, in capture order."""

    arbitration_id: int
    dlc: int
    frames: tuple[CanFrame, ...]

    @property
    def bit_width(self) -> int:
        return 8 * self.dlc

    def __len__(self) -> int:
        return len(self.frames)


def parse_candump_line(line: str, lineno: int | None = None) -> CanFrame:
    """Decode one compact candump record.

    Format: ``(<ts>) <iface> <ID>#<HEXDATA>``. The interface name is
    discarded; payload hex pairs map to bytes in transmission order.
    """
    parts = line.split()
    if len(parts) != 3 or not parts[0].startswith("(") or not parts[0].endswith(")"):
        raise ParseError(line, "not a candump record", lineno)
    try:
        ts = float(parts[0][1:-1])
    except ValueError:
        raise ParseError(line, "malformed timestamp", lineno) from None
    idstr, sep, hexdata = parts[2].partition("#")
    if not sep:
        raise ParseError(line, "missing '#' separator", lineno)
    try:
        arb_id = int(idstr, 16)
    except ValueError:
        raise ParseError(line, f"unparsable id {idstr!r}", lineno) from None
    if len(hexdata) % 2:
        raise ParseError(line, "odd-length hex payload", lineno)
    try:
        payload = bytes.fromhex(hexdata)
    except ValueError:
        raise ParseError(line, "non-hex payload", lineno) from None
    if len(payload) > MAX_DLC:
        raise ParseError(line, f"payload of {len(payload)} bytes exceeds 8", lineno)
    try:
        return CanFrame(ts, arb_id, len(payload), payload)
    except AnalysisError as exc:
        raise ParseError(line, str(exc), lineno) from None


@dataclass(frozen=True)
class CsvSchema:
    """Column layout for CSV captures; indices are zero-based."""

    timestamp: int = 0
    id: int = 1
    dlc: int = 2
    payload_hex: int = 3
    id_base: int = 16  # 16 for hex id columns, 10 for decimal


DEFAULT_CSV_SCHEMA = CsvSchema()
CSV_HEADER = "timestamp,id,dlc,payload_hex"


def parse_csv_line(
    line: str,
    schema: CsvSchema = DEFAULT_CSV_SCHEMA,
    lineno: int | None = None,
) -> CanFrame:
    """Decode one CSV record; same semantics as parse_candump_line."""
    try:
        row = next(csv.reader(io.StringIO(line)))
    except StopIteration:
        raise ParseError(line, "empty record", lineno) from None
    needed = max(schema.timestamp, schema.id, schema.dlc, schema.payload_hex)
    if len(row) <= needed:
        raise ParseError(line, f"missing column (need {needed + 1} fields)", lineno)
    try:
        ts = float(row[schema.timestamp])
    except ValueError:
        raise ParseError(line, "malformed timestamp", lineno) from None
    idstr = row[schema.id].strip()
    try:
        if idstr.lower().startswith("0x"):
            arb_id = int(idstr, 16)
        else:
            arb_id = int(idstr, schema.id_base)
    except ValueError:
        raise ParseError(line, f"unparsable id {idstr!r}", lineno) from None
    try:
        dlc = int(row[schema.dlc])
    except ValueError:
        raise ParseError(line, f"unparsable dlc {row[schema.dlc]!r}", lineno) from None
    hexdata = row[schema.payload_hex].strip()
    if len(hexdata) % 2:
        raise ParseError(line, "odd-length hex payload", lineno)
    try:
        payload = bytes.fromhex(hexdata)
    except ValueError:
        raise ParseError(line, "non-hex payload", lineno) from None
    if len(payload) != dlc:
        raise ParseError(
            line, f"dlc {dlc} does not match payload of {len(payload)} bytes", lineno
        )
    try:
        return CanFrame(ts, arb_id, dlc, payload)
    except AnalysisError as exc:
        raise ParseError(line, str(exc), lineno) from None


def format_candump_line(frame: CanFrame, iface: str = "can0") -> str:
    """Render a frame back to compact candump text.

    Standard ids get 3 hex digits, extended ids 8; timestamps keep
    microsecond precision.
    """
    width = 3 if not frame.is_extended else 8
    return (
        f"({frame.timestamp:.6f}) {iface} "
        f"{frame.arbitration_id:0{width}X}#{frame.payload.hex().upper()}"
    )


def write_candump(trace: Trace, path, iface: str = "can0") -> None:
    with open(path, "w") as fh:
        for frame in trace.frames:
            fh.write(format_candump_line(frame, iface))
            fh.write("\n")


def load_trace(path, format: str = "candump", strict: bool = True) -> Trace:
    """Load a capture file into a Trace, preserving file order.

    In strict mode any malformed line aborts with its line number; in
    lenient mode bad lines are skipped and counted in a single warning.
    Blank lines and ``#`` comments are always ignored (for CSV the header
    row is ignored too).
    """
    if format not in ("candump", "csv"):
        raise AnalysisError(f"unknown capture format {format!r}")
    frames: list[CanFrame] = []
    skipped = 0
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if format == "csv" and line.replace(" ", "") == CSV_HEADER:
                continue
            try:
                if format == "candump":
                    frames.append(parse_candump_line(line, lineno))
                else:
                    frames.append(parse_csv_line(line, lineno=lineno))
            except ParseError:
                if strict:
                    raise
                skipped += 1
    if skipped:
        log.warning("%s: skipped %d malformed line(s)", path, skipped)
    per_id: dict[int, int] = {}
    for f in frames:
        per_id[f.arbitration_id] = per_id.get(f.arbitration_id, 0) + 1
    log.info(
        "%s: %d frames across %d arbitration ids", path, len(frames), len(per_id)
    )
    return Trace(frames=tuple(frames), source=str(path))


def partition_by_id(trace: Trace) -> dict[tuple[int, int], IdTrace]:
    """Split a trace into per-(arbitration id, dlc) groups.

    Keying on (id, dlc) keeps each group at a fixed bit width even when an
    id violates the fixed-width assumption; such ids are reported in a
    warning.
    """
    groups: dict[tuple[int, int], list[CanFrame]] = {}
    for frame in trace.frames:
        groups.setdefault((frame.arbitration_id, frame.dlc), []).append(frame)
    widths: dict[int, set[int]] = {}
    for arb_id, dlc in groups:
        widths.setdefault(arb_id, set()).add(dlc)
    mixed = sorted(i for i, ws in widths.items() if len(ws) > 1)
    if mixed:
        log.warning(
            "ids with multiple payload widths: %s",
            ", ".join(f"0x{i:X}" for i in mixed),
        )
    return {
        (arb_id, dlc): IdTrace(arb_id, dlc, tuple(fs))
        for (arb_id, dlc), fs in groups.items()
    }
