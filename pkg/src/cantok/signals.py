"""Materialize tokenized clusters as unsigned-integer time series."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .bitlab import BitMatrix, build_bit_matrix
from .errors import AnalysisError, InvariantError
from .frames import IdTrace
from .tokenizer import PADDING, TokenCluster, Tokenization, format_id


@dataclass(frozen=True, eq=False)
class SignalSeries:
    """Unsigned-integer values one cluster took on, in chronological order."""

    arbitration_id: int
    cluster: TokenCluster
    values: np.ndarray  # length-M uint64
    timestamps: np.ndarray  # length-M float64 seconds

    @property
    def width(self) -> int:
        return self.cluster.width

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True, slots=True)
class SignalSummary:
    minimum: int
    maximum: int
    unique_value_count: int
    value_transition_count: int
    mean_abs_first_difference: float


def _cluster_values(bits: np.ndarray, cluster: TokenCluster, endianness: str) -> np.ndarray:
    """Weight each bit column by its place value and sum."""
    values = np.zeros(bits.shape[0], dtype=np.uint64)
    for p in cluster.positions:
        if endianness == "big":
            shift = cluster.hi - p
        else:
            shift = p - cluster.lo
        values |= bits[:, p].astype(np.uint64) << np.uint64(shift)
    return values


def extract_series(
    idtrace: IdTrace, cluster: TokenCluster, endianness: str = "big"
) -> SignalSeries:
    """Read one signal cluster out of every payload of an IdTrace."""
    if cluster.kind == PADDING:
        raise AnalysisError("cannot extract padding as a signal series")
    if cluster.lo < 0 or cluster.hi >= idtrace.bit_width:
        raise AnalysisError(
            f"cluster [{cluster.lo}, {cluster.hi}] outside payload width "
            f"{idtrace.bit_width}"
        )
    bm = build_bit_matrix(idtrace)
    values = _cluster_values(bm.bits, cluster, endianness)
    if cluster.width < 64 and values.max(initial=0) >> np.uint64(cluster.width):
        raise InvariantError("extracted value exceeds cluster width")
    values.flags.writeable = False
    timestamps = np.array([f.timestamp for f in idtrace.frames])
    timestamps.flags.writeable = False
    return SignalSeries(
        arbitration_id=idtrace.arbitration_id,
        cluster=cluster,
        values=values,
        timestamps=timestamps,
    )


def summarize(series: SignalSeries) -> SignalSummary:
    if len(series) == 0:
        raise AnalysisError("cannot summarize an empty series")
    vals = series.values
    if len(vals) > 1:
        # int64 diff would overflow near 2^64; go through Python ints
        py = [int(v) for v in vals]
        diffs = [abs(b - a) for a, b in zip(py, py[1:])]
        transitions = sum(1 for d in diffs if d)
        mean_abs = sum(diffs) / len(diffs)
    else:
        transitions = 0
        mean_abs = 0.0
    return SignalSummary(
        minimum=int(vals.min()),
        maximum=int(vals.max()),
        unique_value_count=len(np.unique(vals)),
        value_transition_count=transitions,
        mean_abs_first_difference=mean_abs,
    )


def export_series_csv(series: SignalSeries, path) -> None:
    """Write ``index,timestamp,value`` rows; index is chronological order."""
    with open(path, "w") as fh:
        fh.write("index,timestamp,value\n")
        for i, (ts, v) in enumerate(zip(series.timestamps, series.values)):
            fh.write(f"{i},{ts:.6f},{int(v)}\n")


def summary_to_dict(series: SignalSeries, summary: SignalSummary) -> dict:
    return {
        "id": format_id(series.arbitration_id),
        "lo": series.cluster.lo,
        "hi": series.cluster.hi,
        "width": series.width,
        "min": summary.minimum,
        "max": summary.maximum,
        "unique_values": summary.unique_value_count,
        "value_transitions": summary.value_transition_count,
        "mean_abs_first_difference": summary.mean_abs_first_difference,
    }


def padding_constants(bm: BitMatrix, tok: Tokenization) -> dict[int, int]:
    """Constant bit value observed at each padding position."""
    out: dict[int, int] = {}
    for c in tok.padding_clusters:
        for p in c.positions:
            col = bm.bits[:, p]
            if col.min() != col.max():
                raise InvariantError(f"padding position {p} is not constant")
            out[p] = int(col[0])
    return out


def repack_payloads(
    tok: Tokenization,
    series_by_cluster: dict[tuple[int, int], SignalSeries],
    padding_bits: dict[int, int],
    frame_count: int,
) -> list[bytes]:
    """Rebuild raw payloads from extracted series plus padding constants.

    Inverse of extraction when the tokenization's signal clusters cover
    every non-padding bit; used to verify lossless decomposition.
    """
    bits = np.zeros((frame_count, tok.bit_width), dtype=np.uint8)
    for p, v in padding_bits.items():
        bits[:, p] = v
    for c in tok.signal_clusters:
        series = series_by_cluster[(c.lo, c.hi)]
        if len(series) != frame_count:
            raise AnalysisError("series length does not match frame count")
        endianness = "big" if c.lsb_index == c.hi else "little"
        for p in c.positions:
            shift = c.hi - p if endianness == "big" else p - c.lo
            bits[:, p] = (series.values >> np.uint64(shift)).astype(np.uint8) & 1
    packed = np.packbits(bits, axis=1)
    return [row.tobytes() for row in packed]


def export_summary_json(summaries: list[dict], path) -> None:
    with open(path, "w") as fh:
        json.dump(summaries, fh, indent=2)
        fh.write("\n")
