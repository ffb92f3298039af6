"""Synthetic trace generation with known signal layouts, plus scoring.

The generators model approximately continuous signals (counter, ramp,
random walk) so the transition-count gradient the clusterer relies on is
present by construction; `noise` provides the adversarial case. Scoring
compares a recovered tokenization against the generating layout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import AnalysisError
from .frames import CanFrame, Trace
from .tokenizer import SIGNAL, Tokenization, format_id

GENERATOR_KINDS = ("counter", "ramp", "random_walk", "constant", "noise")

FRAME_PERIOD_S = 0.01


@dataclass(frozen=True, slots=True)
class SignalSpec:
    """Layout and generator for one embedded signal."""

    lo: int
    hi: int
    kind: str
    endianness: str = "big"
    step: int = 1  # counter increment per frame
    max_step: int = 1  # ramp slope / random-walk step bound
    value: int = 0  # constant kind
    start: int = 0  # counter start value

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise AnalysisError(f"unknown generator kind {self.kind!r}")
        if self.lo > self.hi:
            raise AnalysisError(f"empty signal range [{self.lo}, {self.hi}]")

    @property
    def width(self) -> int:
        return self.hi - self.lo + 1


@dataclass(frozen=True, slots=True)
class GroundTruth:
    """Full layout of one synthetic arbitration id."""

    arbitration_id: int
    bit_width: int
    specs: tuple[SignalSpec, ...]
    frame_count: int
    seed: int = 0
    padding_value: int = 0  # constant bit filling uncovered positions
    start_time: float = 0.0

    def __post_init__(self):
        if self.bit_width % 8 or not 0 < self.bit_width <= 64:
            raise AnalysisError("bit width must be a positive multiple of 8, <= 64")
        covered = set()
        for s in self.specs:
            if s.lo < 0 or s.hi >= self.bit_width:
                raise AnalysisError(
                    f"signal [{s.lo}, {s.hi}] outside payload width {self.bit_width}"
                )
            span = set(range(s.lo, s.hi + 1))
            if covered & span:
                raise AnalysisError("overlapping signal specs")
            covered |= span


@dataclass(frozen=True, slots=True)
class ScoreReport:
    exact_cluster_matches: int
    boundary_precision: float
    boundary_recall: float
    merged_count: int
    split_count: int


def _generate_values(spec: SignalSpec, m: int, rng: np.random.Generator) -> np.ndarray:
    """Length-m uint64 value sequence for one signal spec."""
    w = spec.width
    top = 1 << w  # exclusive upper bound
    if spec.kind == "counter":
        vals = np.uint64(spec.start) + np.uint64(spec.step) * np.arange(m, dtype=np.uint64)
        if w < 64:
            vals = vals % np.uint64(top)
        return vals
    if spec.kind == "constant":
        if spec.value >> w:
            raise AnalysisError(f"constant {spec.value} does not fit {w} bits")
        return np.full(m, spec.value, dtype=np.uint64)
    if spec.kind == "noise":
        return rng.integers(0, top - 1, size=m, dtype=np.uint64, endpoint=True)
    if spec.kind == "ramp":
        out = np.empty(m, dtype=np.uint64)
        pos = 0
        v = int(rng.integers(0, min(top, 1 << 62)))
        out[0] = v
        pos = 1
        while pos < m:
            slope = int(rng.integers(-spec.max_step, spec.max_step + 1))
            seg = int(rng.integers(1, max(2, m // 8 + 1)))
            seg = min(seg, m - pos)
            ramp = v + slope * np.arange(1, seg + 1, dtype=np.int64)
            ramp = np.clip(ramp, 0, min(top - 1, np.iinfo(np.int64).max))
            out[pos : pos + seg] = ramp.astype(np.uint64)
            v = int(out[pos + seg - 1])
            pos += seg
        return out
    # random_walk: sequential clamping keeps steps continuous at the edges
    out = np.empty(m, dtype=np.uint64)
    v = int(rng.integers(0, min(top, 1 << 62)))
    steps = rng.integers(-spec.max_step, spec.max_step + 1, size=m)
    hi = top - 1
    for k in range(m):
        v = v + int(steps[k])
        if v < 0:
            v = 0
        elif v > hi:
            v = hi
        out[k] = v
    return out


def generate_trace(gt: GroundTruth) -> Trace:
    """Deterministically synthesize the trace described by a GroundTruth."""
    rng = np.random.default_rng(gt.seed)
    m = gt.frame_count
    bits = np.full((m, gt.bit_width), gt.padding_value, dtype=np.uint8)
    for spec in gt.specs:
        values = _generate_values(spec, m, rng)
        for p in range(spec.lo, spec.hi + 1):
            shift = spec.hi - p if spec.endianness == "big" else p - spec.lo
            bits[:, p] = ((values >> np.uint64(shift)) & np.uint64(1)).astype(np.uint8)
    packed = np.packbits(bits, axis=1)
    dlc = gt.bit_width // 8
    frames = tuple(
        CanFrame(
            timestamp=gt.start_time + k * FRAME_PERIOD_S,
            arbitration_id=gt.arbitration_id,
            dlc=dlc,
            payload=packed[k].tobytes(),
        )
        for k in range(m)
    )
    return Trace(frames=frames, source=f"synthetic:{format_id(gt.arbitration_id)}")


def merge_traces(traces: list[Trace]) -> Trace:
    """Interleave traces by timestamp (stable, so per-id order is kept)."""
    frames = sorted(
        (f for t in traces for f in t.frames), key=lambda f: f.timestamp
    )
    return Trace(frames=tuple(frames), source="merged")


def _partition_intervals(gt: GroundTruth) -> list[tuple[int, int, str]]:
    """Full (lo, hi, kind) token partition implied by a ground truth."""
    out = []
    pos = 0
    for s in sorted(gt.specs, key=lambda s: s.lo):
        if s.lo > pos:
            out.append((pos, s.lo - 1, "padding"))
        out.append((s.lo, s.hi, "signal"))
        pos = s.hi + 1
    if pos < gt.bit_width:
        out.append((pos, gt.bit_width - 1, "padding"))
    return out


def _boundaries(intervals: list[tuple[int, int]]) -> set[int]:
    """Cut points between adjacent tokens, named by the left-hand bit."""
    ordered = sorted(intervals)
    return {hi for _, hi in ordered[:-1]}


def score_tokenization(tok: Tokenization, gt: GroundTruth) -> ScoreReport:
    """Compare recovered clusters against the generating layout."""
    if tok.bit_width != gt.bit_width:
        raise AnalysisError(
            f"bit width mismatch: tokenization {tok.bit_width}, truth {gt.bit_width}"
        )
    truth = _partition_intervals(gt)
    truth_cuts = _boundaries([(lo, hi) for lo, hi, _ in truth])
    tok_cuts = _boundaries([(c.lo, c.hi) for c in tok.clusters])
    hit = truth_cuts & tok_cuts
    precision = len(hit) / len(tok_cuts) if tok_cuts else 1.0
    recall = len(hit) / len(truth_cuts) if truth_cuts else 1.0

    tok_signals = [(c.lo, c.hi) for c in tok.clusters if c.kind == SIGNAL]
    true_signals = [(s.lo, s.hi) for s in gt.specs]
    exact = sum(1 for s in true_signals if s in tok_signals)

    def overlaps(a, b):
        return a[0] <= b[1] and b[0] <= a[1]

    merged = sum(
        1 for c in tok_signals if sum(overlaps(c, s) for s in true_signals) >= 2
    )
    split = sum(
        1 for s in true_signals if sum(overlaps(s, c) for c in tok_signals) >= 2
    )
    return ScoreReport(
        exact_cluster_matches=exact,
        boundary_precision=precision,
        boundary_recall=recall,
        merged_count=merged,
        split_count=split,
    )


def score_to_dict(report: ScoreReport) -> dict:
    return {
        "exact_cluster_matches": report.exact_cluster_matches,
        "boundary_precision": report.boundary_precision,
        "boundary_recall": report.boundary_recall,
        "merged": report.merged_count,
        "split": report.split_count,
    }


def ground_truth_to_dict(gt: GroundTruth) -> dict:
    return {
        "id": format_id(gt.arbitration_id),
        "bit_width": gt.bit_width,
        "frames": gt.frame_count,
        "seed": gt.seed,
        "padding_value": gt.padding_value,
        "signals": [
            {
                "lo": s.lo,
                "hi": s.hi,
                "kind": s.kind,
                "endianness": s.endianness,
                "step": s.step,
                "max_step": s.max_step,
                "value": s.value,
                "start": s.start,
            }
            for s in gt.specs
        ],
    }


def ground_truth_from_dict(data: dict) -> GroundTruth:
    try:
        specs = tuple(
            SignalSpec(
                lo=s["lo"],
                hi=s["hi"],
                kind=s["kind"],
                endianness=s.get("endianness", "big"),
                step=s.get("step", 1),
                max_step=s.get("max_step", 1),
                value=s.get("value", 0),
                start=s.get("start", 0),
            )
            for s in data["signals"]
        )
        return GroundTruth(
            arbitration_id=int(str(data["id"]), 16),
            bit_width=data["bit_width"],
            specs=specs,
            frame_count=data["frames"],
            seed=data.get("seed", 0),
            padding_value=data.get("padding_value", 0),
        )
    except KeyError as exc:
        raise AnalysisError(f"ground truth spec missing field {exc}") from None


def load_ground_truth(path) -> GroundTruth:
    with open(path) as fh:
        return ground_truth_from_dict(json.load(fh))


def save_ground_truth(gt: GroundTruth, path) -> None:
    with open(path, "w") as fh:
        json.dump(ground_truth_to_dict(gt), fh, indent=2)
        fh.write("\n")


def bundled_spec_path():
    """Path to the packaged three-counter example layout."""
    return resources.files("cantok").joinpath("data/three_counters.json")
