"""Greedy clustering of bit positions into signal and padding tokens.

The clusterer walks a transition-count vector: the position with the most
flips is assumed to be the LSB of a numerical signal, and neighbors are
absorbed toward the MSB while their counts stay within the allowed slack.
Positions that never flipped are pooled into padding tokens.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

from .bitlab import Tang, tang_from_idtrace
from .errors import AnalysisError, InvariantError
from .frames import Trace, partition_by_id

log = logging.getLogger(__name__)

ENDIANNESSES = ("big", "little")
PADDING_MODES = ("exclude", "strict")

SIGNAL = "signal"
PADDING = "padding"


@dataclass(frozen=True, slots=True)
class TokenizerConfig:
    """Knobs for the greedy clusterer.

    endianness sets the neighbor offset (-1 for big, +1 for little);
    threshold is the integer transition-count slack allowed when absorbing
    a neighbor (0 keeps the strict nonincreasing rule); padding_mode
    controls whether zero-transition bits may be absorbed into signal
    clusters (`strict`) or always pooled as padding (`exclude`).
    """

    endianness: str = "big"
    threshold: int = 0
    padding_mode: str = "exclude"

    def __post_init__(self):
        if self.endianness not in ENDIANNESSES:
            raise AnalysisError(f"endianness must be one of {ENDIANNESSES}")
        if self.padding_mode not in PADDING_MODES:
            raise AnalysisError(f"padding_mode must be one of {PADDING_MODES}")
        if self.threshold < 0:
            raise AnalysisError("threshold must be nonnegative")


@dataclass(frozen=True, slots=True)
class TokenCluster:
    """One tokenized bit range [lo, hi], either a signal or padding."""

    kind: str
    lo: int
    hi: int
    lsb_index: int | None = None
    msb_index: int | None = None
    lsb_transitions: int | None = None

    def __post_init__(self):
        if self.lo > self.hi:
            raise InvariantError(f"empty cluster range [{self.lo}, {self.hi}]")
        if self.kind == SIGNAL and (self.lsb_index is None or self.msb_index is None):
            raise InvariantError("signal cluster without lsb/msb indices")

    @property
    def width(self) -> int:
        return self.hi - self.lo + 1

    @property
    def positions(self) -> range:
        return range(self.lo, self.hi + 1)


@dataclass(frozen=True, slots=True)
class Tokenization:
    """Partition of one payload's bit positions into clusters."""

    arbitration_id: int
    bit_width: int
    clusters: tuple[TokenCluster, ...]
    config: TokenizerConfig

    def __post_init__(self):
        seen = [False] * self.bit_width
        for c in self.clusters:
            for p in c.positions:
                if p < 0 or p >= self.bit_width or seen[p]:
                    raise InvariantError(
                        f"clusters do not partition bit positions (position {p})"
                    )
                seen[p] = True
        if not all(seen):
            raise InvariantError("clusters do not cover all bit positions")

    @property
    def signal_clusters(self) -> tuple[TokenCluster, ...]:
        return tuple(c for c in self.clusters if c.kind == SIGNAL)

    @property
    def padding_clusters(self) -> tuple[TokenCluster, ...]:
        return tuple(c for c in self.clusters if c.kind == PADDING)


def classify_padding(tang: Tang) -> set[int]:
    """Bit positions that never transitioned in the sample."""
    return {i for i in range(tang.bit_width) if tang.counts[i] == 0}


def tokenize(tang: Tang, config: TokenizerConfig = TokenizerConfig()) -> Tokenization:
    """Greedily cluster a transition-count vector into tokens.

    Positions are visited in descending count order; each unassigned
    position seeds a cluster as its LSB and absorbs the neighbor toward
    the MSB side while ``neighbor <= current + threshold``. Extension
    stops at array bounds, at already-assigned positions, and (in exclude
    mode) at zero-count positions. Zero-count positions never seed signal
    clusters; leftover runs of them become padding tokens.

    Ties in the visit order are broken toward the side extension grows
    from (ascending index for big-endian, descending for little-endian),
    which keeps the result deterministic and mirror-symmetric under
    endianness reversal.
    """
    if tang.bit_width < 1:
        raise AnalysisError("cannot tokenize a zero-width payload")
    counts = tang.counts
    n = tang.bit_width
    offset = -1 if config.endianness == "big" else 1
    if config.endianness == "big":
        order = sorted(range(n), key=lambda i: (-counts[i], i))
    else:
        order = sorted(range(n), key=lambda i: (-counts[i], -i))

    assigned = [False] * n
    signals: list[TokenCluster] = []
    for seed in order:
        if assigned[seed] or counts[seed] == 0:
            continue
        assigned[seed] = True
        current = seed
        neighbor = seed + offset
        while (
            0 <= neighbor < n
            and not assigned[neighbor]
            and counts[neighbor] <= counts[current] + config.threshold
            and (config.padding_mode == "strict" or counts[neighbor] > 0)
        ):
            assigned[neighbor] = True
            current = neighbor
            neighbor += offset
        lo, hi = min(seed, current), max(seed, current)
        signals.append(
            TokenCluster(
                kind=SIGNAL,
                lo=lo,
                hi=hi,
                lsb_index=seed,
                msb_index=current,
                lsb_transitions=int(counts[seed]),
            )
        )

    padding: list[TokenCluster] = []
    run_start = None
    for i in range(n + 1):
        if i < n and not assigned[i]:
            if run_start is None:
                run_start = i
        elif run_start is not None:
            padding.append(TokenCluster(kind=PADDING, lo=run_start, hi=i - 1))
            run_start = None

    clusters = tuple(sorted(signals + padding, key=lambda c: c.lo))
    return Tokenization(
        arbitration_id=tang.arbitration_id,
        bit_width=n,
        clusters=clusters,
        config=config,
    )


def tokenize_trace(
    trace: Trace, config: TokenizerConfig = TokenizerConfig()
) -> dict[tuple[int, int], Tokenization]:
    """Run the full pipeline over every (id, dlc) group of a trace.

    Groups with fewer than 2 frames carry no transition information and
    are skipped with a log message.
    """
    if len(trace) == 0:
        raise AnalysisError("empty trace")
    out: dict[tuple[int, int], Tokenization] = {}
    for key, idtrace in partition_by_id(trace).items():
        if len(idtrace) < 2:
            log.info(
                "skipping id 0x%X dlc %d: only %d frame(s)",
                key[0], key[1], len(idtrace),
            )
            continue
        out[key] = tokenize(tang_from_idtrace(idtrace), config)
    return out


def format_id(arbitration_id: int) -> str:
    """Hex id string used in reports and file names (min 4 digits)."""
    return f"0x{arbitration_id:04X}"


def tokenization_to_dict(tok: Tokenization) -> dict:
    """JSON-ready dict with fixed field names and ordering."""
    return {
        "id": format_id(tok.arbitration_id),
        "bit_width": tok.bit_width,
        "config": {
            "endianness": tok.config.endianness,
            "threshold": tok.config.threshold,
            "padding_mode": tok.config.padding_mode,
        },
        "clusters": [
            {
                "kind": c.kind,
                "lo": c.lo,
                "hi": c.hi,
                "lsb": c.lsb_index,
                "msb": c.msb_index,
                "lsb_transitions": c.lsb_transitions,
            }
            for c in tok.clusters
        ],
    }


def export_tokenization_json(tok: Tokenization, path) -> None:
    with open(path, "w") as fh:
        json.dump(tokenization_to_dict(tok), fh, indent=2)
        fh.write("\n")
