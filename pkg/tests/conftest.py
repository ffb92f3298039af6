import numpy as np
import pytest

from cantok import CanFrame, IdTrace


def make_idtrace(payloads, arb_id=0xA15, period=0.01):
    """IdTrace from a list of equal-length payload byte strings."""
    dlc = len(payloads[0])
    frames = tuple(
        CanFrame(k * period, arb_id, dlc, bytes(p)) for k, p in enumerate(payloads)
    )
    return IdTrace(arb_id, dlc, frames)


@pytest.fixture
def table1_idtrace():
    """The paper-style 10-observation, 1-byte counter trace (values 0..9)."""
    return make_idtrace([[k] for k in range(10)])


def naive_tang_counts(payloads):
    """Independent per-bit transition count: scalar double loop over frames."""
    n = len(payloads[0]) * 8
    counts = [0] * n
    for a, b in zip(payloads, payloads[1:]):
        for i in range(n):
            bit_a = (a[i // 8] >> (7 - i % 8)) & 1
            bit_b = (b[i // 8] >> (7 - i % 8)) & 1
            if bit_a != bit_b:
                counts[i] += 1
    return counts


def bits_of(payload):
    """Payload bytes as a list of bits under the position numbering."""
    out = []
    for byte in payload:
        for j in range(7, -1, -1):
            out.append((byte >> j) & 1)
    return out
