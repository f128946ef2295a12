"""Transport models and bitstream serialization.

Two channel models: ``Noiseless`` (identity) and ``Erasure`` (each symbol is
independently dropped with probability p under a seeded generator; the
receiver always sees *that* a position was dropped, never a flipped value).
Erased positions are represented as ``None`` so the received stream keeps
its length.

Bitstream files use the versioned text format ``ODM/1``::

    ODM/1
    {"M0": 1.0, "Mbar": 1.0, "a": 2.0, "count": 10, "delta": 1.0, "rule": "modified", "y0": 0.0}
    1111001101

Line 3 holds exactly ``count`` characters, '1' for +1 and '0' for -1.
Erasures are a transport phenomenon and are never serialized.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from .codec import (
    MINUS,
    PLUS,
    AdaptationRule,
    CodecParams,
    StepRecord,
    Symbol,
    Trace,
    decode_step,
    init_state,
)
from .errors import FormatError, ParameterError

__all__ = [
    "Noiseless",
    "Erasure",
    "ChannelModel",
    "ReceivedStream",
    "HOLD_SYMBOL",
    "transmit",
    "decode_with_erasures",
    "write_bitstream",
    "read_bitstream",
]

MAGIC = "ODM/1"

HOLD_SYMBOL = "hold-symbol"


@dataclass(frozen=True)
class Noiseless:
    pass


@dataclass(frozen=True)
class Erasure:
    p: float
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p < 1.0:
            raise ParameterError(f"erasure probability must be in [0, 1), got {self.p}")


ChannelModel = Union[Noiseless, Erasure]


@dataclass(frozen=True)
class ReceivedStream:
    """Channel output; ``None`` marks an erased position."""

    symbols: tuple[Optional[Symbol], ...]

    def __len__(self) -> int:
        return len(self.symbols)

    def erased_positions(self) -> list[int]:
        return [k for k, s in enumerate(self.symbols) if s is None]


def transmit(bits: Sequence[Symbol], model: ChannelModel) -> ReceivedStream:
    """Push symbols through the channel; values are never flipped."""
    if isinstance(model, Noiseless):
        return ReceivedStream(symbols=tuple(bits))
    rng = np.random.default_rng(model.seed)
    erased = rng.random(len(bits)) < model.p
    return ReceivedStream(
        symbols=tuple(None if e else b for b, e in zip(bits, erased))
    )


def decode_with_erasures(
    params: CodecParams,
    received: ReceivedStream,
    policy: str = HOLD_SYMBOL,
) -> Trace:
    """Decode a stream with erasures by substituting the previous symbol.

    The hold-symbol policy repeats the last seen symbol (+1 before step 0)
    at every erased position and continues the shared recursion; substituted
    steps are marked on their records. On an erasure-free stream this is
    exactly :func:`admtrack.codec.decode_bitstream`.
    """
    if policy != HOLD_SYMBOL:
        raise ParameterError(f"unknown erasure policy {policy!r}")
    state = init_state(params)
    records: list[StepRecord] = []
    for symbol in received.symbols:
        substituted = symbol is None
        h = state.h if substituted else symbol
        state, record = decode_step(state, h)
        if substituted:
            record = replace(record, substituted=True)
        records.append(record)
    return Trace(params=params, records=tuple(records))


def _params_to_header(params: CodecParams, count: int) -> dict:
    return {
        "y0": params.y0,
        "M0": params.m0,
        "Mbar": params.mbar,
        "a": params.a,
        "delta": params.delta,
        "rule": params.rule.value,
        "count": count,
    }


def write_bitstream(path, params: CodecParams, bits: Sequence[Symbol]) -> None:
    """Write an ODM/1 file; the header floats round-trip exactly."""
    body = []
    for k, b in enumerate(bits):
        if b == PLUS:
            body.append("1")
        elif b == MINUS:
            body.append("0")
        else:
            raise FormatError(f"symbol at position {k} is {b!r}, not +1/-1")
    header = json.dumps(_params_to_header(params, len(bits)), sort_keys=True)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(f"{MAGIC}\n{header}\n{''.join(body)}\n")
    os.replace(tmp, path)


def read_bitstream(path) -> tuple[CodecParams, list[Symbol]]:
    """Read an ODM/1 file back into (params, bits)."""
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    lines = text.split("\n")
    if not lines or lines[0] != MAGIC:
        raise FormatError(f"line 1: bad magic {lines[0][:16]!r}, expected {MAGIC!r}")
    if len(lines) < 3:
        raise FormatError("file truncated: need magic, header, and body lines")
    try:
        header = json.loads(lines[1])
    except json.JSONDecodeError as exc:
        raise FormatError(f"line 2: bad header JSON: {exc}") from exc
    required = {"y0", "M0", "Mbar", "a", "delta", "rule", "count"}
    if not isinstance(header, dict) or not required <= set(header):
        raise FormatError(f"line 2: header must carry keys {sorted(required)}")
    count = header["count"]
    if not isinstance(count, int) or count < 0:
        raise FormatError(f"line 2: count must be a non-negative integer, got {count!r}")
    try:
        params = CodecParams(
            y0=header["y0"],
            m0=header["M0"],
            mbar=header["Mbar"],
            a=header["a"],
            delta=header["delta"],
            rule=AdaptationRule(header["rule"]),
        )
    except (ParameterError, ValueError, TypeError) as exc:
        raise FormatError(f"line 2: bad codec parameters: {exc}") from exc
    body = lines[2]
    if len(body) != count:
        raise FormatError(
            f"line 3: body holds {len(body)} symbols, header says {count}"
        )
    bits: list[Symbol] = []
    for offset, ch in enumerate(body):
        if ch == "1":
            bits.append(PLUS)
        elif ch == "0":
            bits.append(MINUS)
        else:
            raise FormatError(f"line 3, offset {offset}: invalid character {ch!r}")
    return params, bits
