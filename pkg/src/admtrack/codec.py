"""One-bit signal tracking codec (adaptive delta modulation, floored step size).

The encoder emits a single binary symbol per sample: +1 when the running
estimate sits below the sample, -1 when it sits above (an exact tie flips the
previous symbol). Both ends advance the same (estimate, slope) recursion from
shared parameters, so a decoder fed the symbol stream reproduces the encoder's
estimate bit for bit.

Per step k >= 1 the order is fixed: predict the estimate, emit the symbol,
classify the step as a switch (symbol differs from the previous one), then
update the slope. Step 0 is special: the initial estimate and slope are used
as-is and step 0 is never a switch.

Slope adaptation comes in two flavours:

* ``MODIFIED`` - grow by ``a`` on repeated symbols, hold right after a
  switch, and on a switch shrink by ``a`` but never below the floor ``Mbar``.
* ``JAYANT`` - the classical rule: grow by ``a`` off switches, shrink by
  ``a`` on switches, no hold and no floor.

The modified rule's slope is always ``M0 * a**p`` or ``Mbar * a**p`` for some
integer ``p`` (``p >= 0`` once floored). The state machine tracks that
base/power pair exactly and derives the float slope from it, so steady-state
slopes compare bit-exactly against ``Mbar`` and ``a * Mbar`` (a plain
multiplicative recursion can land one ulp off the floor after a grow/shrink
pair).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .errors import NumericError, ParameterError, SequencingError, DomainError

__all__ = [
    "PLUS",
    "MINUS",
    "Symbol",
    "AdaptationRule",
    "CodecParams",
    "CodecState",
    "StepRecord",
    "Trace",
    "init_state",
    "symbol_for_sample",
    "step_size_update",
    "encode_step",
    "decode_step",
    "reconstruct",
    "encode_signal",
    "decode_bitstream",
    "check_trace",
]

Symbol = int
PLUS: Symbol = 1
MINUS: Symbol = -1


class AdaptationRule(str, Enum):
    MODIFIED = "modified"
    JAYANT = "jayant"


@dataclass(frozen=True)
class CodecParams:
    """Shared contract between encoder and decoder.

    y0:    initial estimate (signal units)
    m0:    initial slope, > 0 (signal units per second)
    mbar:  slope floor, >= 0; ignored (and required to be 0) under JAYANT
    a:     adaptation factor, in (1, 2]
    delta: sampling period, > 0 (seconds)
    """

    y0: float
    m0: float
    mbar: float
    a: float
    delta: float
    rule: AdaptationRule = AdaptationRule.MODIFIED

    def __post_init__(self) -> None:
        for name in ("y0", "m0", "mbar", "a", "delta"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ParameterError(f"{name} must be a finite number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if not isinstance(self.rule, AdaptationRule):
            object.__setattr__(self, "rule", AdaptationRule(self.rule))
        if not 1.0 < self.a <= 2.0:
            raise ParameterError(f"adaptation factor a must be in (1, 2], got {self.a}")
        if self.delta <= 0.0:
            raise ParameterError(f"sampling period delta must be > 0, got {self.delta}")
        if self.m0 <= 0.0:
            raise ParameterError(f"initial slope m0 must be > 0, got {self.m0}")
        if self.mbar < 0.0:
            raise ParameterError(f"slope floor mbar must be >= 0, got {self.mbar}")
        if self.rule is AdaptationRule.JAYANT and self.mbar != 0.0:
            raise ParameterError("the Jayant rule has no slope floor; set mbar=0")

    def with_rule(self, rule: AdaptationRule) -> "CodecParams":
        """Same parameters under another rule (floor zeroed for JAYANT)."""
        rule = AdaptationRule(rule)
        mbar = 0.0 if rule is AdaptationRule.JAYANT else self.mbar
        return replace(self, rule=rule, mbar=mbar)


@dataclass(frozen=True)
class CodecState:
    """State after ``k`` completed steps; identical on both ends.

    ``y``/``m`` are the current estimate and slope, ``h`` the last emitted
    symbol (+1 before step 0) and ``h_prev`` the one before that.
    ``prev_in_switch`` says whether the last completed step was a switch.
    ``m_power``/``m_floored`` are the exact bookkeeping behind ``m``: the
    slope equals ``(mbar if m_floored else m0) * a**m_power`` (JAYANT tracks
    ``m`` multiplicatively instead and leaves them at their running values).
    """

    params: CodecParams
    k: int
    y: float
    m: float
    h: Symbol
    h_prev: Symbol
    prev_in_switch: bool
    m_power: int = 0
    m_floored: bool = False


@dataclass(frozen=True)
class StepRecord:
    """Everything known about one codec step (``x`` absent on decode)."""

    k: int
    t: float
    x: Optional[float]
    y: float
    h: Symbol
    m: float
    in_switch: bool
    substituted: bool = False


@dataclass(frozen=True)
class Trace:
    params: CodecParams
    records: tuple[StepRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def bits(self) -> list[Symbol]:
        return [r.h for r in self.records]

    def switch_indices(self) -> list[int]:
        return [r.k for r in self.records if r.in_switch]

    def estimate_at(self, t: float) -> float:
        """Piecewise-linear reconstruction at any time covered by the trace."""
        if not self.records:
            raise DomainError("empty trace")
        delta = self.params.delta
        n = len(self.records)
        k = min(max(int(t // delta), 0), n - 1)
        # float division can land one cell off the grid; nudge back
        while k > 0 and t < k * delta:
            k -= 1
        while k < n - 1 and t > (k + 1) * delta:
            k += 1
        return reconstruct(self.records[k], t, delta)


def init_state(params: CodecParams) -> CodecState:
    """Fresh pre-step-0 state: estimate y0, slope m0, symbol memory +1."""
    return CodecState(
        params=params,
        k=0,
        y=params.y0,
        m=params.m0,
        h=PLUS,
        h_prev=PLUS,
        prev_in_switch=False,
    )


def symbol_for_sample(y_k: float, x_k: float, h_prev: Symbol) -> Symbol:
    """+1 if the estimate is below the sample, -1 if above, -h_prev on a tie.

    The tie uses exact float equality: it is an encoder-only branch and any
    epsilon would be arbitrary.
    """
    if not (math.isfinite(y_k) and math.isfinite(x_k)):
        raise NumericError(f"non-finite comparison: y={y_k!r}, x={x_k!r}")
    if y_k < x_k:
        return PLUS
    if y_k > x_k:
        return MINUS
    return -_check_symbol(h_prev)


def step_size_update(
    m_prev: float,
    in_switch: bool,
    prev_in_switch: bool,
    params: CodecParams,
) -> float:
    """Float-level slope rule for one step.

    MODIFIED: grow ``a*m`` when neither this step nor the previous one
    switched, hold right after a switch, ``max(m/a, mbar)`` on a switch.
    JAYANT: grow off switches, ``m/a`` on switches.

    This is the per-step contract; the state machine derives the same value
    through exact power bookkeeping (see module docstring).
    """
    if not math.isfinite(m_prev) or m_prev <= 0.0:
        raise NumericError(f"slope must be positive and finite, got {m_prev!r}")
    if params.rule is AdaptationRule.JAYANT:
        return m_prev / params.a if in_switch else params.a * m_prev
    if in_switch:
        return max(m_prev / params.a, params.mbar)
    if prev_in_switch:
        return m_prev
    return params.a * m_prev


def _check_symbol(h: Symbol) -> Symbol:
    if h == PLUS:
        return PLUS
    if h == MINUS:
        return MINUS
    raise NumericError(f"binary symbol must be +1 or -1, got {h!r}")


def _check_state(state: CodecState) -> None:
    if (
        state.k < 0
        or not math.isfinite(state.y)
        or not math.isfinite(state.m)
        or state.m <= 0.0
    ):
        raise SequencingError(f"corrupt codec state at step {state.k}")


def _slope_value(params: CodecParams, power: int, floored: bool) -> float:
    base = params.mbar if floored else params.m0
    # powers 0 and 1 are the steady-state values; keep them free of libm pow
    # so they compare bit-exactly against mbar and a*mbar
    if power == 0:
        return base
    if power == 1:
        return base * params.a
    return base * params.a ** power


def _next_slope(state: CodecState, in_switch: bool) -> tuple[int, bool]:
    """Next (power, floored) pair; slope = (mbar if floored else m0) * a**power."""
    params = state.params
    power, floored = state.m_power, state.m_floored
    if params.rule is AdaptationRule.JAYANT:
        return (power - 1, False) if in_switch else (power + 1, False)
    if in_switch:
        if floored:
            return max(power - 1, 0), True
        if _slope_value(params, power - 1, False) > params.mbar:
            return power - 1, False
        return 0, True
    if state.prev_in_switch:
        return power, floored
    return power + 1, floored


def _advance(
    state: CodecState,
    x_k: Optional[float],
    h_k: Optional[Symbol],
    substituted: bool = False,
) -> tuple[CodecState, StepRecord]:
    """Shared encoder/decoder recursion for one step.

    Exactly one of ``x_k`` (encode: symbol from the comparison rule) and
    ``h_k`` (decode: symbol from the channel) is given.
    """
    _check_state(state)
    params = state.params
    k = state.k
    if k == 0:
        y = state.y
        m = state.m
        power, floored = state.m_power, state.m_floored
        h = symbol_for_sample(y, x_k, state.h) if h_k is None else _check_symbol(h_k)
        in_switch = False  # switches are defined from step 1 on
    else:
        y = state.y + state.h * state.m * params.delta
        if not math.isfinite(y):
            raise NumericError(f"estimate overflowed at step {k}")
        h = symbol_for_sample(y, x_k, state.h) if h_k is None else _check_symbol(h_k)
        in_switch = state.h * h < 0
        power, floored = _next_slope(state, in_switch)
        if params.rule is AdaptationRule.JAYANT:
            # No floor to re-anchor to, so track the slope multiplicatively;
            # this keeps the m_k/m_{k-1} ratio exactly a or 1/a.
            m = state.m / params.a if in_switch else params.a * state.m
        elif (power, floored) == (state.m_power, state.m_floored):
            m = state.m
        else:
            m = _slope_value(params, power, floored)
        if not math.isfinite(m) or m <= 0.0:
            raise NumericError(f"slope left (0, inf) at step {k}: {m!r}")
    record = StepRecord(
        k=k,
        t=k * params.delta,
        x=x_k,
        y=y,
        h=h,
        m=m,
        in_switch=in_switch,
        substituted=substituted,
    )
    new_state = CodecState(
        params=params,
        k=k + 1,
        y=y,
        m=m,
        h=h,
        h_prev=state.h,
        prev_in_switch=in_switch,
        m_power=power,
        m_floored=floored,
    )
    return new_state, record


def encode_step(state: CodecState, x_k: float) -> tuple[CodecState, Symbol, StepRecord]:
    """Consume one sample, emit one symbol, advance the shared recursion."""
    if not isinstance(x_k, (int, float)) or not math.isfinite(x_k):
        raise NumericError(f"sample must be finite, got {x_k!r}")
    new_state, record = _advance(state, float(x_k), None)
    return new_state, record.h, record


def decode_step(state: CodecState, h_k: Symbol) -> tuple[CodecState, StepRecord]:
    """Consume one received symbol, advance the shared recursion."""
    return _advance(state, None, h_k)


def reconstruct(record: StepRecord, t: float, delta: float) -> float:
    """Piecewise-linear estimate y(t) on the record's cell [t_k, t_{k+1}].

    At the right endpoint the elapsed time is taken as exactly ``delta`` so
    the value matches the next record's estimate bit for bit (the grid times
    k*delta and (k+1)*delta do not always differ by exactly delta in floats).
    """
    t_next = (record.k + 1) * delta
    if not record.t <= t <= t_next:
        raise DomainError(f"t={t} outside cell [{record.t}, {t_next}] of step {record.k}")
    elapsed = delta if t == t_next else t - record.t
    return record.y + record.h * record.m * elapsed


def encode_signal(params: CodecParams, samples) -> tuple[list[Symbol], Trace]:
    """Encode grid samples into one symbol each; returns (bits, full trace).

    ``samples`` is a ``signals.SampledSignal`` (or anything with ``delta``
    and ``values``); its grid must match ``params.delta`` exactly.
    """
    if samples.delta != params.delta:
        raise ParameterError(
            f"sample grid delta {samples.delta!r} != codec delta {params.delta!r}"
        )
    state = init_state(params)
    bits: list[Symbol] = []
    records: list[StepRecord] = []
    for x in samples.values:
        state, h, record = encode_step(state, x)
        bits.append(h)
        records.append(record)
    return bits, Trace(params=params, records=tuple(records))


def decode_bitstream(params: CodecParams, bits) -> Trace:
    """Mirror of :func:`encode_signal`: same recursion driven by the bits."""
    state = init_state(params)
    records: list[StepRecord] = []
    for h in bits:
        state, record = decode_step(state, h)
        records.append(record)
    return Trace(params=params, records=tuple(records))


def check_trace(trace: Trace) -> list[tuple[int, str]]:
    """Re-derive the whole trace from its bits and report any mismatch.

    Used to vet untrusted (possibly tampered) trace files: every y, m, t and
    switch flag must match the shared recursion exactly, and where samples
    are present the symbol must match the comparison rule.
    """
    problems: list[tuple[int, str]] = []
    rederived = decode_bitstream(trace.params, trace.bits())
    h_prev = PLUS
    for k, (got, want) in enumerate(zip(trace.records, rederived.records)):
        if got.k != k:
            problems.append((k, f"record index {got.k} != position {k}"))
        if got.t != want.t:
            problems.append((k, f"t={got.t!r} != k*delta={want.t!r}"))
        if got.y != want.y:
            problems.append((k, f"y={got.y!r} != recursion value {want.y!r}"))
        if got.m != want.m:
            problems.append((k, f"m={got.m!r} != recursion value {want.m!r}"))
        if got.in_switch != want.in_switch:
            problems.append((k, f"in_switch={got.in_switch} != {want.in_switch}"))
        if got.x is not None and symbol_for_sample(want.y, got.x, h_prev) != got.h:
            problems.append((k, "symbol disagrees with the comparison rule"))
        h_prev = got.h
    return problems
