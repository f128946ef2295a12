"""Experiment orchestration: configs, simulation runs, trace/report files.

An experiment is one JSON document (see ``configs/`` for checked-in
examples)::

    {
      "signal":  {"kind": "sine", "amplitude": 1.0, "frequency_hz": 1.0, "phase": 0.0},
      "codec":   {"y0": 5.0, "M0": 13.0, "Mbar": 13.0, "a": 1.5,
                  "delta": 0.01, "rule": "modified"},
      "horizon": 4.0,
      "channel": {"kind": "noiseless"},
      "oversample_factor": 32,
      "growth":  {"scale": 10.0, "exponent": 1.0},
      "outputs": {"trace_csv": "trace.csv", "report_json": "report.json"},
      "comparison": {"baseline": "jayant", "proximity_band_multiplier": 1.0}
    }

``growth`` and ``comparison`` are optional. Trace CSVs have the fixed header
``k,t,x,y,h,M,in_switch,err_abs`` (x and err_abs cells are empty on
decode-only traces); report JSONs are sorted-key documents. Identical
configs produce byte-identical outputs.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from typing import Optional

from .codec import (
    AdaptationRule,
    CodecParams,
    StepRecord,
    Symbol,
    Trace,
    check_trace,
    decode_bitstream,
    encode_signal,
)
from .channel import ChannelModel, Erasure, Noiseless, ReceivedStream, decode_with_erasures, transmit
from .errors import DomainError, FormatError, ParameterError
from .signals import (
    Constant,
    GrowthBound,
    Piecewise,
    Ramp,
    SampledSignal,
    SignalSpec,
    Sine,
    discontinuities,
    estimate_variation_bound,
    sample,
)
from .theory import TheoremReport, restart_index, verify_theorem

__all__ = [
    "TRACE_COLUMNS",
    "ComparisonSettings",
    "ComparisonReport",
    "ExperimentOutputs",
    "ExperimentConfig",
    "SimulationResult",
    "signal_to_dict",
    "signal_from_dict",
    "channel_to_dict",
    "channel_from_dict",
    "codec_to_dict",
    "codec_from_dict",
    "config_to_dict",
    "config_from_dict",
    "load_config",
    "run_simulation",
    "run_compare",
    "recovery_steps",
    "write_trace_csv",
    "read_trace_csv",
    "write_json",
]

TRACE_COLUMNS = ["k", "t", "x", "y", "h", "M", "in_switch", "err_abs"]


@dataclass(frozen=True)
class ComparisonSettings:
    baseline: AdaptationRule = AdaptationRule.JAYANT
    proximity_band_multiplier: float = 1.0

    def __post_init__(self) -> None:
        if not isinstance(self.baseline, AdaptationRule):
            object.__setattr__(self, "baseline", AdaptationRule(self.baseline))
        if self.proximity_band_multiplier <= 0.0:
            raise ParameterError("proximity band multiplier must be > 0")


@dataclass(frozen=True)
class ExperimentOutputs:
    trace_csv: str = "trace.csv"
    report_json: str = "report.json"


@dataclass(frozen=True)
class ExperimentConfig:
    signal: SignalSpec
    codec: CodecParams
    horizon: float
    channel: ChannelModel = field(default_factory=Noiseless)
    oversample_factor: int = 32
    growth: Optional[GrowthBound] = None
    outputs: ExperimentOutputs = field(default_factory=ExperimentOutputs)
    comparison: Optional[ComparisonSettings] = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.horizon) and self.horizon > 0.0):
            raise ParameterError(f"horizon must be finite and > 0, got {self.horizon}")
        if self.horizon < self.codec.delta:
            raise ParameterError("horizon shorter than one sampling period")
        if self.oversample_factor < 2:
            raise ParameterError("oversample_factor must be >= 2")


@dataclass
class ComparisonReport:
    """Post-jump recovery of the configured rule vs the baseline rule.

    Recovery counts steps after the jump until the sample error re-enters the
    proximity band and stays there for 3 consecutive steps; ``None`` means
    the rule did not recover within the horizon.
    """

    jump_time: float
    band: float
    recovery_steps_modified: Optional[int]
    recovery_steps_baseline: Optional[int]
    baseline_rule: AdaptationRule
    band_multiplier: float
    variation_rate: float

    def to_dict(self) -> dict:
        return {
            "jump_time": self.jump_time,
            "band": self.band,
            "recovery_steps_modified": self.recovery_steps_modified,
            "recovery_steps_baseline": self.recovery_steps_baseline,
            "baseline_rule": self.baseline_rule.value,
            "band_multiplier": self.band_multiplier,
            "variation_rate": self.variation_rate,
        }


@dataclass
class SimulationResult:
    config: ExperimentConfig
    samples: SampledSignal
    bits: list[Symbol]
    received: ReceivedStream
    encoder_trace: Trace
    decoder_trace: Trace
    report: TheoremReport


# --- JSON (de)serialization ------------------------------------------------


def signal_to_dict(spec: SignalSpec) -> dict:
    if isinstance(spec, Constant):
        return {"kind": "constant", "level": spec.level}
    if isinstance(spec, Ramp):
        return {"kind": "ramp", "slope": spec.slope, "intercept": spec.intercept}
    if isinstance(spec, Sine):
        return {
            "kind": "sine",
            "amplitude": spec.amplitude,
            "frequency_hz": spec.frequency_hz,
            "phase": spec.phase,
        }
    if isinstance(spec, Piecewise):
        return {
            "kind": "piecewise",
            "segments": [
                {"start": start, "signal": signal_to_dict(child)}
                for start, child in spec.segments
            ],
        }
    raise FormatError(f"unknown signal type {type(spec).__name__}")


def signal_from_dict(data: dict) -> SignalSpec:
    try:
        kind = data["kind"]
        if kind == "constant":
            return Constant(level=float(data["level"]))
        if kind == "ramp":
            return Ramp(slope=float(data["slope"]), intercept=float(data["intercept"]))
        if kind == "sine":
            return Sine(
                amplitude=float(data["amplitude"]),
                frequency_hz=float(data["frequency_hz"]),
                phase=float(data.get("phase", 0.0)),
            )
        if kind == "piecewise":
            return Piecewise(
                segments=tuple(
                    (float(seg["start"]), signal_from_dict(seg["signal"]))
                    for seg in data["segments"]
                )
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad signal spec {data!r}: {exc}") from exc
    raise FormatError(f"unknown signal kind {data.get('kind')!r}")


def channel_to_dict(model: ChannelModel) -> dict:
    if isinstance(model, Noiseless):
        return {"kind": "noiseless"}
    return {"kind": "erasure", "p": model.p, "seed": model.seed}


def channel_from_dict(data: dict) -> ChannelModel:
    kind = data.get("kind", "noiseless")
    if kind == "noiseless":
        return Noiseless()
    if kind == "erasure":
        try:
            return Erasure(p=float(data["p"]), seed=int(data.get("seed", 0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad erasure channel {data!r}: {exc}") from exc
    raise FormatError(f"unknown channel kind {kind!r}")


def codec_to_dict(params: CodecParams) -> dict:
    return {
        "y0": params.y0,
        "M0": params.m0,
        "Mbar": params.mbar,
        "a": params.a,
        "delta": params.delta,
        "rule": params.rule.value,
    }


def codec_from_dict(data: dict) -> CodecParams:
    try:
        return CodecParams(
            y0=float(data["y0"]),
            m0=float(data["M0"]),
            mbar=float(data["Mbar"]),
            a=float(data["a"]),
            delta=float(data["delta"]),
            rule=AdaptationRule(data.get("rule", "modified")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParameterError):
            raise
        raise FormatError(f"bad codec parameters {data!r}: {exc}") from exc


def config_to_dict(config: ExperimentConfig) -> dict:
    doc = {
        "signal": signal_to_dict(config.signal),
        "codec": codec_to_dict(config.codec),
        "horizon": config.horizon,
        "channel": channel_to_dict(config.channel),
        "oversample_factor": config.oversample_factor,
        "outputs": {
            "trace_csv": config.outputs.trace_csv,
            "report_json": config.outputs.report_json,
        },
    }
    if config.growth is not None:
        doc["growth"] = {"scale": config.growth.scale, "exponent": config.growth.exponent}
    if config.comparison is not None:
        doc["comparison"] = {
            "baseline": config.comparison.baseline.value,
            "proximity_band_multiplier": config.comparison.proximity_band_multiplier,
        }
    return doc


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise FormatError("config must be a JSON object")
    missing = {"signal", "codec", "horizon"} - set(data)
    if missing:
        raise FormatError(f"config missing keys: {sorted(missing)}")
    growth = None
    if "growth" in data and data["growth"] is not None:
        g = data["growth"]
        try:
            growth = GrowthBound(scale=float(g["scale"]), exponent=float(g.get("exponent", 1.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad growth section {g!r}: {exc}") from exc
    comparison = None
    if "comparison" in data and data["comparison"] is not None:
        c = data["comparison"]
        comparison = ComparisonSettings(
            baseline=AdaptationRule(c.get("baseline", "jayant")),
            proximity_band_multiplier=float(c.get("proximity_band_multiplier", 1.0)),
        )
    outputs = ExperimentOutputs(
        trace_csv=data.get("outputs", {}).get("trace_csv", "trace.csv"),
        report_json=data.get("outputs", {}).get("report_json", "report.json"),
    )
    return ExperimentConfig(
        signal=signal_from_dict(data["signal"]),
        codec=codec_from_dict(data["codec"]),
        horizon=float(data["horizon"]),
        channel=channel_from_dict(data.get("channel", {"kind": "noiseless"})),
        oversample_factor=int(data.get("oversample_factor", 32)),
        growth=growth,
        outputs=outputs,
        comparison=comparison,
    )


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: bad JSON: {exc}") from exc
    return config_from_dict(data)


# --- simulation ------------------------------------------------------------


def run_simulation(config: ExperimentConfig) -> SimulationResult:
    """Sample, encode, transmit, decode, and verify one experiment."""
    samples = sample(config.signal, config.codec.delta, config.horizon)
    bits, encoder_trace = encode_signal(config.codec, samples)
    received = transmit(bits, config.channel)
    if received.erased_positions():
        decoder_trace = decode_with_erasures(config.codec, received)
    else:
        decoder_trace = decode_bitstream(config.codec, list(received.symbols))
    variation = estimate_variation_bound(
        config.signal,
        config.codec.delta,
        (0.0, len(samples) * config.codec.delta),
        config.oversample_factor,
    )
    report = verify_theorem(
        decoder_trace,
        samples,
        variation,
        growth=config.growth,
        oversample_factor=config.oversample_factor,
    )
    return SimulationResult(
        config=config,
        samples=samples,
        bits=bits,
        received=received,
        encoder_trace=encoder_trace,
        decoder_trace=decoder_trace,
        report=report,
    )


def recovery_steps(
    errors: list[float],
    start: int,
    band: float,
    persistence: int = 3,
) -> Optional[int]:
    """Steps past ``start`` until ``persistence`` consecutive in-band errors.

    3 consecutive steps are required so a transient crossing of the band does
    not count as recovery (3 matches the maximum steady-state switch gap).
    """
    n = len(errors)
    for r in range(max(n - start - persistence + 1, 0)):
        if all(errors[start + r + j] <= band for j in range(persistence)):
            return r
    return None


def _segment_variation_rate(config: ExperimentConfig, horizon_end: float) -> float:
    """Largest per-segment variation rate, jumps excluded.

    Cells are closed intervals, so a window ending exactly on a jump would
    see the jump's right value at its last point; each segment's window is
    clipped back to the last grid time strictly before the jump.
    """
    delta = config.codec.delta
    jumps = [t for t, _ in discontinuities(config.signal) if 0.0 < t < horizon_end]
    edges = [0.0] + jumps + [horizon_end]
    worst = 0.0
    for lo, hi in zip(edges, edges[1:]):
        if hi < horizon_end:
            hi = (restart_index(delta, hi) - 1) * delta
        if hi <= lo:
            continue
        try:
            bound = estimate_variation_bound(
                config.signal, delta, (lo, hi), config.oversample_factor
            )
        except DomainError:
            continue  # segment shorter than one grid cell
        worst = max(worst, bound.rate)
    return worst


def run_compare(config: ExperimentConfig) -> ComparisonReport:
    """Run the configured rule and the baseline rule on identical samples and
    measure post-jump proximity recovery for both."""
    settings = config.comparison
    if settings is None:
        raise ParameterError("config has no comparison section")
    horizon_end = config.horizon
    jumps = [t for t, _ in discontinuities(config.signal) if 0.0 < t < horizon_end]
    if not jumps:
        raise ParameterError("comparison needs a signal with at least one jump")
    jump_time = jumps[0]
    start = restart_index(config.codec.delta, jump_time)

    samples = sample(config.signal, config.codec.delta, config.horizon)
    rate = _segment_variation_rate(config, horizon_end)
    band = settings.proximity_band_multiplier * (
        (config.codec.a * config.codec.mbar + rate) * config.codec.delta
    )

    results: dict[str, Optional[int]] = {}
    for label, params in (
        ("modified", config.codec),
        ("baseline", config.codec.with_rule(settings.baseline)),
    ):
        _, trace = encode_signal(params, samples)
        errors = [abs(x - r.y) for x, r in zip(samples.values, trace.records)]
        results[label] = recovery_steps(errors, start, band)

    return ComparisonReport(
        jump_time=jump_time,
        band=band,
        recovery_steps_modified=results["modified"],
        recovery_steps_baseline=results["baseline"],
        baseline_rule=settings.baseline,
        band_multiplier=settings.proximity_band_multiplier,
        variation_rate=rate,
    )


# --- file I/O ---------------------------------------------------------------


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_trace_csv(path, trace: Trace, x_values=None) -> None:
    """Write the fixed-schema trace CSV; ``x_values`` fills the x/err_abs
    columns for decode-side traces whose records carry no samples."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for record in trace.records:
            x = record.x
            if x is None and x_values is not None:
                x = x_values[record.k]
            err = abs(x - record.y) if x is not None else None
            writer.writerow(
                [
                    record.k,
                    _format_cell(record.t),
                    _format_cell(x),
                    _format_cell(record.y),
                    record.h,
                    _format_cell(record.m),
                    _format_cell(record.in_switch),
                    _format_cell(err),
                ]
            )
    os.replace(tmp, path)


def read_trace_csv(path, params: CodecParams) -> Trace:
    """Read a trace CSV back; codec params come from the caller (the CSV
    carries none). Raises FormatError with the offending row number."""
    records: list[StepRecord] = []
    with open(path, "r", encoding="ascii", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file, expected header {TRACE_COLUMNS}")
        if header != TRACE_COLUMNS:
            raise FormatError(f"{path}: row 1: header {header} != {TRACE_COLUMNS}")
        for i, row in enumerate(reader, start=2):
            try:
                k = int(row[0])
                record = StepRecord(
                    k=k,
                    t=float(row[1]),
                    x=float(row[2]) if row[2] else None,
                    y=float(row[3]),
                    h=int(row[4]),
                    m=float(row[5]),
                    in_switch=row[6] == "1",
                )
            except (IndexError, ValueError) as exc:
                raise FormatError(f"{path}: row {i}: {exc}") from exc
            if record.h not in (1, -1):
                raise FormatError(f"{path}: row {i}: h must be +1 or -1, got {row[4]}")
            if k != len(records):
                raise FormatError(f"{path}: row {i}: step index {k}, expected {len(records)}")
            records.append(record)
    return Trace(params=params, records=tuple(records))


def write_json(path, document: dict) -> None:
    """Sorted-key JSON with a trailing newline, written atomically."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(document, fh, sort_keys=True, indent=2)
        fh.write("\n")
    os.replace(tmp, path)


def simulation_document(result: SimulationResult) -> dict:
    """Report JSON body for one simulation run."""
    return {
        "codec": codec_to_dict(result.config.codec),
        "channel": channel_to_dict(result.config.channel),
        "horizon": result.config.horizon,
        "n_samples": len(result.samples),
        "n_bits": len(result.bits),
        "n_erasures": len(result.received.erased_positions()),
        "verification": result.report.to_dict(),
    }


def consistency_violations(trace: Trace) -> list[dict]:
    """check_trace problems in report-JSON shape."""
    return [{"claim": "trace_consistency", "step": k, "detail": msg} for k, msg in check_trace(trace)]
