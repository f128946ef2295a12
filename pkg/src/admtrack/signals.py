"""Test-signal definitions, grid sampling, and empirical regularity bounds.

Signals are small frozen dataclasses evaluated pointwise. ``Piecewise``
segments run on local time (a segment starting at ``s`` evaluates its child
at ``t - s``) and are right-continuous at their boundaries, so a jump placed
on a grid point is seen by the sampler at its new value.

Two empirical regularity certificates back the verification machinery:

* ``VariationBound`` - per-cell variation rate: ``|x(t) - x(t_k)| <= rate *
  delta`` for oversampled ``t`` in every full grid cell inside a window.
* ``GrowthBound`` - polynomial growth: ``|x(t + tau)| <= scale * (|x(t)| +
  tau**exponent)`` on grid pairs.

Both are certified on finite grids, not analytically.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DomainError, NumericError, ParameterError

__all__ = [
    "Constant",
    "Ramp",
    "Sine",
    "Piecewise",
    "SignalSpec",
    "SampledSignal",
    "VariationBound",
    "GrowthBound",
    "GrowthViolation",
    "sample",
    "sample_count",
    "cell_points",
    "estimate_variation_bound",
    "fit_growth_bound",
    "verify_growth",
    "discontinuities",
]


@dataclass(frozen=True)
class Constant:
    level: float

    def at(self, t: float) -> float:
        return self.level


@dataclass(frozen=True)
class Ramp:
    slope: float
    intercept: float

    def at(self, t: float) -> float:
        return self.intercept + self.slope * t


@dataclass(frozen=True)
class Sine:
    amplitude: float
    frequency_hz: float
    phase: float = 0.0

    def at(self, t: float) -> float:
        return self.amplitude * math.sin(2.0 * math.pi * self.frequency_hz * t + self.phase)


@dataclass(frozen=True)
class Piecewise:
    """Segments of (start_time, signal); each runs on its own local clock."""

    segments: tuple[tuple[float, "SignalSpec"], ...]

    def __post_init__(self) -> None:
        segs = tuple((float(s), spec) for s, spec in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ParameterError("piecewise signal needs at least one segment")
        if segs[0][0] != 0.0:
            raise ParameterError(f"first segment must start at 0, got {segs[0][0]}")
        starts = [s for s, _ in segs]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ParameterError(f"segment start times must strictly increase: {starts}")

    def at(self, t: float) -> float:
        starts = [s for s, _ in self.segments]
        i = max(bisect_right(starts, t) - 1, 0)
        start, spec = self.segments[i]
        return spec.at(t - start)


SignalSpec = Union[Constant, Ramp, Sine, Piecewise]


@dataclass(frozen=True)
class SampledSignal:
    """Grid samples x(k*delta), k = 0..n-1, with optional provenance."""

    delta: float
    values: tuple[float, ...]
    spec: Optional[SignalSpec] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.delta <= 0.0:
            raise ParameterError(f"delta must be > 0, got {self.delta}")
        if any(not math.isfinite(v) for v in self.values):
            raise NumericError("samples must be finite")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class VariationBound:
    """Certifies |x(t) - x(t_k)| <= rate*delta on full cells inside window."""

    rate: float
    window: tuple[float, float]
    oversample_factor: int


@dataclass(frozen=True)
class GrowthBound:
    """Certifies |x(t + tau)| <= scale * (|x(t)| + tau**exponent)."""

    scale: float
    exponent: float

    def __post_init__(self) -> None:
        if self.scale <= 0.0 or self.exponent <= 0.0:
            raise ParameterError("growth bound needs scale > 0 and exponent > 0")


@dataclass(frozen=True)
class GrowthViolation:
    k: int
    m: int
    value: float
    limit: float


def sample_count(delta: float, horizon: float) -> int:
    """Number of grid points k*delta in [0, horizon), computed on the actual
    float grid so the count is consistent with the sampler."""
    if delta <= 0.0 or horizon <= 0.0:
        raise ParameterError("delta and horizon must be > 0")
    n = max(int(math.ceil(horizon / delta)), 1)
    while n * delta < horizon:
        n += 1
    while n > 0 and (n - 1) * delta >= horizon:
        n -= 1
    return n


def sample(spec: SignalSpec, delta: float, horizon: float) -> SampledSignal:
    """Evaluate the signal on the half-open grid [0, horizon)."""
    n = sample_count(delta, horizon)
    values = tuple(spec.at(k * delta) for k in range(n))
    return SampledSignal(delta=delta, values=values, spec=spec)


def cell_points(k: int, delta: float, factor: int) -> list[float]:
    """Oversampled times covering cell [k*delta, (k+1)*delta], endpoints on
    the grid exactly."""
    step = delta / factor
    t0 = k * delta
    return [t0 + j * step for j in range(factor)] + [(k + 1) * delta]


def estimate_variation_bound(
    spec: SignalSpec,
    delta: float,
    window: tuple[float, float],
    oversample_factor: int = 32,
) -> VariationBound:
    """Largest per-cell variation rate seen on the oversampled grid.

    Scans every full cell [t_k, t_{k+1}] inside the window and takes
    ``max |x(t) - x(t_k)| / delta`` over ``oversample_factor + 1`` points per
    cell. Nondecreasing when the factor is refined to a multiple.
    """
    if oversample_factor < 2:
        raise ParameterError("oversample_factor must be >= 2")
    alpha, beta = window
    if not alpha < beta:
        raise ParameterError(f"empty window: {window}")
    k_lo = max(int(math.floor(alpha / delta)) - 1, 0)
    k_hi = int(math.ceil(beta / delta)) + 1
    worst = 0.0
    cells = 0
    for k in range(k_lo, k_hi):
        if k * delta < alpha or (k + 1) * delta > beta:
            continue
        cells += 1
        x0 = spec.at(k * delta)
        for t in cell_points(k, delta, oversample_factor):
            worst = max(worst, abs(spec.at(t) - x0))
    if cells == 0:
        raise DomainError(f"window {window} contains no full grid cell at delta={delta}")
    return VariationBound(rate=worst / delta, window=(alpha, beta), oversample_factor=oversample_factor)


def fit_growth_bound(samples: SampledSignal, exponent: float = 1.0) -> GrowthBound:
    """Smallest scale making the growth inequality hold on all grid pairs.

    The fitted certificate is tight by construction;
    :func:`verify_growth` on the same samples returns no violations.
    """
    values = np.abs(np.asarray(samples.values, dtype=float))
    n = len(values)
    scale = 0.0
    for m in range(1, n):
        tau = (m * samples.delta) ** exponent
        ratios = values[m:] / (values[:-m] + tau)
        if ratios.size:
            scale = max(scale, float(ratios.max()))
    return GrowthBound(scale=max(scale, 1e-12), exponent=exponent)


def verify_growth(samples: SampledSignal, bound: GrowthBound) -> list[GrowthViolation]:
    """All grid pairs (k, m >= 1) breaking the growth inequality (closed)."""
    values = np.abs(np.asarray(samples.values, dtype=float))
    n = len(values)
    violations: list[GrowthViolation] = []
    for m in range(1, n):
        tau = (m * samples.delta) ** bound.exponent
        limits = bound.scale * (values[:-m] + tau)
        bad = np.nonzero(values[m:] > limits)[0]
        for k in bad:
            violations.append(
                GrowthViolation(k=int(k), m=m, value=float(values[k + m]), limit=float(limits[k]))
            )
    return violations


def discontinuities(spec: SignalSpec, _offset: float = 0.0, _until: float = math.inf) -> list[tuple[float, float]]:
    """Jump locations (absolute time, signed jump size) of a signal.

    Only piecewise boundaries can jump; nested piecewise children are scanned
    within the span their parent keeps them active.
    """
    if not isinstance(spec, Piecewise):
        return []
    jumps: list[tuple[float, float]] = []
    segs = spec.segments
    for i, (start, child) in enumerate(segs):
        end = segs[i + 1][0] if i + 1 < len(segs) else math.inf
        if i > 0:
            prev_start, prev_child = segs[i - 1]
            left = prev_child.at(start - prev_start)
            right = child.at(0.0)
            if left != right and _offset + start < _until:
                jumps.append((_offset + start, right - left))
        jumps.extend(discontinuities(child, _offset + start, min(_until, _offset + end)))
    return sorted(jumps)
