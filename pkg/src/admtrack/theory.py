"""Tracking-guarantee bounds and trace verification.

The codec comes with three phase guarantees on signals with a certified
variation rate ``D`` (see :mod:`admtrack.signals`) when the floor satisfies
``Mbar >= 2*D``:

* acquisition - the first switch index ``tau`` is bounded via a polynomial
  growth certificate for the signal;
* settling - within ``ceil(3*log_a(M_tau/Mbar) + 6)`` steps of ``tau`` there
  is a step ``eta`` whose slope sits on the floor and whose error is already
  inside the steady band;
* steady state - from ``eta`` on, the slope only takes the values ``Mbar``
  and ``a*Mbar`` (exactly ``Mbar`` on every switch), sample errors stay
  within ``(a*Mbar + D)*delta``, the reconstruction between samples within
  ``(a*Mbar + 2*D)*delta``, consecutive switches are at most 3 apart, and no
  symbol repeats four times.

:func:`verify_theorem` evaluates all of these on a concrete trace and
reports violations; claims whose preconditions fail are reported as not
applicable instead. After a signal jump at time ``s`` the same checks can be
re-applied to the trace suffix (``start_index = restart_index(delta, s)``)
with the initial estimate and slope taken from the trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .codec import AdaptationRule, CodecParams, Trace, reconstruct
from .errors import DivergenceError, DomainError, ParameterError
from .signals import GrowthBound, SampledSignal, VariationBound, cell_points

__all__ = [
    "Violation",
    "TheoremReport",
    "switch_set",
    "acquisition_bound",
    "settling_window",
    "steady_error_bounds",
    "detect_settling",
    "verify_theorem",
    "restart_index",
]


@dataclass(frozen=True)
class Violation:
    claim: str
    step: int
    detail: str

    def to_dict(self) -> dict:
        return {"claim": self.claim, "step": self.step, "detail": self.detail}


@dataclass
class TheoremReport:
    """Outcome of verifying one trace against the tracking guarantees."""

    tau: Optional[int]
    tau_bound: Optional[int]
    eta: Optional[int]
    eta_window_end: Optional[int]
    sample_error_bound: float
    interval_error_bound: float
    variation_rate: float
    oversample_factor: int
    start_index: int
    n_steps: int
    violations: list[Violation] = field(default_factory=list)
    not_applicable: list[tuple[str, str]] = field(default_factory=list)
    checked: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "tau_bound": self.tau_bound,
            "eta": self.eta,
            "eta_window_end": self.eta_window_end,
            "sample_error_bound": self.sample_error_bound,
            "interval_error_bound": self.interval_error_bound,
            "variation_rate": self.variation_rate,
            "oversample_factor": self.oversample_factor,
            "start_index": self.start_index,
            "n_steps": self.n_steps,
            "violations": [v.to_dict() for v in self.violations],
            "not_applicable": [{"claim": c, "reason": r} for c, r in self.not_applicable],
            "checked": list(self.checked),
            "ok": self.ok,
        }


def switch_set(trace: Trace) -> set[int]:
    """Indices k >= 1 where the emitted symbol differs from the previous one."""
    bits = trace.bits()
    return {k for k in range(1, len(bits)) if bits[k - 1] * bits[k] < 0}


def acquisition_bound(
    params: CodecParams,
    initial_gap: float,
    growth: Optional[GrowthBound],
    cap: int = 10**6,
) -> int:
    """Smallest m with ``m0*(1 + a + ... + a**m)*delta`` covering the initial
    gap plus the growth allowance ``scale*(1 + (m*delta)**exponent)``.

    ``growth=None`` drops the allowance (a signal frozen at its initial
    value). The geometric sum guarantees termination for a > 1; the cap is a
    safety net only.
    """
    if not math.isfinite(initial_gap) or initial_gap < 0.0:
        raise ParameterError(f"initial gap must be finite and >= 0, got {initial_gap!r}")
    geom = 0.0
    a_pow = 1.0
    for m in range(cap + 1):
        geom += a_pow
        allowance = 0.0
        if growth is not None:
            allowance = growth.scale * (1.0 + (m * params.delta) ** growth.exponent)
        if params.m0 * geom * params.delta >= initial_gap + allowance:
            return m
        a_pow *= params.a
    raise DivergenceError(f"no acquisition index within cap={cap}")


def settling_window(m_tau: float, params: CodecParams) -> int:
    """Length of the settling window, ``ceil(3*log_a(m_tau/mbar) + 6)``.

    Clamped below at 6 (the value for m_tau == mbar) so a first switch that
    never lifted the slope above the floor still gets the base window. The
    ceiling is taken with a 1e-9 snap so exact powers of ``a`` are not pushed
    up a step by log rounding.
    """
    if params.mbar <= 0.0:
        raise DomainError("settling window needs a positive slope floor")
    if m_tau <= 0.0:
        raise DomainError(f"slope at the first switch must be > 0, got {m_tau!r}")
    width = 3.0 * math.log(m_tau / params.mbar) / math.log(params.a) + 6.0
    return max(6, math.ceil(width - 1e-9))


def steady_error_bounds(params: CodecParams, rate: float) -> tuple[float, float]:
    """(sample bound, interval bound) = ((a*mbar + D)*delta, (a*mbar + 2D)*delta)."""
    if rate < 0.0:
        raise ParameterError(f"variation rate must be >= 0, got {rate!r}")
    sample_bound = (params.a * params.mbar + rate) * params.delta
    interval_bound = (params.a * params.mbar + 2.0 * rate) * params.delta
    return sample_bound, interval_bound


def detect_settling(
    trace: Trace,
    x_samples: SampledSignal,
    rate: float,
    start_index: int = 0,
) -> Optional[int]:
    """First step whose slope sits exactly on the floor with the sample error
    already inside the steady band, or None."""
    params = trace.params
    if params.rule is not AdaptationRule.MODIFIED:
        raise ParameterError("settling detection applies to the modified rule only")
    if params.mbar < 2.0 * rate:
        raise ParameterError(
            f"floor {params.mbar} below twice the variation rate {rate}; steady tracking not guaranteed"
        )
    _check_grids(trace, x_samples)
    bound = steady_error_bounds(params, rate)[0]
    for k in range(start_index, len(trace)):
        record = trace.records[k]
        if record.m == params.mbar and abs(x_samples.values[k] - record.y) <= bound:
            return k
    return None


def restart_index(delta: float, time: float) -> int:
    """Smallest k with k*delta >= time, on the actual float grid."""
    k = max(int(math.ceil(time / delta)), 0)
    while k * delta < time:
        k += 1
    while k > 0 and (k - 1) * delta >= time:
        k -= 1
    return k


def _check_grids(trace: Trace, x_samples: SampledSignal) -> None:
    if x_samples.delta != trace.params.delta:
        raise ParameterError(
            f"sample grid delta {x_samples.delta!r} != trace delta {trace.params.delta!r}"
        )
    if len(x_samples) != len(trace):
        raise ParameterError(
            f"sample count {len(x_samples)} != trace length {len(trace)}"
        )


def verify_theorem(
    trace: Trace,
    x_samples: SampledSignal,
    variation: VariationBound,
    growth: Optional[GrowthBound] = None,
    oversample_factor: int = 32,
    start_index: int = 0,
) -> TheoremReport:
    """Check every applicable tracking claim on a concrete trace.

    The acquisition claim runs only when a growth certificate is supplied
    (the certificate is the caller's responsibility and should be verified
    on the signal first). Settling and steady-state claims run under the
    modified rule with ``mbar >= 2*variation.rate``; otherwise they are
    reported as not applicable. ``start_index`` re-applies everything to a
    trace suffix, taking the estimate and slope found there as the new
    initial conditions (the post-jump restart reading).
    """
    params = trace.params
    _check_grids(trace, x_samples)
    n = len(trace)
    if n == 0:
        raise ParameterError("empty trace")
    if not 0 <= start_index < n:
        raise ParameterError(f"start_index {start_index} outside trace of length {n}")

    rate = variation.rate
    records = trace.records
    xs = x_samples.values
    sample_bound, interval_bound = steady_error_bounds(params, rate)
    report = TheoremReport(
        tau=None,
        tau_bound=None,
        eta=None,
        eta_window_end=None,
        sample_error_bound=sample_bound,
        interval_error_bound=interval_bound,
        variation_rate=rate,
        oversample_factor=oversample_factor,
        start_index=start_index,
        n_steps=n,
    )

    switches = [k for k in range(start_index + 1, n) if records[k].in_switch]
    report.tau = switches[0] if switches else None

    _check_acquisition(report, trace, xs, growth, switches)
    _check_settling_and_steady(report, trace, x_samples, rate, switches, oversample_factor)
    return report


def _check_acquisition(report, trace, xs, growth, switches) -> None:
    if growth is None:
        report.not_applicable.append(("acquisition", "no growth certificate supplied"))
        return
    report.checked.append("acquisition")
    params = trace.params
    start = report.start_index
    if start == 0:
        start_params = params
    else:
        record = trace.records[start]
        start_params = replace(params, y0=record.y, m0=record.m)
    gap = abs(start_params.y0 - xs[start])
    report.tau_bound = start + acquisition_bound(start_params, gap, growth)
    if report.tau is not None:
        if report.tau > report.tau_bound:
            report.violations.append(
                Violation(
                    "acquisition",
                    report.tau,
                    f"first switch at {report.tau} exceeds bound {report.tau_bound}",
                )
            )
    elif report.tau_bound <= report.n_steps - 1:
        report.violations.append(
            Violation("acquisition", report.tau_bound, f"no switch by bound {report.tau_bound}")
        )
    else:
        report.not_applicable.append(
            ("acquisition", f"horizon ends before the bound {report.tau_bound}")
        )


def _check_settling_and_steady(report, trace, x_samples, rate, switches, factor) -> None:
    params = trace.params
    n = report.n_steps
    records = trace.records
    xs = x_samples.values

    if params.rule is not AdaptationRule.MODIFIED:
        reason = "Jayant rule carries no floor guarantees"
    elif params.mbar <= 0.0:
        reason = "slope floor is zero"
    elif params.mbar < 2.0 * rate:
        reason = f"floor {params.mbar} below twice the variation rate {rate}"
    else:
        reason = None
    if reason is not None:
        report.not_applicable.append(("settling", reason))
        report.not_applicable.append(("steady_state", reason))
        return

    report.eta = detect_settling(trace, x_samples, rate, report.start_index)

    # settling: a floored, in-band step must exist within the window past tau
    if report.tau is None:
        report.not_applicable.append(("settling", "no switch within the horizon"))
    else:
        window = settling_window(records[report.tau].m, params)
        report.eta_window_end = report.tau + window
        last = min(report.eta_window_end, n - 1)
        settled = any(
            records[k].m == params.mbar
            and abs(xs[k] - records[k].y) <= report.sample_error_bound
            for k in range(report.tau, last + 1)
        )
        if settled:
            report.checked.append("settling")
        elif report.eta_window_end <= n - 1:
            report.checked.append("settling")
            report.violations.append(
                Violation(
                    "settling",
                    report.tau,
                    f"no settled step in [{report.tau}, {report.eta_window_end}]",
                )
            )
        else:
            report.not_applicable.append(
                ("settling", f"horizon ends inside the window [{report.tau}, {report.eta_window_end}]")
            )

    if report.eta is None:
        report.not_applicable.append(("steady_state", "no settled step detected"))
        return
    _check_steady(report, trace, x_samples, switches, factor)


def _check_steady(report, trace, x_samples, switches, factor) -> None:
    params = trace.params
    delta = params.delta
    n = report.n_steps
    eta = report.eta
    records = trace.records
    xs = x_samples.values
    floor = params.mbar
    lifted = params.a * params.mbar  # the only other steady slope value

    report.checked += ["step_size_set", "switch_floor", "sample_error"]
    for k in range(eta, n):
        record = records[k]
        if record.m != floor and record.m != lifted:
            report.violations.append(
                Violation("step_size_set", k, f"slope {record.m!r} not in {{mbar, a*mbar}}")
            )
        if record.in_switch and record.m != floor:
            report.violations.append(
                Violation("switch_floor", k, f"switch slope {record.m!r} != mbar {floor!r}")
            )
        err = abs(xs[k] - record.y)
        if err > report.sample_error_bound:
            report.violations.append(
                Violation(
                    "sample_error", k, f"|x - y| = {err} > {report.sample_error_bound}"
                )
            )

    if x_samples.spec is None:
        report.not_applicable.append(
            ("interval_error", "samples carry no signal spec to evaluate between grid points")
        )
    else:
        report.checked.append("interval_error")
        spec = x_samples.spec
        for k in range(eta, n):
            record = records[k]
            worst_t, worst = None, 0.0
            for t in cell_points(k, delta, factor):
                err = abs(spec.at(t) - reconstruct(record, t, delta))
                if err > worst:
                    worst_t, worst = t, err
            if worst > report.interval_error_bound:
                report.violations.append(
                    Violation(
                        "interval_error",
                        k,
                        f"|x - y| = {worst} at t={worst_t} > {report.interval_error_bound}",
                    )
                )

    report.checked.append("switch_gap")
    post = [k for k in switches if k >= eta]
    for i, s in enumerate(post):
        nxt = post[i + 1] if i + 1 < len(post) else None
        if nxt is not None:
            if nxt - s > 3:
                report.violations.append(
                    Violation("switch_gap", s, f"next switch only at {nxt} (> {s} + 3)")
                )
        elif s + 3 <= n - 1:
            report.violations.append(
                Violation("switch_gap", s, f"no further switch in ({s}, {s + 3}]")
            )

    report.checked.append("symbol_run")
    run = 1
    for k in range(eta + 2, n):
        run = run + 1 if records[k].h == records[k - 1].h else 1
        if run == 4:
            report.violations.append(
                Violation("symbol_run", k, "four equal symbols in a row")
            )
