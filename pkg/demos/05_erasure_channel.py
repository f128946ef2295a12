"""Measure what symbol erasures cost the decoder (an empirical experiment).

On a binary erasure channel the receiver knows which positions were dropped.
The decoder substitutes the previous symbol at each erased position and keeps
the recursion running. A substitution that happens to match the true symbol
is invisible. A wrong one knocks the decoder's state off the encoder's, and
because the link is one-way the remaining (correct) symbols steer the wrong
state from the wrong place: nothing forces the two recursions back together,
and the error can keep growing. The hold policy is a documented baseline, not
a recovery guarantee; the numbers below are simulation measurements.
"""

from admtrack import (
    CodecParams,
    Constant,
    Erasure,
    Piecewise,
    Ramp,
    decode_bitstream,
    decode_with_erasures,
    encode_signal,
    sample,
    transmit,
)

signal = Piecewise(segments=((0.0, Constant(2.0)), (1.0, Ramp(slope=0.03, intercept=-1.0))))
params = CodecParams(y0=5.0, m0=0.08, mbar=0.08, a=1.5, delta=0.04)
samples = sample(signal, params.delta, 4.0)
bits, encoder_trace = encode_signal(params, samples)
clean = decode_bitstream(params, bits)

print(f"{len(bits)} bits; decoder error statistics vs the true signal:")
print(f"{'p':>5} {'erased':>7} {'wrong subs':>10} {'max |y-x|':>10} {'final |y-x|':>11}")
for p in (0.0, 0.05, 0.1, 0.2):
    received = transmit(bits, Erasure(p=p, seed=7))
    decoded = decode_with_erasures(params, received)
    wrong = sum(
        1 for k in received.erased_positions() if decoded.records[k].h != bits[k]
    )
    errors = [abs(x - r.y) for x, r in zip(samples.values, decoded.records)]
    print(
        f"{p:>5.2f} {len(received.erased_positions()):>7} {wrong:>10}"
        f" {max(errors):>10.3f} {errors[-1]:>11.3f}"
    )

received = transmit(bits, Erasure(p=0.1, seed=7))
decoded = decode_with_erasures(params, received)
divergence = [abs(a.y - b.y) for a, b in zip(clean.records, decoded.records)]
first_bad = next((k for k, d in enumerate(divergence) if d > 0), None)
print(f"\nvs the erasure-free decoder (p=0.1): first divergence at step {first_bad},")
print(f"worst divergence {max(divergence):.3f}, divergence at the end {divergence[-1]:.3f}")
