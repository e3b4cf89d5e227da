"""Receive-side composite pulse for a truncated square-root Nyquist shaper.

The transmit subpulse is a unit-energy root raised cosine truncated to
2Q sample periods; after matched filtering the effective pulse is the
raised cosine, modelled here analytically and truncated to |tau| < 2Q.
Being Nyquist, it vanishes at nonzero integer sample offsets, which is
what confines channel leakage to a small tap window around each path.
"""

from dataclasses import dataclass

import numpy as np

# half-width of the guard band around the removable singularity of the
# raised-cosine closed form
_SINGULARITY_EPS = 1e-8


@dataclass(frozen=True)
class PulseSpec:
    rolloff: float = 0.25
    half_span: int = 4  # Q, in sample periods; support is |tau| < 2Q

    def __post_init__(self):
        if not 0.0 <= self.rolloff <= 1.0:
            raise ValueError("rolloff must lie in [0, 1]")
        if self.half_span < 1:
            raise ValueError("half_span must be a positive integer")


def g_eval(spec: PulseSpec, tau):
    """Pulse value at offset tau, in units of the sample period.

    Vectorized over tau.  Even symmetry is exact because only |tau|
    enters; outside the truncation window the value is exactly zero.
    """
    t = np.abs(np.asarray(tau, dtype=np.float64))
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    beta = spec.rolloff
    out = np.zeros_like(t)
    inside = t < 2.0 * spec.half_span
    ti = t[inside]
    if beta == 0.0:
        out[inside] = np.sinc(ti)
    else:
        denom = 1.0 - (2.0 * beta * ti) ** 2
        near = np.abs(ti - 1.0 / (2.0 * beta)) < _SINGULARITY_EPS
        safe = ~near
        vals = np.empty_like(ti)
        vals[safe] = (np.sinc(ti[safe]) * np.cos(np.pi * beta * ti[safe])
                      / denom[safe])
        # removable singularity at tau = 1/(2 beta): analytic limit
        vals[near] = np.sinc(1.0 / (2.0 * beta)) * np.pi / 4.0
        out[inside] = vals
    return out[0] if scalar else out


def tap_window(spec: PulseSpec, delay):
    """Integer tap range [d_min, d_max] reached by a path at this delay.

    Covers every integer d with |d - delay| < 2Q, clipped at d = 0
    because the first received sample of a block cannot precede the
    path itself.
    """
    lo = int(np.floor(delay - 2 * spec.half_span)) + 1
    hi = int(np.ceil(delay + 2 * spec.half_span)) - 1
    return max(lo, 0), hi
