"""Doubly dispersive channel: path generation, discrete taps, block form.

A channel realization is a set of P paths (complex gain, fractional
delay in sample periods, fractional Doppler in grid bins).  Through the
composite pulse each path smears onto a window of integer taps; with a
guard of D zero rows per block, every received block depends on its own
transmit block only, through a lower-banded M x M matrix of bandwidth
D + 1 whose entries vary from row to row and block to block.
"""

from dataclasses import dataclass, replace

import numpy as np

from .pulse import PulseSpec, g_eval, tap_window

SPEED_OF_LIGHT = 299792458.0


class ConfigError(ValueError):
    """Raised when a configuration cannot produce a valid simulation."""


@dataclass
class PathSet:
    """Discrete multipath realization.

    delays are in units of the sample period, dopplers in units of one
    Doppler bin (1 / frame duration); both may be fractional.
    """

    gains: np.ndarray
    delays: np.ndarray
    dopplers: np.ndarray

    @property
    def n_paths(self):
        return len(self.gains)


@dataclass
class TapTensor:
    """Discrete taps h[n, m, d] for block n, sample m, delay tap d.

    This is also the band storage of the per-block channel matrices:
    H_n[i, j] = taps[n, i, i - j] for 0 <= i - j <= zp_len, zero
    elsewhere.
    """

    taps: np.ndarray  # (N, M, D+1) complex
    zp_len: int

    @property
    def n_blocks(self):
        return self.taps.shape[0]

    @property
    def m_total(self):
        return self.taps.shape[1]

    def dense_block(self, n):
        """Materialize H_n as a dense matrix (test and oracle use only)."""
        m_total = self.m_total
        h = np.zeros((m_total, m_total), dtype=np.complex128)
        for i in range(m_total):
            for d in range(min(i, self.zp_len) + 1):
                h[i, i - d] = self.taps[n, i, d]
        return h


def max_doppler_hz(carrier_hz, speed_kmh):
    return carrier_hz * (speed_kmh / 3.6) / SPEED_OF_LIGHT


def gen_paths(profile, delay_spread_s, nu_max_hz, sample_period_s,
              frame_len, rng) -> PathSet:
    """Draw one multipath realization from a tapped-delay-line profile.

    profile is a sequence of (normalized delay, power dB) rows.  Gains
    are per-path Rayleigh with the profile's relative powers, scaled so
    the mean total power is one.  Doppler shifts follow the classical
    cosine-of-arrival model: nu = nu_max * cos(theta), theta uniform.

    frame_len is M*N in samples; it converts absolute Doppler to
    fractional bins.
    """
    prof = np.asarray(profile, dtype=np.float64)
    if prof.ndim != 2 or prof.shape[1] != 2:
        raise ConfigError("profile must be rows of (delay, power_db)")
    rel = 10.0 ** (prof[:, 1] / 10.0)
    rel = rel / rel.sum()
    n_paths = len(prof)
    gains = np.sqrt(rel / 2.0) * (rng.standard_normal(n_paths)
                                  + 1j * rng.standard_normal(n_paths))
    delays = prof[:, 0] * delay_spread_s / sample_period_s
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n_paths)
    nu = nu_max_hz * np.cos(theta)
    dopplers = nu * frame_len * sample_period_s
    return PathSet(gains=gains, delays=delays, dopplers=dopplers)


def check_zp_coverage(paths: PathSet, spec: PulseSpec, zp_len):
    """Raise ConfigError if any path leaks past the zero guard."""
    for p in range(paths.n_paths):
        need = int(np.ceil(paths.delays[p])) + 2 * spec.half_span - 1
        if need > zp_len:
            raise ConfigError(
                f"path {p} at delay {paths.delays[p]:.3f} needs {need} taps "
                f"but the guard is {zp_len}")


def build_taps(paths: PathSet, spec: PulseSpec, m_total, n_blocks,
               zp_len) -> TapTensor:
    """Evaluate the discrete taps of a path set on the whole frame.

    For each path: pulse value at the integer offsets it reaches, a
    per-sample phase ramp from its Doppler, and a per-block phase ramp;
    entries outside the pulse support stay exactly zero.
    """
    check_zp_coverage(paths, spec, zp_len)
    taps = np.zeros((n_blocks, m_total, zp_len + 1), dtype=np.complex128)
    frame_len = m_total * n_blocks
    m_idx = np.arange(m_total)
    n_idx = np.arange(n_blocks)
    d_idx = np.arange(zp_len + 1)
    for p in range(paths.n_paths):
        l_p = paths.delays[p]
        k_p = paths.dopplers[p]
        d_lo, d_hi = tap_window(spec, l_p)
        d_hi = min(d_hi, zp_len)
        if d_lo > d_hi:
            continue
        g = g_eval(spec, d_idx[d_lo:d_hi + 1] - l_p)
        ph_m = np.exp(1j * 2.0 * np.pi / frame_len * k_p * (m_idx - l_p))
        ph_n = np.exp(1j * 2.0 * np.pi * k_p * n_idx / n_blocks)
        taps[:, :, d_lo:d_hi + 1] += (paths.gains[p]
                                      * ph_n[:, None, None]
                                      * ph_m[None, :, None]
                                      * g[None, None, :])
    return TapTensor(taps=taps, zp_len=zp_len)


def apply_channel(taps: TapTensor, s, sigma2, rng=None):
    """Push a serial frame through the banded block channel, plus noise.

    s is the length M*N transmit vector; returns the received vector.
    With sigma2 = 0 no noise is drawn (and rng may be None).
    """
    n_blocks, m_total = taps.n_blocks, taps.m_total
    sb = s.reshape(n_blocks, m_total)
    r = np.zeros_like(sb)
    for d in range(taps.zp_len + 1):
        r[:, d:] += taps.taps[:, d:, d] * sb[:, :m_total - d]
    if sigma2 > 0.0:
        noise = rng.standard_normal(r.shape) + 1j * rng.standard_normal(r.shape)
        r = r + np.sqrt(sigma2 / 2.0) * noise
    return r.reshape(-1)


def perturb_csi(paths: PathSet, nmse_db, rng) -> PathSet:
    """Copy of a path set with gain errors at an exact normalized MSE.

    The error vector is drawn Gaussian and rescaled per realization so
    that sum|e|^2 / sum|gain|^2 equals the target exactly.  nmse_db of
    None means perfect knowledge (plain copy).
    """
    if nmse_db is None:
        return replace(paths, gains=paths.gains.copy())
    target = 10.0 ** (nmse_db / 10.0)
    n_paths = paths.n_paths
    e = rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths)
    power = np.sum(np.abs(paths.gains) ** 2)
    e *= np.sqrt(target * power / np.sum(np.abs(e) ** 2))
    return replace(paths, gains=paths.gains + e)
