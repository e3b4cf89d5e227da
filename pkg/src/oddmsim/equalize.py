"""Per-symbol windows, interference cancellation and the iterative detector.

Detection walks the data rows m = 0 .. M'-1 in order.  For each row it
gathers, across all N blocks at once, the D+1 received samples that
carry symbol (n, m), subtracts the current belief about every other
symbol overlapping that window, collapses the cleaned window with a
matched or regularized filter, hard-decides the row in the transform
domain, and feeds the refreshed time-domain estimate to later rows of
the same sweep.  Sweeps repeat until the hard decisions stop changing.
"""

from dataclasses import dataclass, field

import numpy as np

from .channel import TapTensor
from .frame import from_dd, hard_decide, to_dd

# below this squared norm a window is treated as carrying no signal
DEGENERATE_NORM = 1e-30


def window_extent(m, zp_len):
    """(m', D') for row m: first column of the window and center offset."""
    return max(m - zp_len, 0), min(m, zp_len)


def center_column(taps: TapTensor, m):
    """h for row m across all blocks, shape (N, D+1).

    Row a holds the tap through which sample m+a hears symbol m.
    """
    d = taps.zp_len
    a = np.arange(d + 1)
    return taps.taps[:, m + a, a]


def center_columns_all(taps: TapTensor, m_data):
    """Stacked center columns for every data row, shape (M', N, D+1)."""
    d = taps.zp_len
    a = np.arange(d + 1)
    m = np.arange(m_data)
    return taps.taps[:, m[:, None] + a[None, :], a[None, :]].transpose(1, 0, 2)


@dataclass
class SymbolWindow:
    """Receive window of one symbol: sub-channel, center column, samples."""

    n: int
    m: int
    m_first: int      # first transmit index covered by the window
    center: int       # offset of column m inside the window (= D')
    sub: np.ndarray   # (D+1, D'+D+1)
    h: np.ndarray     # (D+1,) center column
    r_win: np.ndarray  # (D+1,) received samples m .. m+D of block n


def build_window(taps: TapTensor, r_blocks, n, m) -> SymbolWindow:
    """Materialize the window of symbol (n, m) from band storage."""
    d = taps.zp_len
    m_first, ctr = window_extent(m, d)
    width = ctr + d + 1
    sub = np.zeros((d + 1, width), dtype=np.complex128)
    for a in range(d + 1):
        for b in range(width):
            lag = (m + a) - (m_first + b)
            if 0 <= lag <= d:
                sub[a, b] = taps.taps[n, m + a, lag]
    return SymbolWindow(n=n, m=m, m_first=m_first, center=ctr, sub=sub,
                        h=sub[:, ctr].copy(),
                        r_win=r_blocks[n, m:m + d + 1].copy())


def cancel(window: SymbolWindow, estimates):
    """Subtract every overlapping symbol except the window's own.

    estimates is the current time-domain belief for transmit indices
    m_first .. m_first + width - 1 of this block; entries left of the
    center are expected to come from the sweep in progress, entries
    right of it from the previous sweep.
    """
    est = np.asarray(estimates, dtype=np.complex128).copy()
    est[window.center] = 0.0
    return window.r_win - window.sub @ est


def filter_mrc(h, r_tilde):
    """Matched-filter estimate: maximize SNR assuming clean residual."""
    num = np.sum(np.conj(h) * r_tilde, axis=-1)
    den = np.sum(np.abs(h) ** 2, axis=-1)
    return np.where(den > DEGENERATE_NORM, num / np.where(den == 0, 1, den), 0.0)


def filter_lmmse(h, r_tilde, sigma2, p_t=1.0):
    """Regularized estimate: matched filter shrunk by the noise floor."""
    num = np.sum(np.conj(h) * r_tilde, axis=-1)
    den = p_t * np.sum(np.abs(h) ** 2, axis=-1) + sigma2
    return np.where(den > DEGENERATE_NORM, num / np.where(den == 0, 1, den), 0.0)


@dataclass
class DetectorRun:
    """Outcome of one detection run."""

    x_hat: np.ndarray          # (M', N) decided transform-domain symbols
    bits: np.ndarray           # (M', N, k) decided bits
    iters_run: int
    converged: bool
    per_iter_bit_errors: list  # one entry per sweep slot, test mode only
    degenerate_windows: int
    flops: int
    est_blocks: np.ndarray = field(default=None, repr=False)  # (N, M) final s-bar


def detect_frame(r, taps: TapTensor, alphabet, sigma2, p_t=1.0,
                 filter_kind="lmmse", max_iters=10, init_est=None,
                 init_decisions=None, truth_bits=None) -> DetectorRun:
    """Iterative per-symbol interference cancellation over a whole frame.

    r is the serial received vector; init_est an (N, M) time-domain
    starting belief (zeros when absent) with init_decisions its
    transform-domain hard decisions, used for the convergence check of
    the first sweep.  truth_bits (M', N, k) switches on per-sweep error
    tracking; after early convergence the remaining tracked slots repeat
    the fixed point, which later sweeps would reproduce exactly.
    """
    if filter_kind not in ("mrc", "lmmse"):
        raise ValueError(f"unknown filter kind {filter_kind!r}")
    n_blocks, m_total = taps.n_blocks, taps.m_total
    d = taps.zp_len
    m_data = m_total - d
    k = alphabet.bits_per_symbol
    r_blocks = np.asarray(r).reshape(n_blocks, m_total)

    s_bar = np.zeros((n_blocks, m_total), dtype=np.complex128)
    flops = 0
    if init_est is not None:
        s_bar[:, :] = init_est
        # residual of the starting belief: banded matvec, counted per row
        flops += int(n_blocks * sum(min(m, d) + 1 for m in range(m_total)))
    resid = r_blocks - _band_matvec(taps, s_bar)

    hc = center_columns_all(taps, m_data)          # (M', N, D+1)
    hc_conj = np.conj(hc)
    norm2 = np.sum(np.abs(hc) ** 2, axis=2)        # (M', N)
    if filter_kind == "mrc":
        den = norm2.copy()
    else:
        den = p_t * norm2 + sigma2
    dead = norm2 <= DEGENERATE_NORM
    degenerate = int(np.count_nonzero(dead))
    safe_den = np.where(den == 0, 1.0, den)

    prev_idx = None
    if init_decisions is not None:
        prev_idx = _decision_indices(init_decisions, alphabet)

    x_hat = np.zeros((m_data, n_blocks), dtype=np.complex128)
    bits = np.zeros((m_data, n_blocks, k), dtype=np.int8)
    idx = np.zeros((m_data, n_blocks), dtype=np.int64)
    sqrt_n = np.sqrt(n_blocks)
    track = truth_bits is not None
    errors = []
    converged = False
    iters_run = 0
    per_symbol = 3 * (d + 1) + 1

    for _ in range(max_iters):
        iters_run += 1
        for m in range(m_data):
            h_m = hc[m]
            r_tilde = resid[:, m:m + d + 1] + h_m * s_bar[:, m][:, None]
            est = np.sum(hc_conj[m] * r_tilde, axis=1) / safe_den[m]
            if degenerate:
                est = np.where(dead[m], 0.0, est)
            flops += n_blocks * per_symbol
            dd = np.fft.fft(est) / sqrt_n
            d2 = np.abs(dd[:, None] - alphabet.points[None, :]) ** 2
            choice = np.argmin(d2, axis=1)
            idx[m] = choice
            x_hat[m] = alphabet.points[choice]
            bits[m] = alphabet.bits[choice]
            s_new = np.fft.ifft(x_hat[m]) * sqrt_n
            delta = s_new - s_bar[:, m]
            resid[:, m:m + d + 1] -= h_m * delta[:, None]
            s_bar[:, m] = s_new
        if track:
            errors.append(int(np.count_nonzero(bits != truth_bits)))
        if prev_idx is not None and np.array_equal(idx, prev_idx):
            converged = True
            break
        prev_idx = idx.copy()

    if track and errors:
        errors.extend([errors[-1]] * (max_iters - len(errors)))

    return DetectorRun(x_hat=x_hat, bits=bits, iters_run=iters_run,
                       converged=converged,
                       per_iter_bit_errors=errors if track else None,
                       degenerate_windows=degenerate, flops=flops,
                       est_blocks=s_bar)


def _band_matvec(taps: TapTensor, s_blocks):
    out = np.zeros_like(s_blocks)
    m_total = taps.m_total
    for lag in range(taps.zp_len + 1):
        out[:, lag:] += taps.taps[:, lag:, lag] * s_blocks[:, :m_total - lag]
    return out


def _decision_indices(x_hat, alphabet):
    d2 = np.abs(x_hat[..., None] - alphabet.points) ** 2
    return np.argmin(d2, axis=-1)
