"""Independent reference computations for checking the fast paths.

Everything here favors directness over speed: dense matrices, explicit
transform sums, Monte Carlo measurement, exhaustive search.  The
production modules never call into this file; it exists so the self
test and the test suite can compare two genuinely different routes to
the same quantity.
"""

import numpy as np

from .channel import TapTensor
from .equalize import build_window, window_extent
from .pulse import g_eval


def tap_scalar(paths, spec, n, m, d, m_total, n_blocks):
    """Single tap straight from the path-sum definition."""
    frame_len = m_total * n_blocks
    acc = 0.0 + 0.0j
    for p in range(paths.n_paths):
        l_p = paths.delays[p]
        k_p = paths.dopplers[p]
        acc += (paths.gains[p]
                * g_eval(spec, d - l_p)
                * np.exp(1j * 2.0 * np.pi / frame_len * k_p * (m - l_p))
                * np.exp(1j * 2.0 * np.pi * n * k_p / n_blocks))
    return acc


def dft_matrix(n):
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


def to_dd_direct(est_blocks):
    """Transform across blocks by explicit matrix product."""
    return dft_matrix(est_blocks.shape[0]) @ est_blocks


def from_dd_direct(dd):
    return dft_matrix(dd.shape[0]).conj().T @ dd


def apply_channel_dense(taps: TapTensor, s):
    """Noiseless channel via dense per-block matrices."""
    n_blocks, m_total = taps.n_blocks, taps.m_total
    sb = s.reshape(n_blocks, m_total)
    out = np.zeros_like(sb)
    for n in range(n_blocks):
        out[n] = taps.dense_block(n) @ sb[n]
    return out.reshape(-1)


def cancel_dense(taps: TapTensor, r_blocks, s_bar, n, m):
    """Interference-cancelled window via a full-matrix recomputation."""
    d = taps.zp_len
    h_n = taps.dense_block(n)
    est = s_bar[n].copy()
    est[m] = 0.0
    return r_blocks[n, m:m + d + 1] - (h_n @ est)[m:m + d + 1]


def fmi_dense(r, taps: TapTensor, sigma2, p_t=1.0):
    """Per-block regularized normal equations with dense algebra."""
    n_blocks, m_total = taps.n_blocks, taps.m_total
    m_data = m_total - taps.zp_len
    r_blocks = np.asarray(r).reshape(n_blocks, m_total)
    out = np.zeros((n_blocks, m_data), dtype=np.complex128)
    for n in range(n_blocks):
        h_tilde = taps.dense_block(n)[:, :m_data]
        a = h_tilde.conj().T @ h_tilde + (sigma2 / p_t) * np.eye(m_data)
        out[n] = np.linalg.solve(a, h_tilde.conj().T @ r_blocks[n])
    return out


def sinr_closed_window(taps: TapTensor, n, m, eps, sigma2, p_t=1.0):
    """Closed-form SINR computed from an explicitly built window.

    Independent of the cached-norm machinery: materializes the window,
    takes column norms directly, masks guard and cancelled columns.
    """
    d = taps.zp_len
    m_data = taps.m_total - d
    win = build_window(taps, np.zeros((taps.n_blocks, taps.m_total),
                                      dtype=np.complex128), n, m)
    num = p_t * np.sum(np.abs(win.h) ** 2)
    den = (d + 1) * sigma2
    for b in range(win.sub.shape[1]):
        q = win.m_first + b
        if b == win.center or q >= m_data:
            continue
        den += p_t * (1.0 - eps[q]) * np.sum(np.abs(win.sub[:, b]) ** 2)
    return num / den if den > 0 else np.inf


def measure_sinr(taps: TapTensor, eps, sigma2, alphabet, draws, rng,
                 chunk=20000):
    """Monte Carlo SINR per symbol: random frames through the channel.

    Draws whole data frames, modulates them, splits each receive window
    into its usable part (the symbol's own column) and everything the
    scheduler treats as residual (uninitialized neighbors plus noise),
    and returns the ratio of measured average powers, shape (N, M').
    """
    n_blocks, m_total = taps.n_blocks, taps.m_total
    d = taps.zp_len
    m_data = m_total - d
    mask = np.ones(m_total)
    mask[:m_data] = 1.0 - np.asarray(eps, dtype=np.float64)
    mask[m_data:] = 0.0
    hc = np.zeros((m_data, n_blocks, d + 1), dtype=np.complex128)
    a = np.arange(d + 1)
    for m in range(m_data):
        hc[m] = taps.taps[:, m + a, a]
    sig = np.zeros((n_blocks, m_data))
    res = np.zeros((n_blocks, m_data))
    done = 0
    while done < draws:
        b = min(chunk, draws - done)
        idx = rng.integers(0, alphabet.order, size=(b, m_data, n_blocks))
        grid = np.zeros((b, m_total, n_blocks), dtype=np.complex128)
        grid[:, :m_data, :] = alphabet.points[idx]
        xdot = np.fft.ifft(grid, axis=2) * np.sqrt(n_blocks)
        s = xdot.transpose(0, 2, 1)            # (b, N, M)
        noise = (rng.standard_normal((b, n_blocks, m_total))
                 + 1j * rng.standard_normal((b, n_blocks, m_total)))
        z = np.sqrt(sigma2 / 2.0) * noise if sigma2 > 0 else 0.0 * noise
        sm = s * mask[None, None, :]
        conv = np.zeros_like(sm)
        for lag in range(d + 1):
            conv[:, :, lag:] += taps.taps[None, :, lag:, lag] * sm[:, :, :m_total - lag]
        zhat = conv + z
        for m in range(m_data):
            win = zhat[:, :, m:m + d + 1]
            if mask[m] != 0.0:
                win = win - hc[m][None, :, :] * s[:, :, m, None]
            res[:, m] += np.sum(np.abs(win) ** 2, axis=(0, 2))
            sig[:, m] += (np.sum(np.abs(hc[m]) ** 2, axis=1)
                          * np.sum(np.abs(s[:, :, m]) ** 2, axis=0))
        done += b
    return sig / res


def measure_cross_terms(taps: TapTensor, n, m, eps, draws, rng, alphabet):
    """Ratio of off-diagonal to diagonal energy in the residual expansion.

    Expands E || sum_j H[:,j] (1-eps) s_j ||^2 with the empirical symbol
    correlation in place of the uncorrelatedness assumption, and reports
    |cross terms| / diagonal terms.
    """
    n_blocks, m_total = taps.n_blocks, taps.m_total
    d = taps.zp_len
    m_data = m_total - d
    win = build_window(taps, np.zeros((n_blocks, m_total),
                                      dtype=np.complex128), n, m)
    width = win.sub.shape[1]
    qs = win.m_first + np.arange(width)
    w = np.ones(width)
    for b in range(width):
        if b == win.center or qs[b] >= m_data:
            w[b] = 0.0
        else:
            w[b] = 1.0 - eps[qs[b]]
    corr = np.zeros((width, width), dtype=np.complex128)
    done = 0
    while done < draws:
        b = min(50000, draws - done)
        idx = rng.integers(0, alphabet.order, size=(b, m_data, n_blocks))
        grid = np.zeros((b, m_total, n_blocks), dtype=np.complex128)
        grid[:, :m_data, :] = alphabet.points[idx]
        xdot = np.fft.ifft(grid, axis=2) * np.sqrt(n_blocks)
        sw = xdot[:, qs, n]                    # (b, width) window symbols
        corr += sw.T @ sw.conj()
        done += b
    corr /= draws
    gram = win.sub.conj().T @ win.sub
    weighted = np.outer(w, w) * gram * corr.T
    diag = np.real(np.trace(weighted))
    cross = np.abs(weighted.sum() - np.trace(weighted))
    return cross / diag if diag > 0 else 0.0


def ml_exhaustive(r, taps: TapTensor, alphabet):
    """Noise-optimal frame decision by enumerating every candidate grid."""
    n_blocks, m_total = taps.n_blocks, taps.m_total
    m_data = m_total - taps.zp_len
    n_sym = m_data * n_blocks
    n_cand = alphabet.order ** n_sym
    if n_cand > 1 << 20:
        raise ValueError("candidate space too large for exhaustive search")
    digits = np.arange(n_cand)
    idx = np.zeros((n_cand, n_sym), dtype=np.int64)
    for pos in range(n_sym):
        idx[:, pos] = digits % alphabet.order
        digits = digits // alphabet.order
    grids = np.zeros((n_cand, m_total, n_blocks), dtype=np.complex128)
    grids[:, :m_data, :] = alphabet.points[idx].reshape(n_cand, m_data,
                                                        n_blocks)
    xdot = np.fft.ifft(grids, axis=2) * np.sqrt(n_blocks)
    s = xdot.transpose(0, 2, 1)
    r_hat = np.zeros_like(s)
    for lag in range(taps.zp_len + 1):
        r_hat[:, :, lag:] += taps.taps[None, :, lag:, lag] * s[:, :, :m_total - lag]
    r_blocks = np.asarray(r).reshape(n_blocks, m_total)
    dist = np.sum(np.abs(r_hat - r_blocks[None]) ** 2, axis=(1, 2))
    best = int(np.argmin(dist))
    return grids[best, :m_data, :]


def reference_detect(r, taps: TapTensor, alphabet, sigma2, p_t=1.0,
                     filter_kind="lmmse", max_iters=10, init_est=None,
                     init_decisions=None):
    """Slow per-window rebuild of the iterative detector.

    Materializes every window and recomputes the cancellation from the
    current belief at every step; used to validate the residual-based
    production path.
    """
    from .equalize import cancel, filter_lmmse, filter_mrc

    n_blocks, m_total = taps.n_blocks, taps.m_total
    d = taps.zp_len
    m_data = m_total - d
    r_blocks = np.asarray(r).reshape(n_blocks, m_total)
    s_bar = np.zeros((n_blocks, m_total), dtype=np.complex128)
    if init_est is not None:
        s_bar[:, :] = init_est
    prev = None
    if init_decisions is not None:
        prev = init_decisions.copy()
    x_hat = np.zeros((m_data, n_blocks), dtype=np.complex128)
    sqrt_n = np.sqrt(n_blocks)
    for _ in range(max_iters):
        for m in range(m_data):
            est = np.zeros(n_blocks, dtype=np.complex128)
            for n in range(n_blocks):
                win = build_window(taps, r_blocks, n, m)
                lo = win.m_first
                rt = cancel(win, s_bar[n, lo:lo + win.sub.shape[1]])
                if filter_kind == "mrc":
                    est[n] = filter_mrc(win.h, rt)
                else:
                    est[n] = filter_lmmse(win.h, rt, sigma2, p_t)
            dd = np.fft.fft(est) / sqrt_n
            d2 = np.abs(dd[:, None] - alphabet.points[None, :]) ** 2
            x_hat[m] = alphabet.points[np.argmin(d2, axis=1)]
            s_bar[:, m] = np.fft.ifft(x_hat[m]) * sqrt_n
        if prev is not None and np.allclose(x_hat, prev, rtol=0, atol=0):
            break
        prev = x_hat.copy()
    return x_hat, s_bar
