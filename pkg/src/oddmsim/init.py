"""Detector initialization: all-zero, full-block LMMSE, and SINR-greedy.

All three produce the same contract: a starting time-domain belief for
the iterative detector plus optional transform-domain decisions.  The
full-block variant solves one regularized normal system per time block
using the band structure; the greedy variant initializes one data row
at a time, best worst-case SINR first, cancelling as it goes.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .channel import TapTensor
from .equalize import center_columns_all, filter_lmmse
from .frame import from_dd, hard_decide, to_dd
from .sinr import sinr_init_all, sinr_update_after

# diagonal loading applied when a noiseless normal system is singular
FALLBACK_RIDGE = 1e-12


@dataclass
class InitResult:
    est_blocks: np.ndarray         # (N, M) starting belief, or None
    decisions: np.ndarray          # (M', N) transform-domain, or None
    order: list = None             # greedy selection order
    flops: int = 0
    dense_equiv_flops: int = 0     # cost a dense solver would have paid
    fallback_regularized: bool = False


def init_azi(taps: TapTensor) -> InitResult:
    """All-zero initialization: no estimates, no decisions, no work."""
    return InitResult(est_blocks=None, decisions=None, flops=0)


def _gram_band(t_n, m_data, zp_len):
    """Lower band of H~^H H~ for one block, shape (D+1, M')."""
    ab = np.zeros((zp_len + 1, m_data), dtype=np.complex128)
    for k in range(zp_len + 1):
        for a in range(k, zp_len + 1):
            # rows p+a contribute conj(H[p+a, p+k]) * H[p+a, p]
            ab[k, :] += np.conj(t_n[a:a + m_data, a - k]) * t_n[a:a + m_data, a]
    return ab


def fmi_solve(r, taps: TapTensor, sigma2, p_t=1.0):
    """Per-block solve of (H~^H H~ + (sigma2/P_t) I) s = H~^H r.

    The normal matrix is Hermitian positive definite and banded with
    D sub-diagonals, so each block costs a banded Cholesky solve rather
    than a cubic dense one.  Returns (estimates (N, M'), flop count,
    dense-equivalent flop count, fallback flag).
    """
    n_blocks, m_total = taps.n_blocks, taps.m_total
    d = taps.zp_len
    m_data = m_total - d
    r_blocks = np.asarray(r).reshape(n_blocks, m_total)
    est = np.zeros((n_blocks, m_data), dtype=np.complex128)
    fallback = False
    flops = 0
    for n in range(n_blocks):
        t_n = taps.taps[n]
        ab = _gram_band(t_n, m_data, d)
        ab[0, :] += sigma2 / p_t
        rhs = np.zeros(m_data, dtype=np.complex128)
        for a in range(d + 1):
            rhs += np.conj(t_n[a:a + m_data, a]) * r_blocks[n, a:a + m_data]
        try:
            est[n] = scipy.linalg.solveh_banded(ab, rhs, lower=True)
        except np.linalg.LinAlgError:
            ab[0, :] += FALLBACK_RIDGE
            est[n] = scipy.linalg.solveh_banded(ab, rhs, lower=True)
            fallback = True
        # gram build + rhs + banded factor/solve, in complex MACs
        flops += m_data * (d + 1) * (d + 2) // 2
        flops += m_data * (d + 1)
        flops += m_data * ((d + 1) * (d + 2) // 2 + 3 * (d + 1))
    dense = n_blocks * (m_total * m_data**2 + m_data**3 // 6 + 2 * m_data**2)
    return est, flops, dense, fallback


def init_fmi(r, taps: TapTensor, alphabet, sigma2, p_t=1.0) -> InitResult:
    """Full-block LMMSE initialization: banded solve, then hard decide."""
    n_blocks, m_total = taps.n_blocks, taps.m_total
    m_data = m_total - taps.zp_len
    est, flops, dense, fallback = fmi_solve(r, taps, sigma2, p_t)
    dd = to_dd(est)                       # (N, M')
    x_hat, _ = hard_decide(dd.T, alphabet)
    s0 = np.zeros((n_blocks, m_total), dtype=np.complex128)
    s0[:, :m_data] = from_dd(x_hat.T)
    return InitResult(est_blocks=s0, decisions=x_hat, flops=flops,
                      dense_equiv_flops=dense, fallback_regularized=fallback)


def init_dsgi(r, taps: TapTensor, alphabet, sigma2, p_t=1.0,
              batch_decisions=False) -> InitResult:
    """SINR-greedy initialization.

    Repeatedly pick the uninitialized data row with the best worst-case
    post-cancellation SINR (ties toward the smaller index), estimate it
    across all blocks with the regularized filter after cancelling every
    already-initialized neighbor, hard-decide it in the transform
    domain, and fold the decision back before rescoring the neighbors.

    With batch_decisions the raw estimates are kept during the sweep and
    all rows are decided only at the end.
    """
    n_blocks, m_total = taps.n_blocks, taps.m_total
    d = taps.zp_len
    m_data = m_total - d
    r_blocks = np.asarray(r).reshape(n_blocks, m_total)
    state = sinr_init_all(taps, p_t, sigma2)
    hc = center_columns_all(taps, m_data)   # (M', N, D+1)
    s_bar = np.zeros((n_blocks, m_total), dtype=np.complex128)
    x_hat = np.zeros((m_data, n_blocks), dtype=np.complex128)
    order = []
    flops = 0
    sqrt_n = np.sqrt(n_blocks)
    rows_a = np.arange(d + 1)
    for _ in range(m_data):
        masked = np.where(state.eps == 0.0, state.phi, -np.inf)
        m_star = int(np.argmax(masked))     # first max = smallest index
        order.append(m_star)
        rows = m_star + rows_a
        # window of the already-cancelled belief; s_bar[:, m_star] is
        # still zero so no center add-back is needed
        y = np.zeros((n_blocks, d + 1), dtype=np.complex128)
        for lag in range(d + 1):
            src = rows - lag
            ok = src >= 0
            y[:, ok] += taps.taps[:, rows[ok], lag] * s_bar[:, src[ok]]
            flops += n_blocks * int(np.count_nonzero(ok))
        r_tilde = r_blocks[:, rows] - y
        est = filter_lmmse(hc[m_star], r_tilde, sigma2, p_t)
        flops += n_blocks * (d + 2)
        if batch_decisions:
            s_bar[:, m_star] = est
        else:
            dd = np.fft.fft(est) / sqrt_n
            sym, _ = hard_decide(dd, alphabet)
            x_hat[m_star] = sym
            s_bar[:, m_star] = np.fft.ifft(sym) * sqrt_n
        sinr_update_after(state, m_star)
    if batch_decisions:
        dd = to_dd(s_bar[:, :m_data])
        x_hat, _ = hard_decide(dd.T, alphabet)
        s_bar[:, :m_data] = from_dd(x_hat.T)
    flops += state.flops
    return InitResult(est_blocks=s_bar, decisions=x_hat, order=order,
                      flops=flops)
