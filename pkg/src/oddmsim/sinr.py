"""Post-cancellation SINR bookkeeping for the greedy initializer.

For symbol (n, m) the usable signal power is the squared norm of its
center column; interference comes from the other transmit indices whose
windows overlap, except those already initialized (their contribution
is assumed cancelled) and the guard indices (known zeros).  The noise
floor is (D+1) * sigma2, one term per sample of the window.

Evaluations run off a cached table of squared column norms, built once
per channel realization, so a single evaluation costs O(D) and flipping
one index touches only the 2D surrounding rows.
"""

from dataclasses import dataclass, field

import numpy as np

from .channel import TapTensor


@dataclass
class SinrState:
    """Cached SINR view of one channel realization.

    pi[n, m] is the per-block SINR of data row m, phi[m] the worst case
    across blocks (the scheduler's figure of merit).  eps[m] = 1 marks
    rows whose interference is treated as cancelled.
    """

    zp_len: int
    m_data: int
    n_blocks: int
    p_t: float
    sigma2: float
    eps: np.ndarray
    col_norms: np.ndarray  # (N, M', 2D+1), offset t stored at t + D
    pi: np.ndarray         # (N, M')
    phi: np.ndarray        # (M',)
    flops: int = 0

    def refresh_phi(self, rows=None):
        if rows is None:
            self.phi = self.pi.min(axis=0)
        else:
            self.phi[rows] = self.pi[:, rows].min(axis=0)


def _column_norm_table(taps: TapTensor, m_data):
    """norms[n, m, t+D] = squared norm of window-m column m+t.

    Entries with m + t outside [0, M-1] are never read; they hold
    whatever the shifted sums produce and must stay masked by callers.
    """
    d = taps.zp_len
    a2 = np.abs(taps.taps) ** 2          # (N, M, D+1)
    n_blocks = taps.n_blocks
    norms = np.zeros((n_blocks, m_data, 2 * d + 1))
    flops = n_blocks * taps.m_total * (d + 1)  # the squared magnitudes
    for t in range(-d, d + 1):
        a_lo, a_hi = max(0, t), min(d, t + d)
        for a in range(a_lo, a_hi + 1):
            # rows m + a, lag a - t, for every data row m
            norms[:, :, t + d] += a2[:, a:a + m_data, a - t]
        flops += n_blocks * m_data * (a_hi - a_lo + 1)
    return norms, flops


def _pi_rows(state: SinrState, rows):
    """Evaluate pi for the given data rows under the current eps.

    One shared routine for the full build and the incremental refresh,
    so both follow the identical accumulation order.
    """
    rows = np.asarray(rows)
    d = state.zp_len
    acc = np.zeros((state.n_blocks, len(rows)))
    flops = 0
    for t in range(-d, d + 1):
        if t == 0:
            continue
        q = rows + t
        ok = (q >= 0) & (q < state.m_data)
        if not np.any(ok):
            continue
        weight = 1.0 - state.eps[q[ok]]
        acc[:, ok] += weight * state.col_norms[:, rows[ok], t + d]
        flops += state.n_blocks * int(np.count_nonzero(ok))
    den = state.p_t * acc + (d + 1) * state.sigma2
    num = state.p_t * state.col_norms[:, rows, d]
    flops += state.n_blocks * len(rows) * 2
    pi = np.where(den > 0.0, num / np.where(den == 0.0, 1.0, den), np.inf)
    return pi, flops


def sinr_init_all(taps: TapTensor, p_t, sigma2, eps=None) -> SinrState:
    """Build the cached state and evaluate every data row."""
    m_data = taps.m_total - taps.zp_len
    norms, flops = _column_norm_table(taps, m_data)
    if eps is None:
        eps = np.zeros(m_data)
    else:
        eps = np.asarray(eps, dtype=np.float64).copy()
    state = SinrState(zp_len=taps.zp_len, m_data=m_data,
                      n_blocks=taps.n_blocks, p_t=p_t, sigma2=sigma2,
                      eps=eps, col_norms=norms,
                      pi=np.zeros((taps.n_blocks, m_data)),
                      phi=np.zeros(m_data), flops=flops)
    state.pi, f = _pi_rows(state, np.arange(m_data))
    state.flops += f
    state.refresh_phi()
    return state


def sinr_eval(state: SinrState, n, m):
    """Single-symbol SINR under the current cancellation pattern."""
    pi, _ = _pi_rows(state, np.array([m]))
    return float(pi[n, 0]) if np.isfinite(pi[n, 0]) else np.inf


def sinr_update_after(state: SinrState, m_star):
    """Mark row m_star as cancelled and refresh its neighborhood.

    Only rows within delay distance D of m_star (clipped to the data
    range, m_star excluded) see their pi change; everything else is
    left untouched.
    """
    state.eps[m_star] = 1.0
    d = state.zp_len
    lo = max(m_star - d, 0)
    hi = min(m_star + d, state.m_data - 1)
    rows = np.array([m for m in range(lo, hi + 1) if m != m_star])
    if len(rows) == 0:
        return
    pi, f = _pi_rows(state, rows)
    state.pi[:, rows] = pi
    state.flops += f
    state.refresh_phi(rows)
