"""Delay-Doppler frames, Gray-mapped QAM alphabets and the row-wise transform.

A frame is an M x N grid: M delay rows, N Doppler columns.  The last D
delay rows are a zero guard, so only M' = M - D rows carry data.  Each
row is sent through a unitary N-point inverse DFT and the result is read
out column by column, giving N time blocks of M samples each.
"""

from dataclasses import dataclass

import numpy as np

SUPPORTED_ORDERS = (4, 16, 64)


def _gray_decode(g):
    # inverse of b -> b ^ (b >> 1)
    b = 0
    while g:
        b ^= g
        g >>= 1
    return b


@dataclass(frozen=True)
class Alphabet:
    """Unit-power square QAM constellation with Gray labelling.

    points[v] is the symbol whose bit label is the k-bit binary expansion
    of v (most significant bit first); the first k/2 bits select the real
    axis, the rest the imaginary axis, each axis Gray coded so that
    adjacent amplitude levels differ in one bit.
    """

    order: int
    points: np.ndarray
    bits: np.ndarray  # (order, k) int8 labels

    @property
    def bits_per_symbol(self):
        return self.bits.shape[1]


def make_alphabet(order: int) -> Alphabet:
    if order not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported constellation order {order}")
    k = int(round(np.log2(order)))
    side = 1 << (k // 2)
    levels = np.arange(side) * 2.0 - (side - 1)
    # E|x|^2 = 2 * mean(levels^2) before scaling
    scale = np.sqrt(2.0 * np.mean(levels**2))
    pts = np.empty(order, dtype=np.complex128)
    labels = np.empty((order, k), dtype=np.int8)
    half = k // 2
    for v in range(order):
        gi = v >> half
        gq = v & (side - 1)
        re = levels[_gray_decode(gi)]
        im = levels[_gray_decode(gq)]
        pts[v] = (re + 1j * im) / scale
        labels[v] = [(v >> (k - 1 - b)) & 1 for b in range(k)]
    return Alphabet(order=order, points=pts, bits=labels)


@dataclass
class DDFrame:
    """Data grid in the delay-Doppler domain, zero rows included."""

    grid: np.ndarray  # (M, N) complex
    zp_len: int

    @property
    def m_total(self):
        return self.grid.shape[0]

    @property
    def n_doppler(self):
        return self.grid.shape[1]

    @property
    def m_data(self):
        return self.m_total - self.zp_len

    def validate(self):
        if self.zp_len and np.any(self.grid[self.m_data:, :] != 0):
            raise ValueError("guard rows of a DD frame must be zero")


def map_bits(bits, alphabet, m_total, zp_len):
    """Map a (M', N, k) bit array onto a DDFrame (guard rows zero)."""
    m_data, n_dop, k = bits.shape
    if m_data != m_total - zp_len:
        raise ValueError("bit array does not match frame geometry")
    if k != alphabet.bits_per_symbol:
        raise ValueError("bit depth does not match alphabet")
    weights = 1 << np.arange(k - 1, -1, -1)
    idx = (bits * weights).sum(axis=2)
    grid = np.zeros((m_total, n_dop), dtype=np.complex128)
    grid[:m_data, :] = alphabet.points[idx]
    return DDFrame(grid=grid, zp_len=zp_len)


def random_bits(m_data, n_doppler, bits_per_symbol, rng):
    return rng.integers(0, 2, size=(m_data, n_doppler, bits_per_symbol), dtype=np.int8)


# ----------------------------------------------------------------------
# transforms
# ----------------------------------------------------------------------

def modulate(frame: DDFrame) -> np.ndarray:
    """Row-wise unitary inverse DFT followed by column read-out.

    Returns the length M*N time-domain vector s with s[n*M + m] equal to
    the transform of delay row m evaluated at block n.  Guard rows stay
    zero, so consecutive blocks are separated by D zero samples.
    """
    # np.fft.ifft carries 1/N; rescale to the unitary convention
    xdot = np.fft.ifft(frame.grid, axis=1) * np.sqrt(frame.n_doppler)
    return xdot.T.reshape(-1)


def blocks_of(s, m_total):
    """View the serial vector as (N, M): row n is time block n."""
    return s.reshape(-1, m_total)


def to_dd(est_blocks: np.ndarray) -> np.ndarray:
    """Unitary DFT across blocks, applied per delay index.

    est_blocks has shape (N, M) or (N,) for a single delay index; the
    transform runs over the block axis.
    """
    n = est_blocks.shape[0]
    return np.fft.fft(est_blocks, axis=0) / np.sqrt(n)


def from_dd(dd: np.ndarray) -> np.ndarray:
    """Inverse of to_dd (unitary inverse DFT across the first axis)."""
    n = dd.shape[0]
    return np.fft.ifft(dd, axis=0) * np.sqrt(n)


def hard_decide(values, alphabet):
    """Nearest-point decision, ties broken toward the lowest point index.

    Returns (symbols, bit labels); works on any array shape, decisions
    are elementwise over the flattened input.
    """
    v = np.asarray(values)
    flat = v.reshape(-1, 1)
    d2 = np.abs(flat - alphabet.points[None, :]) ** 2
    idx = np.argmin(d2, axis=1)  # argmin takes the first minimum
    sym = alphabet.points[idx].reshape(v.shape)
    bits = alphabet.bits[idx].reshape(v.shape + (alphabet.bits_per_symbol,))
    return sym, bits
