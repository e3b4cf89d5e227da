import numpy as np

from oddmsim.channel import PathSet, build_taps
from oddmsim.pulse import PulseSpec


def random_channel(rng, m_total=16, n_blocks=4, zp_len=3, n_paths=2,
                   half_span=1, max_delay=2.0, max_doppler=2.0):
    """Random small channel instance for unit tests.

    Delays stay inside the guard so coverage checks pass; Doppler is in
    fractional bins over the whole frame.
    """
    spec = PulseSpec(rolloff=0.25, half_span=half_span)
    paths = PathSet(
        gains=(rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths))
        / np.sqrt(2 * n_paths),
        delays=rng.uniform(0.0, max_delay, n_paths),
        dopplers=rng.uniform(-max_doppler, max_doppler, n_paths))
    return build_taps(paths, spec, m_total, n_blocks, zp_len), paths, spec
