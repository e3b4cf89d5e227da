"""Link-level simulator for zero-padded delay-Doppler multicarrier
transmission over doubly dispersive channels, with iterative
per-symbol interference-cancellation detection and three detector
initialization strategies."""

__version__ = "0.1.0"

from .channel import (ConfigError, PathSet, TapTensor, apply_channel,
                      build_taps, gen_paths, max_doppler_hz, perturb_csi)
from .equalize import (DetectorRun, SymbolWindow, build_window, cancel,
                       detect_frame, filter_lmmse, filter_mrc)
from .frame import (Alphabet, DDFrame, from_dd, hard_decide, make_alphabet,
                    map_bits, modulate, random_bits, to_dd)
from .harness import (SimConfig, count_flops, load_config, run_point,
                      run_sweep, write_csv)
from .init import InitResult, fmi_solve, init_azi, init_dsgi, init_fmi
from .pulse import PulseSpec, g_eval, tap_window
from .sinr import SinrState, sinr_eval, sinr_init_all, sinr_update_after
