"""Monte Carlo harness: configuration, frame loop, CSV reporting.

A run is defined by a single key-value config (JSON).  Every frame is
an independent work unit whose random stream is derived from the master
seed, the SNR point index and the frame index, so results are identical
for any worker count and frames can be farmed out to a process pool.
"""

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from datetime import datetime, timezone
from importlib import resources

import numpy as np

from . import channel, frame, init
from .channel import ConfigError
from .equalize import detect_frame
from .pulse import PulseSpec

CSV_COLUMNS = ("snr_db", "iteration", "detector", "initializer", "nmse_db",
               "frames", "bits", "bit_errors", "ber", "flops_init",
               "flops_detect", "seconds")

DETECTORS = ("sic-mrc", "sic-lmmse")
INITIALIZERS = ("azi", "fmi", "dsgi")


def load_profile(name_or_table):
    """Resolve a delay profile: bundled name or inline (delay, dB) rows."""
    if isinstance(name_or_table, str):
        fname = name_or_table.lower().replace("-", "_") + ".json"
        try:
            text = resources.files("oddmsim.data").joinpath(fname).read_text()
        except FileNotFoundError:
            raise ConfigError(f"unknown delay profile {name_or_table!r}")
        return [tuple(row) for row in json.loads(text)["taps"]]
    return [tuple(row) for row in name_or_table]


@dataclass
class SimConfig:
    """Full description of one simulation run."""

    m_total: int = 64
    n_blocks: int = 16
    zp_len: int = 8
    order: int = 16
    rolloff: float = 0.25
    pulse_half_span: int = 4
    carrier_hz: float = 4.0e9
    subcarrier_hz: float = 15.0e3
    speed_kmh: float = 1000.0
    profile: object = "tdl-b"
    delay_spread_s: float = 2.0e-7
    snr_db: tuple = (6.0, 9.0, 12.0, 15.0, 18.0, 21.0)
    detector: str = "sic-lmmse"
    initializer: str = "dsgi"
    max_iters: int = 10
    frames: int = 200
    nmse_db: object = None
    seed: int = 1
    workers: int = 1
    dsgi_batch_decisions: bool = False

    @property
    def sample_period_s(self):
        return 1.0 / (self.m_total * self.subcarrier_hz)

    @property
    def m_data(self):
        return self.m_total - self.zp_len

    @property
    def nu_max_hz(self):
        return channel.max_doppler_hz(self.carrier_hz, self.speed_kmh)

    @property
    def pulse(self):
        return PulseSpec(rolloff=self.rolloff, half_span=self.pulse_half_span)

    def validate(self):
        if self.zp_len < 0 or self.m_total <= self.zp_len:
            raise ConfigError("need m_total > zp_len >= 0")
        if self.n_blocks < 1:
            raise ConfigError("need at least one block")
        if self.order not in frame.SUPPORTED_ORDERS:
            raise ConfigError(f"order must be one of {frame.SUPPORTED_ORDERS}")
        if not 0.0 <= self.rolloff <= 1.0:
            raise ConfigError("rolloff must lie in [0, 1]")
        if 2 * self.pulse_half_span > self.m_total / 4:
            raise ConfigError("pulse span too long for the block size")
        if self.detector not in DETECTORS:
            raise ConfigError(f"detector must be one of {DETECTORS}")
        if self.initializer not in INITIALIZERS:
            raise ConfigError(f"initializer must be one of {INITIALIZERS}")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be positive")
        if self.frames < 0 or self.workers < 1:
            raise ConfigError("frames must be >= 0 and workers >= 1")
        prof = np.asarray(load_profile(self.profile), dtype=np.float64)
        if prof.ndim != 2 or prof.shape[1] != 2 or len(prof) == 0:
            raise ConfigError("profile must be nonempty rows of (delay, dB)")
        worst = prof[:, 0].max() * self.delay_spread_s / self.sample_period_s
        need = int(np.ceil(worst)) + 2 * self.pulse_half_span - 1
        if need > self.zp_len:
            raise ConfigError(
                f"delay spread needs {need} guard taps but zp_len is "
                f"{self.zp_len}; shrink delay_spread_s or grow the guard")
        return self


_CONFIG_KEYS = {f.name for f in fields(SimConfig)}


def config_from_dict(d) -> SimConfig:
    unknown = set(d) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    d = dict(d)
    if "snr_db" in d:
        d["snr_db"] = tuple(float(x) for x in d["snr_db"])
    return SimConfig(**d).validate()


def load_config(name_or_path) -> SimConfig:
    """Load a bundled preset by name, or a JSON config file by path."""
    preset = str(name_or_path).lower().replace("_", "-") + ".json"
    bundle = resources.files("oddmsim.presets").joinpath(preset)
    if bundle.is_file():
        return config_from_dict(json.loads(bundle.read_text()))
    try:
        with open(name_or_path) as fh:
            return config_from_dict(json.load(fh))
    except FileNotFoundError:
        raise ConfigError(f"no preset or config file named {name_or_path!r}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {name_or_path!r} is not valid JSON: {e}")


# ----------------------------------------------------------------------
# frame loop
# ----------------------------------------------------------------------

@dataclass
class PointResult:
    """Aggregated outcome of one (config, SNR) Monte Carlo point."""

    snr_db: float
    frames: int
    bits: int
    errors_by_iter: np.ndarray  # (max_iters,) cumulative decisions per sweep
    flops_init: int
    flops_detect: int
    dense_equiv_flops: int
    degenerate_windows: int
    fallback_count: int
    seconds: float

    def ber(self, iteration=None):
        i = -1 if iteration is None else iteration - 1
        return self.errors_by_iter[i] / self.bits if self.bits else 0.0


def run_frame(cfg: SimConfig, snr_db, point_idx, frame_idx):
    """Simulate one frame end to end; returns the per-frame tallies.

    The random stream is keyed on (seed, point, frame) only, never on
    detector or initializer, so runs that differ only in the receiver
    see identical channels, data and noise.  The CSI perturbation is
    drawn last, keeping everything before it aligned between perfect
    and imperfect runs.
    """
    rng = np.random.default_rng(
        np.random.SeedSequence((cfg.seed, point_idx, frame_idx)))
    prof = load_profile(cfg.profile)
    alphabet = frame.make_alphabet(cfg.order)
    paths = channel.gen_paths(prof, cfg.delay_spread_s, cfg.nu_max_hz,
                              cfg.sample_period_s,
                              cfg.m_total * cfg.n_blocks, rng)
    bits = frame.random_bits(cfg.m_data, cfg.n_blocks,
                             alphabet.bits_per_symbol, rng)
    dd = frame.map_bits(bits, alphabet, cfg.m_total, cfg.zp_len)
    s = frame.modulate(dd)
    sigma2 = 10.0 ** (-snr_db / 10.0)  # P_t is 1 by construction
    taps_true = channel.build_taps(paths, cfg.pulse, cfg.m_total,
                                   cfg.n_blocks, cfg.zp_len)
    r = channel.apply_channel(taps_true, s, sigma2, rng)
    if cfg.nmse_db is not None:
        paths_rx = channel.perturb_csi(paths, cfg.nmse_db, rng)
        taps_rx = channel.build_taps(paths_rx, cfg.pulse, cfg.m_total,
                                     cfg.n_blocks, cfg.zp_len)
    else:
        taps_rx = taps_true

    if cfg.initializer == "azi":
        res = init.init_azi(taps_rx)
    elif cfg.initializer == "fmi":
        res = init.init_fmi(r, taps_rx, alphabet, sigma2)
    else:
        res = init.init_dsgi(r, taps_rx, alphabet, sigma2,
                             batch_decisions=cfg.dsgi_batch_decisions)
    filter_kind = "mrc" if cfg.detector == "sic-mrc" else "lmmse"
    run = detect_frame(r, taps_rx, alphabet, sigma2,
                       filter_kind=filter_kind, max_iters=cfg.max_iters,
                       init_est=res.est_blocks,
                       init_decisions=res.decisions, truth_bits=bits)
    n_bits = bits.size
    return (np.array(run.per_iter_bit_errors, dtype=np.int64), n_bits,
            res.flops, run.flops, res.dense_equiv_flops,
            run.degenerate_windows, int(res.fallback_regularized))


def _frame_job(args):
    cfg, snr_db, point_idx, frame_idx = args
    return run_frame(cfg, snr_db, point_idx, frame_idx)


def run_point(cfg: SimConfig, snr_db, point_idx=0, timing=True) -> PointResult:
    t0 = time.perf_counter()
    errors = np.zeros(cfg.max_iters, dtype=np.int64)
    bits = 0
    f_init = f_det = dense = degen = fallback = 0
    jobs = [(cfg, snr_db, point_idx, i) for i in range(cfg.frames)]
    if cfg.workers > 1 and cfg.frames > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_frame_job, jobs,
                                    chunksize=max(1, cfg.frames // (4 * cfg.workers))))
    else:
        results = [_frame_job(j) for j in jobs]
    for err, nb, fi, fd, de, dg, fb in results:
        errors += err
        bits += nb
        f_init += fi
        f_det += fd
        dense += de
        degen += dg
        fallback += fb
    dt = time.perf_counter() - t0 if timing else 0.0
    return PointResult(snr_db=snr_db, frames=cfg.frames, bits=bits,
                       errors_by_iter=errors, flops_init=f_init,
                       flops_detect=f_det, dense_equiv_flops=dense,
                       degenerate_windows=degen, fallback_count=fallback,
                       seconds=dt)


def result_rows(cfg: SimConfig, point: PointResult):
    """CSV rows (one per sweep) for an aggregated point."""
    nmse = "" if cfg.nmse_db is None else f"{cfg.nmse_db:g}"
    rows = []
    for it in range(1, cfg.max_iters + 1):
        err = int(point.errors_by_iter[it - 1])
        ber = err / point.bits if point.bits else 0.0
        rows.append({
            "snr_db": f"{point.snr_db:g}",
            "iteration": str(it),
            "detector": cfg.detector,
            "initializer": cfg.initializer,
            "nmse_db": nmse,
            "frames": str(point.frames),
            "bits": str(point.bits),
            "bit_errors": str(err),
            "ber": f"{ber:.6e}",
            "flops_init": str(point.flops_init),
            "flops_detect": str(point.flops_detect),
            "seconds": f"{point.seconds:.3f}",
        })
    return rows


def run_sweep(cfg: SimConfig, detectors=None, initializers=None,
              timing=True):
    """Run the SNR grid for every requested receiver combination.

    Returns the CSV rows.  Random streams are keyed on the SNR point
    index, so every combination sees the same channels and data.
    """
    detectors = detectors or [cfg.detector]
    initializers = initializers or [cfg.initializer]
    rows = []
    for det in detectors:
        for ini in initializers:
            sub = replace(cfg, detector=det, initializer=ini).validate()
            for p_idx, snr in enumerate(cfg.snr_db):
                point = run_point(sub, snr, point_idx=p_idx, timing=timing)
                rows.extend(result_rows(sub, point))
    return rows


def write_csv(rows, out_path, timing=True):
    with open(out_path, "w", newline="") as fh:
        if timing:
            stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
            fh.write(f"# generated {stamp}\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(row[c] for c in CSV_COLUMNS) + "\n")


# ----------------------------------------------------------------------
# flop accounting report
# ----------------------------------------------------------------------

def count_flops(m_data_values=(32, 64), zp_values=(6, 12), n_blocks=8,
                order=16, seed=7):
    """Measure initializer and detection cost over an (M', D) grid.

    Each cell runs a single frame per initializer with a one-sweep
    detector at a fixed mid-range SNR; counts are exact complex
    multiply-accumulate tallies, identical across repeat runs with the
    same seed.  Returns one record per (M', D, initializer).
    """
    records = []
    for m_data in m_data_values:
        for zp in zp_values:
            base = SimConfig(
                m_total=m_data + zp, n_blocks=n_blocks, zp_len=zp,
                order=order, pulse_half_span=1, profile=[[0.0, 0.0]],
                delay_spread_s=0.0, snr_db=(15.0,), max_iters=1,
                frames=1, seed=seed)
            # spread a few synthetic paths inside the guard window
            span = max(zp - 2 * base.pulse_half_span + 1, 0)
            prof = [[0.0, 0.0], [0.35, -3.0], [0.7, -6.0], [1.0, -9.0]]
            base = replace(base,
                           profile=prof,
                           delay_spread_s=span * base.sample_period_s)
            for ini in INITIALIZERS:
                cfg = replace(base, initializer=ini).validate()
                out = run_frame(cfg, 15.0, 0, 0)
                records.append({
                    "m_data": m_data, "zp_len": zp, "initializer": ini,
                    "flops_init": out[2], "flops_detect": out[3],
                    "dense_equiv_flops": out[4],
                })
    return records


def flops_report(records):
    """Human-readable scaling summary for the flops subcommand."""
    lines = ["initializer  M'   D    init_flops  dense_equiv  detect_flops"]
    for r in records:
        lines.append(f"{r['initializer']:<11} {r['m_data']:<4} {r['zp_len']:<4} "
                     f"{r['flops_init']:>11} {r['dense_equiv_flops']:>12} "
                     f"{r['flops_detect']:>13}")

    def pick(ini, m_data, zp):
        for r in records:
            if (r["initializer"], r["m_data"], r["zp_len"]) == (ini, m_data, zp):
                return r
        return None

    ms = sorted({r["m_data"] for r in records})
    zs = sorted({r["zp_len"] for r in records})
    if len(zs) >= 2 and zs[1] == 2 * zs[0]:
        a, b = pick("dsgi", ms[0], zs[0]), pick("dsgi", ms[0], zs[1])
        if a and b and a["flops_init"]:
            lines.append(f"dsgi init ratio D {zs[0]}->{zs[1]}: "
                         f"{b['flops_init'] / a['flops_init']:.2f} (expect ~4)")
        a, b = pick("azi", ms[0], zs[0]), pick("azi", ms[0], zs[1])
        if a and b and a["flops_detect"]:
            lines.append(f"detect ratio D {zs[0]}->{zs[1]}: "
                         f"{b['flops_detect'] / a['flops_detect']:.2f} (expect ~2)")
    if len(ms) >= 2 and ms[1] == 2 * ms[0]:
        a, b = pick("fmi", ms[0], zs[0]), pick("fmi", ms[1], zs[0])
        if a and b and a["dense_equiv_flops"]:
            lines.append(f"fmi dense-equivalent ratio M' {ms[0]}->{ms[1]}: "
                         f"{b['dense_equiv_flops'] / a['dense_equiv_flops']:.2f} "
                         f"(expect ~8)")
    return "\n".join(lines)
