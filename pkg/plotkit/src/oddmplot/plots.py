"""Figure rendering over the simulator's delimited sweep output.

The only input contract is the CSV schema written by the simulator:
columns snr_db, iteration, detector, initializer, nmse_db, frames, bits,
bit_errors, ber, flops_init, flops_detect, seconds, optionally preceded
by '#' comment lines.  Three figure kinds:

  iters  error rate against the sweep count at one SNR grid point
  snr    error rate against SNR at one sweep count
  csi    like snr, pairing perfect and degraded channel knowledge by
         line style

Rendering is read-only over the input.  The error-rate axis is
logarithmic, so exact zeros are drawn at DISPLAY_FLOOR to stay visible;
the floor sits well below any statistically meaningful value.
"""

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

SCHEMA = ("snr_db", "iteration", "detector", "initializer", "nmse_db",
          "frames", "bits", "bit_errors", "ber", "flops_init",
          "flops_detect", "seconds")
KINDS = ("iters", "snr", "csi")
DISPLAY_FLOOR = 1e-7

_MARKERS = ("o", "s", "^", "d", "v", "x", "*", "p")
_COLORS = plt.rcParams["axes.prop_cycle"].by_key()["color"]


class PlotError(ValueError):
    """Unusable input: bad file, missing columns, or empty selection."""


@dataclass
class PlotSpec:
    src: str
    kind: str
    out: str
    detectors: tuple = ()      # empty tuple means no filter
    initializers: tuple = ()
    nmse: tuple = ()           # normalized nmse labels, '' for perfect
    snr_db: float = None       # iters: grid point (default highest)
    iteration: int = None      # snr/csi: sweep count (default last)

    def validate(self):
        if self.kind not in KINDS:
            raise PlotError(f"kind must be one of {KINDS}")
        return self


def normalize_nmse(token):
    """Map a filter token onto the CSV's nmse_db spelling."""
    text = str(token).strip().lower()
    if text in ("", "perfect", "none"):
        return ""
    try:
        return f"{float(text):g}"
    except ValueError:
        raise PlotError(f"nmse filter {token!r} is neither a number nor "
                        f"'perfect'")


def load_rows(path):
    """Parse the CSV into typed rows, skipping '#' comment lines."""
    try:
        with open(path, newline="") as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
    except OSError as e:
        raise PlotError(f"cannot read {path!r}: {e}")
    if not lines:
        raise PlotError(f"{path!r} is empty")
    reader = csv.DictReader(lines)
    missing = [c for c in SCHEMA if c not in (reader.fieldnames or [])]
    if missing:
        raise PlotError(f"{path!r} lacks required columns {missing}")
    rows = []
    for raw in reader:
        try:
            rows.append({
                "snr_db": float(raw["snr_db"]),
                "iteration": int(raw["iteration"]),
                "detector": raw["detector"],
                "initializer": raw["initializer"],
                "nmse_db": ("" if raw["nmse_db"] == ""
                            else f"{float(raw['nmse_db']):g}"),
                "ber": float(raw["ber"]),
            })
        except (ValueError, TypeError) as e:
            raise PlotError(f"bad row in {path!r}: {e}")
    return rows


def _select(rows, spec: PlotSpec):
    out = []
    for r in rows:
        if spec.detectors and r["detector"] not in spec.detectors:
            continue
        if spec.initializers and r["initializer"] not in spec.initializers:
            continue
        if spec.nmse and r["nmse_db"] not in spec.nmse:
            continue
        out.append(r)
    return out


def _label(key):
    det, ini, nmse = key
    base = f"{det} / {ini}"
    return base if nmse == "" else f"{base}, nmse {nmse} dB"


def build_series(rows, spec: PlotSpec):
    """Reduce the selected rows to plottable lines.

    Returns (series, note): series is an ordered dict-like list of
    (key, xs, ys) with key = (detector, initializer, nmse_db), one entry
    per combination present in the selection; note describes the fixed
    coordinate (the chosen SNR or sweep count).
    """
    picked = _select(rows, spec)
    if not picked:
        raise PlotError("selection is empty; relax the filters")
    if spec.kind == "iters":
        snrs = sorted({r["snr_db"] for r in picked})
        snr = spec.snr_db if spec.snr_db is not None else snrs[-1]
        picked = [r for r in picked if r["snr_db"] == snr]
        if not picked:
            raise PlotError(f"no rows at snr_db {snr:g}; grid has {snrs}")
        note = f"{snr:g} dB"
        x_of = lambda r: r["iteration"]
    else:
        iters = sorted({r["iteration"] for r in picked})
        it = spec.iteration if spec.iteration is not None else iters[-1]
        picked = [r for r in picked if r["iteration"] == it]
        if not picked:
            raise PlotError(f"no rows at iteration {it}; file has {iters}")
        note = f"sweep {it}"
        x_of = lambda r: r["snr_db"]

    groups = {}
    for r in picked:
        key = (r["detector"], r["initializer"], r["nmse_db"])
        groups.setdefault(key, {})[x_of(r)] = r["ber"]
    series = []
    for key in sorted(groups):
        xs = sorted(groups[key])
        ys = [DISPLAY_FLOOR if groups[key][x] == 0.0 else groups[key][x]
              for x in xs]
        series.append((key, xs, ys))
    return series, note


def make_figure(rows, spec: PlotSpec):
    """Build the matplotlib figure for a selection (no file output)."""
    series, note = build_series(rows, spec)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    pair_color = {}
    for i, (key, xs, ys) in enumerate(series):
        det, ini, nmse = key
        if spec.kind == "csi":
            # perfect and degraded knowledge share a color per receiver
            pair = (det, ini)
            if pair not in pair_color:
                pair_color[pair] = _COLORS[len(pair_color) % len(_COLORS)]
            color = pair_color[pair]
            style = "-" if nmse == "" else "--"
        else:
            color = _COLORS[i % len(_COLORS)]
            style = "-"
        ax.semilogy(xs, ys, style, color=color,
                    marker=_MARKERS[i % len(_MARKERS)], ms=4,
                    label=_label(key))
    if spec.kind == "iters":
        ax.set_xlabel("sweep")
        ax.set_title(f"error rate by sweep at {note}")
    else:
        ax.set_xlabel("SNR (dB)")
        ax.set_title(f"error rate by SNR at {note}")
    ax.set_ylabel("BER")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def render(spec: PlotSpec) -> str:
    """Render one figure kind to spec.out and return that path."""
    spec.validate()
    rows = load_rows(spec.src)
    fig = make_figure(rows, spec)
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)
    return spec.out
