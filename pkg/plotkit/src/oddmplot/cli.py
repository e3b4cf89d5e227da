"""Command-line figure renderer for simulator sweep CSV files.

Exit codes: 0 on success, 2 for unusable input (missing file or
columns, empty selection, bad filter), 3 for unexpected failures.
"""

import argparse
import sys

from .plots import KINDS, PlotError, PlotSpec, normalize_nmse, render


def _csv_list(text):
    return tuple(t.strip() for t in str(text).split(",") if t.strip())


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="oddm-plot",
        description="Render BER figures from simulator sweep CSV output")
    parser.add_argument("--kind", required=True, choices=KINDS,
                        help="iters: BER vs sweep count; snr: BER vs SNR; "
                             "csi: BER vs SNR pairing perfect and degraded "
                             "channel knowledge")
    parser.add_argument("--in", dest="src", required=True,
                        help="input CSV from the simulator")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--detector", default=None,
                        help="comma list filter, e.g. sic-lmmse")
    parser.add_argument("--init", default=None,
                        help="comma list filter, e.g. azi,fmi,dsgi")
    parser.add_argument("--nmse", default=None,
                        help="comma list filter; 'perfect' selects rows "
                             "without channel knowledge error")
    parser.add_argument("--snr", type=float, default=None,
                        help="iters kind: grid point to show "
                             "(default: highest in the selection)")
    parser.add_argument("--iteration", type=int, default=None,
                        help="snr/csi kinds: sweep count to show "
                             "(default: last)")
    args = parser.parse_args(argv)
    try:
        spec = PlotSpec(
            src=args.src, kind=args.kind, out=args.out,
            detectors=_csv_list(args.detector) if args.detector else (),
            initializers=_csv_list(args.init) if args.init else (),
            nmse=tuple(normalize_nmse(t) for t in _csv_list(args.nmse))
            if args.nmse else (),
            snr_db=args.snr, iteration=args.iteration)
        out = render(spec)
    except PlotError as e:
        print(f"plot error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - boundary of the CLI
        print(f"runtime failure: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
