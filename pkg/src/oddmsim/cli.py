"""Command-line front end.

Subcommands: sweep (BER vs SNR), iters (BER vs sweep count at one SNR),
flops (cost scaling report), selftest (built-in oracle checks).

Exit codes: 0 on success, 2 for configuration problems, 3 for runtime
failures (including failed self checks).
"""

import argparse
import sys
from dataclasses import replace

from .channel import ConfigError
from .harness import (DETECTORS, INITIALIZERS, count_flops, flops_report,
                      load_config, run_sweep, write_csv)


def _csv_list(text):
    return [t.strip() for t in str(text).split(",") if t.strip()]


def _add_run_args(p, many_snr):
    p.add_argument("--config", default="desk-scale",
                   help="preset name or path to a JSON config")
    p.add_argument("--snr", default=None,
                   help="SNR grid in dB, comma separated" if many_snr
                   else "single SNR in dB")
    p.add_argument("--detector", default=None,
                   help=f"comma list from {DETECTORS}")
    p.add_argument("--init", default=None,
                   help=f"comma list from {INITIALIZERS}")
    p.add_argument("--frames", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--nmse", type=float, default=None,
                   help="channel knowledge error in dB (omit for perfect)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--no-timing", action="store_true",
                   help="zero the seconds column and drop the header stamp")


def _run(args, many_snr):
    cfg = load_config(args.config)
    overrides = {}
    if args.snr is not None:
        snrs = tuple(float(x) for x in _csv_list(args.snr))
        if not many_snr and len(snrs) != 1:
            raise ConfigError("this subcommand takes exactly one SNR")
        overrides["snr_db"] = snrs
    if args.frames is not None:
        overrides["frames"] = args.frames
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.nmse is not None:
        overrides["nmse_db"] = args.nmse
    if overrides:
        cfg = replace(cfg, **overrides).validate()
    detectors = _csv_list(args.detector) if args.detector else None
    initializers = _csv_list(args.init) if args.init else None
    rows = run_sweep(cfg, detectors=detectors, initializers=initializers,
                     timing=not args.no_timing)
    write_csv(rows, args.out, timing=not args.no_timing)
    print(f"wrote {len(rows)} rows to {args.out}")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="oddmsim",
        description="Link-level simulator for zero-padded delay-Doppler "
                    "multicarrier transmission")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="BER over an SNR grid")
    _add_run_args(p_sweep, many_snr=True)

    p_iters = sub.add_parser("iters", help="BER per sweep at one SNR")
    _add_run_args(p_iters, many_snr=False)

    p_flops = sub.add_parser("flops", help="cost scaling report")
    p_flops.add_argument("--seed", type=int, default=7)
    p_flops.add_argument("--out", default=None,
                         help="also write the raw grid as CSV")

    p_self = sub.add_parser("selftest", help="built-in oracle checks")
    p_self.add_argument("--seed", type=int, default=2024)

    args = parser.parse_args(argv)
    try:
        if args.command in ("sweep", "iters"):
            _run(args, many_snr=args.command == "sweep")
        elif args.command == "flops":
            records = count_flops(seed=args.seed)
            print(flops_report(records))
            if args.out:
                cols = ("m_data", "zp_len", "initializer", "flops_init",
                        "dense_equiv_flops", "flops_detect")
                with open(args.out, "w") as fh:
                    fh.write(",".join(cols) + "\n")
                    for r in records:
                        fh.write(",".join(str(r[c]) for c in cols) + "\n")
        else:
            from .selftest import run_selftest
            failures = run_selftest(seed=args.seed)
            if failures:
                print(f"{failures} check(s) failed", file=sys.stderr)
                return 3
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - boundary of the CLI
        print(f"runtime failure: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
