"""Renderer tests.

The session fixtures in conftest.py produce real sweep CSV files by
shelling out to the simulator CLI, so the delimited schema is the only
coupling between the two packages.  Small handwritten files cover the
error paths and the display floor in isolation.
"""

import hashlib
import subprocess
import sys

import pytest

from oddmplot import (DISPLAY_FLOOR, SCHEMA, PlotError, PlotSpec,
                      build_series, load_rows, make_figure, normalize_nmse,
                      render)

HEADER = ",".join(SCHEMA)


def _row(snr, it, det="sic-lmmse", ini="dsgi", nmse="", ber=1e-3):
    return f"{snr:g},{it},{det},{ini},{nmse},2,1024,7,{ber:.6e},10,20,0.000"


def _write(path, data_rows, comment=None, header=HEADER):
    lines = ([comment] if comment else []) + [header] + list(data_rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def _spec(src, kind="snr", out="unused.png", **kw):
    return PlotSpec(src=str(src), kind=kind, out=str(out), **kw)


# ----------------------------------------------------------------------
# parsing
# ----------------------------------------------------------------------

def test_nmse_token_normalization():
    for tok in ("", "perfect", "none", " PERFECT "):
        assert normalize_nmse(tok) == ""
    assert normalize_nmse("-10") == "-10"
    assert normalize_nmse("-10.0") == "-10"
    assert normalize_nmse("3.50") == "3.5"
    with pytest.raises(PlotError):
        normalize_nmse("abc")


def test_load_rows_types_and_comment_skip(tmp_path):
    src = _write(tmp_path / "a.csv",
                 [_row(6, 1), _row(9, 2, ini="azi", nmse="-10.0", ber=0.0)],
                 comment="# generated 2026-08-19T00:00:00+00:00")
    rows = load_rows(src)
    assert len(rows) == 2
    assert rows[0]["snr_db"] == 6.0 and isinstance(rows[0]["snr_db"], float)
    assert rows[0]["iteration"] == 1 and isinstance(rows[0]["iteration"], int)
    assert rows[0]["nmse_db"] == ""
    assert rows[1]["nmse_db"] == "-10"
    assert rows[1]["ber"] == 0.0


def test_load_rows_missing_file(tmp_path):
    with pytest.raises(PlotError, match="cannot read"):
        load_rows(tmp_path / "nope.csv")


def test_load_rows_empty_file(tmp_path):
    src = tmp_path / "empty.csv"
    src.write_text("")
    with pytest.raises(PlotError, match="empty"):
        load_rows(src)


def test_load_rows_missing_column(tmp_path):
    header = ",".join(c for c in SCHEMA if c != "ber")
    src = _write(tmp_path / "short.csv",
                 ["6,1,sic-lmmse,dsgi,,2,1024,7,10,20,0.000"],
                 header=header)
    with pytest.raises(PlotError, match="ber"):
        load_rows(src)


def test_load_rows_bad_value(tmp_path):
    src = _write(tmp_path / "bad.csv",
                 ["6,1,sic-lmmse,dsgi,,2,1024,7,not-a-number,10,20,0.000"])
    with pytest.raises(PlotError, match="bad row"):
        load_rows(src)


# ----------------------------------------------------------------------
# series construction
# ----------------------------------------------------------------------

def _grid_rows():
    rows = []
    for snr in (10, 20):
        for it in (1, 2, 3):
            for ini in ("azi", "fmi"):
                rows.append(_row(snr, it, ini=ini,
                                 ber=1e-2 / (it * (1 + snr))))
    return rows


def test_iters_kind_defaults_to_highest_snr(tmp_path):
    src = _write(tmp_path / "g.csv", _grid_rows())
    series, note = build_series(load_rows(src), _spec(src, kind="iters"))
    assert note == "20 dB"
    assert len(series) == 2
    for (det, ini, nmse), xs, ys in series:
        assert xs == [1, 2, 3]
        assert ys == [pytest.approx(1e-2 / (it * 21)) for it in xs]


def test_iters_kind_explicit_snr(tmp_path):
    src = _write(tmp_path / "g.csv", _grid_rows())
    series, note = build_series(load_rows(src),
                                _spec(src, kind="iters", snr_db=10.0))
    assert note == "10 dB"
    assert all(ys[0] == pytest.approx(1e-2 / 11) for _, xs, ys in series)
    with pytest.raises(PlotError, match="no rows at snr_db 13"):
        build_series(load_rows(src), _spec(src, kind="iters", snr_db=13.0))


def test_snr_kind_defaults_to_last_iteration(tmp_path):
    src = _write(tmp_path / "g.csv", _grid_rows())
    series, note = build_series(load_rows(src), _spec(src, kind="snr"))
    assert note == "sweep 3"
    assert len(series) == 2
    for _, xs, ys in series:
        assert xs == [10.0, 20.0]


def test_snr_kind_explicit_iteration(tmp_path):
    src = _write(tmp_path / "g.csv", _grid_rows())
    _, note = build_series(load_rows(src),
                           _spec(src, kind="snr", iteration=1))
    assert note == "sweep 1"
    with pytest.raises(PlotError, match="no rows at iteration 9"):
        build_series(load_rows(src), _spec(src, kind="snr", iteration=9))


def test_filters_and_empty_selection(tmp_path):
    src = _write(tmp_path / "g.csv", _grid_rows())
    rows = load_rows(src)
    series, _ = build_series(rows, _spec(src, initializers=("azi",)))
    assert [key[1] for key, _, _ in series] == ["azi"]
    with pytest.raises(PlotError, match="selection is empty"):
        build_series(rows, _spec(src, detectors=("no-such",)))


def test_zero_ber_drawn_at_floor(tmp_path):
    src = _write(tmp_path / "z.csv",
                 [_row(10, 1, ber=0.0), _row(20, 1, ber=1e-3)])
    series, _ = build_series(load_rows(src), _spec(src, kind="snr"))
    (_, xs, ys), = series
    assert ys == [DISPLAY_FLOOR, 1e-3]


def test_bad_kind_rejected(tmp_path):
    src = _write(tmp_path / "g.csv", _grid_rows())
    with pytest.raises(PlotError, match="kind"):
        render(_spec(src, kind="scatter", out=tmp_path / "x.png"))


# ----------------------------------------------------------------------
# figures
# ----------------------------------------------------------------------

def test_figure_log_axis_and_line_count(tmp_path):
    src = _write(tmp_path / "g.csv", _grid_rows())
    fig = make_figure(load_rows(src), _spec(src, kind="snr"))
    ax = fig.axes[0]
    assert ax.get_yscale() == "log"
    assert len(ax.get_lines()) == 2
    labels = [ln.get_label() for ln in ax.get_lines()]
    assert labels == ["sic-lmmse / azi", "sic-lmmse / fmi"]


def test_csi_pairs_by_color_and_style(tmp_path):
    rows = []
    for nmse in ("", "-10"):
        for ini in ("fmi", "dsgi"):
            for snr in (10, 20):
                rows.append(_row(snr, 1, ini=ini, nmse=nmse, ber=1e-3))
    src = _write(tmp_path / "c.csv", rows)
    fig = make_figure(load_rows(src), _spec(src, kind="csi"))
    lines = {ln.get_label(): ln for ln in fig.axes[0].get_lines()}
    assert len(lines) == 4
    for ini in ("fmi", "dsgi"):
        perfect = lines[f"sic-lmmse / {ini}"]
        degraded = lines[f"sic-lmmse / {ini}, nmse -10 dB"]
        assert perfect.get_color() == degraded.get_color()
        assert perfect.get_linestyle() == "-"
        assert degraded.get_linestyle() == "--"


def test_render_writes_image_and_leaves_input_alone(tmp_path):
    src = _write(tmp_path / "g.csv", _grid_rows())
    before = hashlib.sha256(src.read_bytes()).hexdigest()
    out = tmp_path / "fig.png"
    assert render(_spec(src, kind="iters", out=out)) == str(out)
    assert out.stat().st_size > 0
    assert hashlib.sha256(src.read_bytes()).hexdigest() == before


# ----------------------------------------------------------------------
# command line
# ----------------------------------------------------------------------

def _cli(args):
    return subprocess.run([sys.executable, "-m", "oddmplot.cli"] + args,
                          capture_output=True, text=True)


def test_cli_success(tmp_path):
    src = _write(tmp_path / "g.csv", _grid_rows())
    out = tmp_path / "fig.png"
    res = _cli(["--kind", "snr", "--in", str(src), "--out", str(out)])
    assert res.returncode == 0, res.stderr
    assert f"wrote {out}" in res.stdout
    assert out.stat().st_size > 0


def test_cli_rejects_unusable_input(tmp_path):
    src = _write(tmp_path / "g.csv", _grid_rows())
    out = str(tmp_path / "fig.png")
    res = _cli(["--kind", "snr", "--in", str(tmp_path / "nope.csv"),
                "--out", out])
    assert res.returncode == 2 and "plot error" in res.stderr
    res = _cli(["--kind", "snr", "--in", str(src), "--out", out,
                "--detector", "no-such"])
    assert res.returncode == 2 and "selection is empty" in res.stderr
    res = _cli(["--kind", "snr", "--in", str(src), "--out", out,
                "--nmse", "abc"])
    assert res.returncode == 2


def test_cli_runtime_failure_exit(tmp_path):
    src = _write(tmp_path / "g.csv", _grid_rows())
    res = _cli(["--kind", "snr", "--in", str(src),
                "--out", str(tmp_path / "no-dir" / "fig.png")])
    assert res.returncode == 3
    assert "runtime failure" in res.stderr


# ----------------------------------------------------------------------
# acceptance: all three kinds from a real desk-scale sweep
# ----------------------------------------------------------------------

def test_renders_all_kinds_from_desk_sweep(desk_csv, csi_csv, tmp_path):
    """One figure per kind from simulator output, checked structurally."""
    checks = []

    def check(name, good, info):
        checks.append(f"{name}={info}" + ("" if good else " (FAIL)"))
        return good

    ok = True
    rows = load_rows(desk_csv)
    jobs = [(rows, "iters", 3), (rows, "snr", 3),
            (load_rows(csi_csv), "csi", 4)]
    for kind_rows, kind, expect in jobs:
        src = desk_csv if kind != "csi" else csi_csv
        spec = _spec(src, kind=kind, out=tmp_path / f"{kind}.png")
        series, _ = build_series(kind_rows, spec)
        ok &= check(f"{kind} series", len(series) == expect, len(series))
        fig = make_figure(kind_rows, spec)
        ok &= check(f"{kind} yscale", fig.axes[0].get_yscale() == "log",
                    fig.axes[0].get_yscale())
        render(spec)
        size = (tmp_path / f"{kind}.png").stat().st_size
        ok &= check(f"{kind} bytes", size > 0, size)

    zero_rows = sum(1 for r in rows if r["ber"] == 0.0)
    ok &= check("error-free rows", zero_rows > 0, zero_rows)
    floor_spec = _spec(desk_csv, kind="snr", out=tmp_path / "unused.png")
    floored = [y for _, _, ys in build_series(rows, floor_spec)[0]
               for y in ys]
    ok &= check("min drawn ber", min(floored) == DISPLAY_FLOOR,
                f"{min(floored):g}")

    detail = "; ".join(checks)
    print(f"\n{'PASS' if ok else 'FAIL'} plot suite: {detail}")
    assert ok, detail
