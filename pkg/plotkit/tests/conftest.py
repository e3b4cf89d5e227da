import subprocess
import sys

import pytest

HEADER = ("snr_db,iteration,detector,initializer,nmse_db,frames,bits,"
          "bit_errors,ber,flops_init,flops_detect,seconds")


def run_sim(args):
    """Drive the simulator CLI; the CSV file is the only interface used."""
    return subprocess.run([sys.executable, "-m", "oddmsim"] + args,
                          capture_output=True, text=True)


@pytest.fixture(scope="session")
def desk_csv(tmp_path_factory):
    """Short sweep at the desk-scale geometry, all three initializers.

    The grid is extended to 30 dB where two frames produce genuinely
    error-free rows, exercising the display floor on real output.
    """
    out = tmp_path_factory.mktemp("fixtures") / "desk.csv"
    res = run_sim(["sweep", "--config", "desk-scale", "--frames", "2",
                   "--snr", "6,9,12,15,18,21,24,30",
                   "--init", "azi,fmi,dsgi", "--workers", "1",
                   "--no-timing", "--out", str(out)])
    assert res.returncode == 0, res.stderr
    return out


@pytest.fixture(scope="session")
def csi_csv(tmp_path_factory):
    """Perfect and degraded channel knowledge merged into one file."""
    d = tmp_path_factory.mktemp("fixtures_csi")
    a, b = d / "perfect.csv", d / "degraded.csv"
    base = ["sweep", "--config", "desk-scale", "--frames", "2",
            "--snr", "12,15,18", "--init", "fmi,dsgi", "--workers", "1",
            "--no-timing"]
    res = run_sim(base + ["--out", str(a)])
    assert res.returncode == 0, res.stderr
    res = run_sim(base + ["--nmse", "-10", "--out", str(b)])
    assert res.returncode == 0, res.stderr
    merged = d / "csi.csv"
    lines = a.read_text().splitlines() + b.read_text().splitlines()[1:]
    merged.write_text("\n".join(lines) + "\n")
    return merged
