import subprocess
import sys

import pytest

from tfseizure.cli import main

SMALL = ["--lag-window", "31", "--fft-length", "64", "--n-seeds", "2"]


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def corpus(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "synth", "--out", str(tmp_path / "corpus"), "--seed", "1",
                           "--per-class", "8")
    assert code == 0
    return out.strip()


def test_full_cli_flow(tmp_path, capsys, corpus):
    out_dir = str(tmp_path / "out")
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"manifest = {corpus}\noutput_dir = {out_dir}\nflux_frame_length = 512\n"
                   "tf_flux_lag = 64\nspectrum_bins = 64\nkernels = swvd\n")
    code, out, err = run_cli(capsys, "extract", "--config", str(cfg), *SMALL)
    assert code == 0, err
    csvs = out.split()
    assert [p.rsplit("/", 1)[-1] for p in csvs] == ["features_time_freq.csv", "features_tf_swvd.csv"]

    code, out, err = run_cli(capsys, "evaluate", "--config", str(cfg), *SMALL, *csvs)
    assert code == 0, err
    assert "all features" in out and "synthetic surrogate" in out

    code, out, _ = run_cli(capsys, "rank", "--config", str(cfg), csvs[1])
    assert code == 0 and out.splitlines()[1].startswith("top-4: ")

    code, out, _ = run_cli(capsys, "histogram", "--config", str(cfg), csvs[1], "TiTF1")
    assert code == 0 and out.splitlines()[-1].startswith("overlap ")

    code, out, _ = run_cli(capsys, "render", "--config", str(cfg), *SMALL, "--segment", "E/synthetic000")
    assert code == 0 and out.strip().endswith("tfd_swvd_E_synthetic000.pgm")


@pytest.mark.parametrize("argv, kind", [
    (["extract"], "config"),
    (["extract", "--manifest", "/nonexistent/manifest.txt"], "config"),
    (["extract", "--kernels", "wigner"], "config"),
    (["evaluate", "/nonexistent/features.csv"], "input"),
    (["rank", "--best-k", "0", "x.csv"], "config"),
])
def test_errors_are_one_line(capsys, argv, kind):
    code, out, err = run_cli(capsys, *argv)
    assert code != 0
    lines = err.strip().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith(f"tfseizure: error[{kind}]: ")


def test_bad_csv_parse_error(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("a,label,source_id\n1,x,s\nq,y,t\n")
    code, _, err = run_cli(capsys, "rank", "--output-dir", str(tmp_path), str(p))
    assert code == 2 and err.startswith("tfseizure: error[parse]: ") and "row 3" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tfseizure", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for cmd in ("extract", "evaluate", "rank", "render", "histogram", "synth"):
        assert cmd in proc.stdout
