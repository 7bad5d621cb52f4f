"""Figure rendering from experiment CSVs, driven end to end through the CLIs.

The fixture CSVs are produced by invoking the experiment CLI as a subprocess,
so these tests exercise the real external interface: files on disk only.
"""

import pathlib
import subprocess
import sys

import numpy as np
import pytest

from glwalk_viz import PlotJob, VizError, render
from glwalk_viz.cli import main as viz_main

REPO = pathlib.Path(__file__).resolve().parents[2]

CONFIG = """
[model]
kind = rotation-diag-rotation
model_id = rdr
log_scale = 1.0

[spectral]
m = 256
s_list = 0.0
richardson = false

[edgeworth]
n_list = 64, 256, 1024
n_mc = 20000

[run]
seed = 20240817
"""


def _run_cli(subcommand, config_path):
    proc = subprocess.run(
        [sys.executable, "-m", "glwalk.harness.cli", subcommand, str(config_path)],
        capture_output=True,
        text=True,
        check=True,
    )
    return pathlib.Path(proc.stdout.strip())


@pytest.fixture(scope="session")
def csv_dir(tmp_path_factory):
    """ecdf.csv, berry_esseen.csv and spectral.csv from one experiment run."""
    base = tmp_path_factory.mktemp("csvs")
    config = base / "exp.ini"
    config.write_text(CONFIG + f"out = {base / 'out'}\n")
    paths = {}
    for sub in ("edgeworth", "berry-esseen", "spectral"):
        paths[sub] = _run_cli(sub, config)
    return paths


def _read_csv(path):
    import csv

    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return list(reader)


def test_header_only_file_reports_no_data(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("n,ks_phi,ks_edgeworth\n")
    with pytest.raises(VizError, match="no data rows"):
        render(PlotJob("ks-decay", [str(path)], str(tmp_path / "o.png")))


def test_missing_columns_are_named(tmp_path):
    path = tmp_path / "wrong.csv"
    path.write_text("n,foo\n64,0.1\n")
    with pytest.raises(VizError, match="ks_phi.*ks_edgeworth"):
        render(PlotJob("ks-decay", [str(path)], str(tmp_path / "o.png")))


def test_unknown_kind_and_empty_inputs_rejected(tmp_path):
    with pytest.raises(VizError, match="unknown plot kind"):
        PlotJob("pie-chart", ["a.csv"], "o.png")
    with pytest.raises(VizError, match="at least one"):
        PlotJob("ks-decay", [], "o.png")


def test_ks_decay_figure(csv_dir, tmp_path):
    out = tmp_path / "ks.png"
    result = render(PlotJob("ks-decay", [str(csv_dir["berry-esseen"])], str(out)))
    assert out.exists() and out.stat().st_size > 0
    n, ks_phi = result.series["ks_phi"]
    assert list(n) == [64.0, 256.0, 1024.0]
    rows = _read_csv(csv_dir["berry-esseen"])
    expected = {float(r["n"]): float(r["ks_phi"]) for r in rows}
    assert all(ks_phi[i] == expected[n[i]] for i in range(3))
    # the guide line has exact slope -1/2 in log-log coordinates
    _, guide = result.series["guide"]
    assert guide[2] / guide[0] == pytest.approx(0.25)


def test_spectral_curve_figure(csv_dir, tmp_path):
    out = tmp_path / "spec.png"
    result = render(PlotJob("spectral-curve", [str(csv_dir["spectral"])], str(out)))
    assert out.exists() and out.stat().st_size > 0
    s, kappa = result.series["kappa"]
    assert abs(kappa[list(s).index(0.0)] - 1.0) <= 1e-10


def test_cdf_overlay_selects_horizon(csv_dir, tmp_path):
    out = tmp_path / "cdf.png"
    result = render(
        PlotJob("cdf-overlay", [str(csv_dir["edgeworth"])], str(out), {"n": 256})
    )
    t, ecdf = result.series["ecdf"]
    assert len(t) == 241
    assert np.all(np.diff(t) > 0)
    assert np.all(np.diff(ecdf) >= 0)
    with pytest.raises(VizError, match="not present"):
        render(PlotJob("cdf-overlay", [str(csv_dir["edgeworth"])], str(out), {"n": 7}))


def test_rerender_is_deterministic(csv_dir, tmp_path):
    out1, out2 = tmp_path / "a.png", tmp_path / "b.png"
    r1 = render(PlotJob("ks-decay", [str(csv_dir["berry-esseen"])], str(out1)))
    r2 = render(PlotJob("ks-decay", [str(csv_dir["berry-esseen"])], str(out2)))
    for key in r1.series:
        assert np.array_equal(r1.series[key][1], r2.series[key][1])
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_exit_codes(csv_dir, tmp_path, capsys):
    out = tmp_path / "cli.png"
    assert viz_main(["ks-decay", str(csv_dir["berry-esseen"]), "--out", str(out)]) == 0
    assert capsys.readouterr().out.strip() == str(out)
    bad = tmp_path / "empty.csv"
    bad.write_text("n,ks_phi,ks_edgeworth\n")
    assert viz_main(["ks-decay", str(bad), "--out", str(out)]) == 2
    assert "no data rows" in capsys.readouterr().err


def test_rendering_package_not_imported_by_library():
    """The core library and its tests never reference the rendering package."""
    hits = []
    for root in (REPO / "src", REPO / "tests"):
        for path in root.rglob("*.py"):
            if "glwalk_viz" in path.read_text():
                hits.append(str(path))
    assert hits == []


def test_acceptance_11_overlay_reproduces_ks(csv_dir, tmp_path, capsys):
    """The plotted overlay series reproduce the emitted KS statistics."""
    rows = _read_csv(csv_dir["berry-esseen"])
    worst = 0.0
    for be_row in rows:
        n = int(be_row["n"])
        result = render(
            PlotJob(
                "cdf-overlay",
                [str(csv_dir["edgeworth"])],
                str(tmp_path / f"overlay_{n}.png"),
                {"n": n},
            )
        )
        _, ecdf = result.series["ecdf"]
        _, edge = result.series["edgeworth_ref"]
        gap = float(np.max(np.abs(ecdf - edge)))
        worst = max(worst, abs(gap - float(be_row["ks_edgeworth"])))
    ok = worst <= 1e-12
    with capsys.disabled():
        print(
            f"[acceptance 11] {'PASS' if ok else 'FAIL'}: overlay KS matches "
            f"emitted ks_edgeworth to {worst:.3e} (tol 1e-12) over n = 64, 256, 1024"
        )
    assert ok
