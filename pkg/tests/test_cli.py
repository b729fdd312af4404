import csv
import json

import numpy as np
import pytest

from freeconv import measures as ms
from freeconv.cli import main


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return header, np.array([[float(v) for v in r] for r in body])


def test_convolve_square_writes_artifacts(tmp_path):
    out = str(tmp_path / "run")
    code = main(["convolve-square", "--mu", "semicircle{variance:1}",
                 "--nu", "atomic{-1:0.5,1:0.5}", "--grid", "-3:3:121",
                 "--out", out])
    assert code == 0
    header, body = read_csv(out + ".csv")
    assert header == ["x", "density", "error_bar", "flag"]
    assert body.shape == (121, 4)
    payload = json.loads((tmp_path / "run.json").read_text())
    assert "atoms" in payload and "support" in payload
    # the critical pair has a zero of the density at the origin
    mid = body[60]
    assert mid[0] == 0.0 and mid[1] < 1e-6


def test_convolve_square_cauchy_closed_form(tmp_path):
    out = str(tmp_path / "cauchy")
    code = main(["convolve-square", "--mu", "cauchy{t:1}",
                 "--nu", "atomic{0:1}", "--grid", "-2:2:41", "--out", out])
    assert code == 0
    _, body = read_csv(out + ".csv")
    xs, dens = body[:, 0], body[:, 1]
    ref = (1 / np.pi) / (1 + xs**2)
    assert np.max(np.abs(dens - ref)) < 1e-10


def test_malformed_spec_exits_1(tmp_path, capsys):
    code = main(["convolve-square", "--mu", "semicircle{variance:",
                 "--nu", "atomic{0:1}", "--grid", "-1:1:11",
                 "--out", str(tmp_path / "x")])
    assert code == 1
    err = capsys.readouterr().err
    assert "line 1" in err


def test_bad_grid_exits_1(tmp_path):
    code = main(["convolve-square", "--mu", "semicircle{variance:1}",
                 "--nu", "atomic{0:1}", "--grid", "3:-3:11",
                 "--out", str(tmp_path / "x")])
    assert code == 1


def test_convolve_rect_writes_artifacts(tmp_path):
    out = str(tmp_path / "rect")
    code = main(["convolve-rect",
                 "--mu", "rect_stable{alpha:1,t:0.4,lambda:0.5}",
                 "--nu", "rect_stable{alpha:1,t:0.6,lambda:0.5}",
                 "--grid", "-2:2:81", "--out", out])
    assert code == 0
    _, body = read_csv(out + ".csv")
    xs, dens = body[:, 0], body[:, 1]
    ref = np.asarray(ms.RectStable(1.0, 1.0, 0.5).density(xs))
    sel = np.abs(np.abs(xs) - 0.25) > 0.1
    assert np.max(np.abs(dens[sel] - ref[sel])) < 1e-4
    payload = json.loads((tmp_path / "rect.json").read_text())
    assert payload["atoms"] == []


def test_hole_command_stable_pair(tmp_path, capsys):
    code = main(["hole", "--mu", "rect_stable{alpha:1,t:1,lambda:0.5}",
                 "--nu", "rect_stable{alpha:1,t:1,lambda:0.5}"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["has_hole"] is True
    assert payload["hole_radius_estimate"] == pytest.approx(0.5, abs=1e-3)


def test_atoms_command(tmp_path, capsys):
    code = main(["atoms",
                 "--mu", "rect_id{lambda:0.5, levy: atomic{-1:0.1,1:0.1}}",
                 "--nu", "rect_id{lambda:0.5, levy: atomic{-1:0.075,1:0.075}}"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["atom_at_zero"] == pytest.approx(0.3, abs=5e-3)


def test_stable_density_matches_formula(tmp_path):
    out = str(tmp_path / "st")
    code = main(["stable-density", "--alpha", "1", "--t", "1",
                 "--lambda", "0.5", "--grid", "0.2:2:181", "--out", out])
    assert code == 0
    _, body = read_csv(out + ".csv")
    xs, dens = body[:, 0], body[:, 1]
    ref = np.asarray(ms.RectStable(1.0, 1.0, 0.5).density(xs))
    assert np.max(np.abs(dens - ref)) < 1e-12


def test_rmt_verify_pass(tmp_path, capsys):
    out = str(tmp_path / "rmt")
    code = main(["rmt-verify", "--model", "square",
                 "--muA", "semicircle{variance:1}",
                 "--muB", "semicircle{variance:1}",
                 "--N", "300", "--trials", "3", "--seed", "7",
                 "--target", "semicircle{variance:2}",
                 "--ks-threshold", "0.05", "--out", out])
    assert code == 0
    assert "pass" in capsys.readouterr().out
    payload = json.loads((tmp_path / "rmt.json").read_text())
    assert payload["ks"] < 0.05
    assert payload["seed"] == 7


def test_classify_command(capsys):
    code = main(["classify", "--mu", "semicircle{variance:1}",
                 "--nu", "atomic{-1:0.5,1:0.5}"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["origin_regime"] == "Cusp"


def test_reproducible_outputs(tmp_path):
    args = ["convolve-square", "--mu", "semicircle{variance:1}",
            "--nu", "atomic{-1:0.5,1:0.5}", "--grid", "-2:2:41"]
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(args + ["--out", out1]) == 0
    assert main(args + ["--out", out2]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_console_script_help():
    import subprocess
    out = subprocess.run(["freeconv", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "convolve-square" in out.stdout
