import json
import math
import subprocess
import sys

import pytest

from anisospec.cli import dumps, run

SQUARE = '{"generator": "rect", "a": 1.0, "b": 1.0}'


@pytest.fixture
def square(tmp_path):
    path = tmp_path / "square.json"
    path.write_text(SQUARE)
    return str(path)


def _json(capsys):
    out = capsys.readouterr().out
    return json.loads(out)


def test_gen_shape_to_stdout(capsys):
    assert run(["gen-shape", "annulus", "R=0.5", "r=0.2", "n=32"]) == 0
    data = _json(capsys)
    assert data["schema"] == "anisospec/1"
    assert len(data["outer"]) == 32 and len(data["holes"]) == 1


def test_gen_shape_file_feeds_other_commands(tmp_path, capsys):
    path = tmp_path / "rect.json"
    assert run(["gen-shape", "rotated_rect", "a=1", "b=0.5", "phi=0.3", "--out", str(path)]) == 0
    assert "4 vertices" in capsys.readouterr().out
    assert run(["lambda-min", "--shape", str(path), "--p", "2"]) == 0
    data = _json(capsys)
    assert data["value"] == pytest.approx(math.pi ** 2 / 1.25, rel=1e-9)


def test_lambda_degenerate_closed_form(square, capsys):
    assert run(["lambda", "--shape", square, "--anis", '{"kind": "directional", "c": 1.0, "theta": 0.0}',
                "--p", "2"]) == 0
    data = _json(capsys)
    assert data["method"] == "closed_form"
    assert data["value"] == pytest.approx(math.pi ** 2, rel=1e-12)


def test_lambda_positive_uses_fem(square, capsys):
    assert run(["lambda", "--shape", square, "--anis", '{"kind": "euclidean"}', "--p", "2", "--h", "0.05"]) == 0
    data = _json(capsys)
    assert data["method"] == "fem"
    assert data["value"] == pytest.approx(2 * math.pi ** 2, rel=0.02)


def test_anisotropy_from_file(tmp_path, square, capsys):
    anis = tmp_path / "h.json"
    anis.write_text('{"kind": "scaled", "alpha": 2.0, "child": {"kind": "directional", "c": 1.0, "theta": 0.0}}')
    assert run(["lambda", "--shape", square, "--anis", "@" + str(anis), "--p", "3"]) == 0
    assert _json(capsys)["value"] == pytest.approx(8 * 2 * (2 * math.pi / (3 * math.sin(math.pi / 3))) ** 3)


def test_classify(capsys):
    assert run(["classify", "--anis", '{"kind": "quadratic", "matrix": [[4, 0], [0, 0]]}']) == 0
    data = _json(capsys)
    assert data["kind"] == "degenerate" and data["c"] == pytest.approx(2.0)


def test_width_profile_csv(tmp_path, square, capsys):
    out = tmp_path / "w.csv"
    assert run(["width-profile", "--shape", square, "--n", "128", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "theta,L" and len(lines) == 129
    assert "2 maxima" in capsys.readouterr().out


def test_bounds(square, capsys):
    assert run(["bounds", "--shape", square, "--p", "2"]) == 0
    data = _json(capsys)
    assert data["id_min"]["holds"] and data["id_min"]["equality"]
    assert data["ip_min"]["holds"] and data["isodiametric"]["holds"]


def test_blowup_csv(tmp_path, capsys):
    out = tmp_path / "b.csv"
    assert run(["blowup", "--anis", '{"kind": "euclidean"}', "--p", "2", "--k-max", "8", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "k,area,lower_bound" and len(rows) == 9


def test_solve_exports(tmp_path, square, capsys):
    mesh, field_ = tmp_path / "m.txt", tmp_path / "u.csv"
    assert run(["solve", "--shape", square, "--anis", '{"kind": "euclidean"}', "--p", "2", "--h", "0.1",
                "--mesh-out", str(mesh), "--field-out", str(field_)]) == 0
    data = _json(capsys)
    nv = int(mesh.read_text().split()[0])
    assert data["vertices"] == nv
    assert len(field_.read_text().splitlines()) == nv + 1


def test_slice_check_requires_degenerate(square, capsys):
    assert run(["slice-check", "--shape", square, "--anis", '{"kind": "euclidean"}', "--p", "2"]) == 2


def test_verify_exit_and_determinism(tmp_path, capsys):
    a, b, text = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "r.txt"
    assert run(["verify", "--suite", "T4", "--out", str(a), "--text", str(text)]) == 0
    assert run(["verify", "--suite", "T4", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert text.read_text().startswith("suite T4: 7/7 passed")


def test_verify_rejects_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("fem_rel = -1\n")
    assert run(["verify", "--suite", "blowup", "--config", str(cfg)]) == 2


def test_verify_failed_suite_exits_1(tmp_path, capsys):
    cfg = tmp_path / "coarse.ini"
    cfg.write_text("[T3]\nh = 0.5\n")
    assert run(["verify", "--suite", "T3", "--config", str(cfg)]) == 1
    data = _json(capsys)
    assert data["reports"][0]["summary"]["errored"] > 0


@pytest.mark.parametrize("argv", [
    [],
    ["nope"],
    ["lambda", "--shape", "x.json"],
    ["gen-shape", "rotated_rect", "a=1", "b=1", "phi=30deg"],
    ["gen-shape", "rect", "a"],
    ["gen-shape", "hexagon"],
    ["gen-shape", "rect", "a=1", "b=1", "c=2"],
    ["gen-shape", "rect", "a=-1", "b=1"],
    ["classify", "--anis", "{not json"],
    ["classify", "--anis", '{"kind": "directional", "c": 1, "theta_deg": 30}'],
    ["classify", "--anis", '{"kind": "directional", "c": 1, "theta": "30"}'],
    ["classify", "--anis", '{"kind": "spiral"}'],
    ["blowup", "--anis", '{"kind": "euclidean"}', "--p", "two"],
    ["blowup", "--anis", '{"kind": "euclidean"}', "--p", "1"],
    ["lambda-min", "--shape", "/nonexistent/shape.json", "--p", "2"],
    ["verify", "--suite", "T9"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert run(argv) == 2
    assert capsys.readouterr().err


def test_computation_error_exits_1(tmp_path, capsys):
    star = tmp_path / "star.json"
    star.write_text('{"generator": "star", "m": 10}')
    assert run(["lambda-max", "--shape", str(star), "--p", "2"]) == 1
    assert "MeshFailure" in capsys.readouterr().err


def test_unwritable_output_exits_2(square, capsys):
    assert run(["width-profile", "--shape", square, "--out", "/nonexistent/dir/w.json"]) == 2


def test_dumps_formats_floats():
    assert dumps({"a": 0.1, "b": float("inf"), "c": [1, True, None]}) == '{"a": 0.10000000000000001, "b": null, "c": [1, true, null]}\n'
    assert json.loads(dumps(1.0 / 3)) == 1.0 / 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "anisospec", "classify", "--anis", '{"kind": "euclidean"}'],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["kind"] == "positive"
    assert "positive" in proc.stderr


def test_width_profile_json(tmp_path, square, capsys):
    out = tmp_path / "w.json"
    assert run(["width-profile", "--shape", square, "--n", "64", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert len(data["thetas"]) == len(data["values"]) == 64
    assert data["sup_width"] == pytest.approx(math.sqrt(2))
