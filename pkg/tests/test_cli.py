import json
import math
import subprocess
import sys

import pytest

from mercator.cli import main
from mercator.render import Mesh


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_euler(capsys):
    assert run(capsys, "euler", "--count", "4") == (0, '["1","1","5","61","1385"]\n', "")


def test_coeffs_json(capsys):
    code, out, _ = run(capsys, "coeffs", "--series", "lambda-inv", "--order", "5")
    assert code == 0
    assert json.loads(out) == {
        "order": 5,
        "coefficients": [
            {"n": 1, "value": "1"},
            {"n": 3, "value": "-1/6"},
            {"n": 5, "value": "1/24"},
        ],
    }


def test_coeffs_group_law_csv(capsys):
    code, out, _ = run(capsys, "coeffs", "--series", "group-law", "--order", "3", "--format", "csv")
    assert code == 0
    assert out == "i,j,value\n0,1,1\n1,0,1\n1,2,-1/2\n2,1,-1/2\n"


def test_gd(capsys):
    assert run(capsys, "gd", "--eval", "0")[1] == "0\n"
    assert run(capsys, "gd", "--eval", str(math.pi / 2))[1] == "inf\n"
    assert run(capsys, "gd", "--eval", str(-math.pi / 2), "--formula", "log-tan-sec")[1] == "-inf\n"
    assert float(run(capsys, "gd", "--eval", "0.5")[1]) == pytest.approx(0.52223810327844033, abs=1e-16)
    assert run(capsys, "gd", "--eval", "inf", "--inverse")[1] == "1.5707963267948966\n"


def test_madd(capsys):
    code, out, _ = run(capsys, "madd", "--x", "0.3", "--y", "0")
    assert code == 0 and float(out) == pytest.approx(0.3, abs=1e-16)
    code, out, err = run(capsys, "madd", "--x", "1.5707963267948966", "--y", "-1.5707963267948966")
    assert code == 2 and out == "" and "puncture" in err


def test_rotate_single(capsys):
    code, out, _ = run(capsys, "rotate", "--v", "0.5", "--psi-tilde", "0")
    assert code == 0
    assert float(out) == math.asin(0.5)
    assert abs(float(out) - 0.52359877559829887) <= math.ulp(0.5)
    code, out, _ = run(capsys, "rotate", "--v", "0.8", "--psi", str(math.pi / 2 + 0.3), "--route", "taylor")
    assert float(out) == pytest.approx(0.78874301070752756, abs=1e-14)


def test_rotate_table(capsys):
    code, out, _ = run(capsys, "rotate", "--table", "0.5,0.9:-0.5,0,0.5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "v,nu,psi_tilde,phi_taylor,phi_fgl,abs_diff"
    assert len(lines) == 7


def test_rotate_errors(capsys):
    assert run(capsys, "rotate", "--v", "1.0", "--psi-tilde", "0")[0] == 2
    assert run(capsys, "rotate", "--v", "0.5", "--psi", "3.2")[0] == 2
    assert run(capsys, "rotate", "--v", "0.5")[0] == 1


def test_usage_errors(capsys):
    for argv in (["bogus"], ["euler"], ["euler", "--count", "3", "--frobnicate"], []):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 1
    assert "usage" in capsys.readouterr().err


def test_output_file(tmp_path, capsys):
    path = tmp_path / "e.json"
    assert main(["euler", "--count", "2", "-o", str(path)]) == 0
    assert path.read_text() == '["1","1","5"]\n'


def test_render_svg(tmp_path, capsys):
    out = tmp_path / "frames"
    code, _, _ = run(
        capsys, "render", "--v", "0.8", "--y0", "30", "--mesh", "cube",
        "--sight-angles=-0.5,0,0.5", "--mode", "svg", "--oracle", "--out", str(out),
    )
    assert code == 0
    assert sorted(p.name for p in out.iterdir()) == [
        "frame_0000.svg", "frame_0001.svg", "frame_0002.svg", "mismatch.csv",
    ]
    csv_lines = (out / "mismatch.csv").read_text().splitlines()
    assert csv_lines[0] == "psi_tilde,T,mismatch,phi_predicted"
    assert len(csv_lines) == 4
    assert 'stroke="red"' in (out / "frame_0001.svg").read_text()


def test_render_ppm_mesh_file(tmp_path, capsys):
    mesh_path = tmp_path / "tet.json"
    Mesh(
        [[0, 0, 0.5], [0.5, 0, -0.3], [-0.5, 0.2, -0.3], [0, -0.5, -0.3]],
        ((0, 1), (0, 2), (0, 3), (1, 2), (2, 3), (3, 1)),
    ).save(mesh_path)
    out = tmp_path / "ppm"
    code, _, _ = run(
        capsys, "render", "--v", "0.5", "--y0", "10", "--mesh", str(mesh_path),
        "--sight-angles", "0:0.6:3", "--mode", "ppm", "--width", "80", "--height", "60",
        "--subdivide", "2", "--out", str(out),
    )
    assert code == 0
    data = (out / "frame_0002.ppm").read_bytes()
    assert data.startswith(b"P6\n80 60\n255\n") and len(data) == len(b"P6\n80 60\n255\n") + 80 * 60 * 3


def test_render_fixed_camera(tmp_path, capsys):
    code, _, _ = run(
        capsys, "render", "--v", "0.5", "--y0", "5", "--sight-angles", "0",
        "--fov", "40", "--out", str(tmp_path),
    )
    assert code == 0


def test_render_bad_inputs(tmp_path, capsys):
    base = ["render", "--y0", "10", "--sight-angles", "0", "--out", str(tmp_path)]
    assert run(capsys, *base, "--v", "1.2")[0] == 2
    assert run(capsys, *base, "--v", "0.5", "--mesh", str(tmp_path / "missing.json"))[0] == 1
    assert run(capsys, "render", "--v", "0", "--y0", "10", "--sight-angles", "0.4", "--out", str(tmp_path))[0] == 2


def test_verify_small(capsys):
    code, out, _ = run(capsys, "verify", "--order", "7", "--grid", "50")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "mercator verify: order=7 grid=50 seed=20080508"
    assert all(l.startswith("PASS") for l in lines[1:-1])
    assert lines[-1].endswith("checks passed")


def test_verify_reports_failure(monkeypatch, capsys):
    import mercator.verify as verify

    original = verify.build_checks

    def with_broken(*args):
        return original(*args) + [("broken", lambda: (False, "forced"))]

    monkeypatch.setattr(verify, "build_checks", with_broken)
    code, out, _ = run(capsys, "verify", "--order", "5", "--grid", "10")
    assert code == 3
    assert "FAIL broken: forced" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mercator", "madd", "--x", "-1.5707963267948966", "--y", "1.5707963267948966"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2 and "puncture" in proc.stderr
    proc = subprocess.run([sys.executable, "-m", "mercator", "euler", "--count", "5"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == '["1","1","5","61","1385","50521"]\n'


def test_idempotent(capsys):
    first = run(capsys, "rotate", "--table", "0.1,0.5,0.95:-1.4,0,1.4")
    second = run(capsys, "rotate", "--table", "0.1,0.5,0.95:-1.4,0,1.4")
    assert first == second
