import json

import numpy as np
import pytest

from gssym import catalog
from gssym.cli import main


def _classify(capsys, F, G):
    code = main(["classify", "--F", F, "--G", G])
    return code, capsys.readouterr()


def _load(path):
    data = np.genfromtxt(path, delimiter=",", names=True)
    return data, json.loads(path.with_suffix(".json").read_text())


def test_classify_case_a(capsys):
    code, io = _classify(capsys, "psi^3", "psi^2")
    d = json.loads(io.out)
    assert code == 0 and d["tag"] == "a" and d["q"] == 1


def test_classify_rotation(capsys):
    code, io = _classify(capsys, "0", "8*psi^3")
    d = json.loads(io.out)
    assert code == 0 and "conditional-rotation" in [c["tag"] for c in d["classes"]]
    rot = next(c for c in d["classes"] if c["tag"] == "conditional-rotation")
    assert rot["beta"] == 3


def test_classify_malformed_reports_position(capsys):
    code, io = _classify(capsys, "psi^^3", "psi^2")
    assert code == 2 and "position" in io.err


def test_classify_no_class(capsys):
    code, io = _classify(capsys, "sin(psi)", "psi^2")
    assert code == 3 and json.loads(io.out)["tag"] == "none"


def test_solution_writes_grid_and_metadata(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["solution", "--family", "dshape", "--lambda", "1", "--A", "-1", "--sigma", "-0.5",
                 "--shift-z0", "--nr", "21", "--nz", "23", "--out", str(out)]) == 0
    header = out.read_text().splitlines()[0]
    assert header == "r,z,psi,valid"
    data, meta = _load(out)
    assert len(data) == 21 * 23
    assert meta["family"] == "dshape" and meta["params"]["sigma"] == -0.5
    assert meta["residual"]["max_rel"] <= 1e-9 and "formula" in meta
    sol = catalog.instantiate("dshape", lam=1, A=-1, sigma=-0.5, shift_z0=True)
    ok = data["valid"] == 1
    np.testing.assert_allclose(data["psi"][ok], sol(data["r"][ok], data["z"][ok]), rtol=1e-15)


def test_solution_csv_has_17_digits(tmp_path):
    out = tmp_path / "s.csv"
    main(["solution", "--family", "sqrt_r", "--nr", "5", "--nz", "5", "--out", str(out)])
    row = out.read_text().splitlines()[2].split(",")
    assert float(row[0]) == catalog.instantiate("sqrt_r").box[0] or len(row[2].replace(".", "").lstrip("-0")) >= 15


def test_gate_failure_writes_nothing(tmp_path):
    out = tmp_path / "bad.csv"
    code = main(["solution", "--family", "log_cyl", "--a", "2", "--b", "3", "--unchecked", "--out", str(out)])
    assert code == 4 and not out.exists() and not out.with_suffix(".json").exists()


def test_constraint_violation_exit_code(tmp_path):
    assert main(["solution", "--family", "log_cyl", "--a", "2", "--b", "3", "--out", str(tmp_path / "x.csv")]) == 2


def test_bad_grid_is_rejected(tmp_path):
    assert main(["solution", "--family", "dshape", "--nr", "4", "--out", str(tmp_path / "x.csv")]) == 2


_BOX = ["--r-min", "0.3", "--r-max", "1.6", "--z-min", "-1.2", "--z-max", "0.6", "--nr", "41", "--nz", "37"]


def test_map_matches_solution_file(tmp_path):
    a, b = tmp_path / "map.csv", tmp_path / "sol.csv"
    assert main(["map", "--exceptional", "--lambda", "1", *_BOX, "--out", str(a)]) == 0
    assert main(["solution", "--family", "dshape", "--lambda", "1", "--A", "-1", "--sigma", "-1", *_BOX,
                 "--out", str(b)]) == 0
    da, _ = _load(a)
    db, _ = _load(b)
    np.testing.assert_array_equal(da["valid"], db["valid"])
    ok = db["valid"] == 1
    assert np.max(np.abs(da["psi"][ok] - db["psi"][ok])) <= 1e-12


def test_reduce_fig1(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["reduce", "--class", "a", "--q", "1", "--a", "-1", "--b", "1", "--out", str(out)]) == 0
    table = np.genfromtxt(tmp_path / "r_table.csv", delimiter=",", names=True)
    assert table.dtype.names == ("y", "w", "dw")
    # leading branch w ~ y^(2q+2) f(y) with f(0) = 1
    y0, w0 = table["y"][0], table["w"][0]
    assert w0 / y0**4 == pytest.approx(1.0, rel=1e-9)
    data, meta = _load(out)
    assert len(data) == 81 * 81
    assert meta["ode_residual"] <= 1e-8 and "fd_residual" in meta


def test_reduce_without_class_parses_profiles(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["reduce", "--F=-psi^3", "--G=psi^2", "--nr", "21", "--nz", "21", "--out", str(out)]) == 0


def test_fields_writes_q_table(tmp_path):
    out = tmp_path / "f.csv"
    assert main(["fields", "--family", "dshape", "--nr", "41", "--nz", "41", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "r,z,psi,valid,p,i"
    q = np.genfromtxt(tmp_path / "f_q.csv", delimiter=",", names=True)
    assert len(q) == 8 and np.all(np.diff(q["q_contour"]) < 0)


def test_figure_fig4(tmp_path):
    assert main(["figure", "fig4", "--out-dir", str(tmp_path)]) == 0
    data, meta = _load(tmp_path / "fig4.csv")
    ok = data["valid"] == 1
    assert np.all(data["psi"][ok] > 0.4)
    assert np.all(np.isfinite(data["p"][ok])) and np.all(data["p"][ok] >= 0)
    np.testing.assert_allclose(data["i"][ok], 1 / (2 * data["psi"][ok]), rtol=1e-14)
    assert (tmp_path / "fig4_q.csv").exists()


@pytest.mark.parametrize("which, files", [
    ("fig1", ["fig1.csv", "fig1_table.csv"]),
    ("fig2", ["fig2.csv"]),
    ("fig3", ["fig3_sigma-0.5.csv", "fig3_sigma-1.csv", "fig3_sigma-5.csv"]),
])
def test_figures_emit(tmp_path, which, files):
    assert main(["figure", which, "--out-dir", str(tmp_path)]) == 0
    for f in files:
        assert (tmp_path / f).exists()
        if not f.endswith("_table.csv"):
            assert (tmp_path / f).with_suffix(".json").exists()


def test_config_file(tmp_path):
    cfg = tmp_path / "run.json"
    out = tmp_path / "c.csv"
    cfg.write_text(json.dumps({"command": "solution", "family": "dshape", "sigma": -5, "shift-z0": True,
                               "nr": 11, "nz": 11, "out": str(out)}))
    assert main(["--config", str(cfg)]) == 0
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["params"]["sigma"] == -5 and meta["params"]["shift_z0"] is True


def test_config_flag_wins(tmp_path):
    cfg = tmp_path / "run.json"
    out = tmp_path / "c.csv"
    cfg.write_text(json.dumps({"command": "solution", "family": "dshape", "sigma": -5, "out": str(out)}))
    assert main(["--config", str(cfg), "solution", "--sigma", "-0.5", "--nr", "9", "--nz", "9"]) == 0
    assert json.loads(out.with_suffix(".json").read_text())["params"]["sigma"] == -0.5


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "solution", "family": "dshape", "colour": "red"}))
    assert main(["--config", str(cfg)]) == 2


def test_env_seed(tmp_path, monkeypatch):
    out = tmp_path / "e.csv"
    monkeypatch.setenv("GS_SEED", "7")
    main(["solution", "--family", "dshape", "--nr", "9", "--nz", "9", "--out", str(out)])
    assert json.loads(out.with_suffix(".json").read_text())["seed"] == 7


def test_repeat_runs_are_identical(tmp_path):
    for d in ("a", "b"):
        main(["solution", "--family", "weak_cubic", "--nr", "31", "--nz", "31", "--out", str(tmp_path / d / "w.csv")])
    assert (tmp_path / "a/w.csv").read_bytes() == (tmp_path / "b/w.csv").read_bytes()
    assert (tmp_path / "a/w.json").read_bytes() == (tmp_path / "b/w.json").read_bytes()
