import csv
import hashlib
import json
import math

import numpy as np
import pytest

from helixdm.dynamics import SubspaceMatrix, TimeSeries
from helixdm.expcli import (
    ConfigError,
    _parse_angle,
    emit_csv,
    main,
    make_config,
    read_config_file,
    run,
)
from helixdm.magnon import DosCurve


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_timeseries_schema(tmp_path):
    ts = TimeSeries(np.array([0.0, 0.1]), np.array([1.0, 0.5]), np.zeros((2, 2, 3)), np.array([0.0, 0.25]))
    rows = read_csv(emit_csv(ts, tmp_path / "ts.csv"))
    assert rows[0] == ["t", "fidelity", "log_norm", "h_x_1", "h_y_1", "h_z_1", "h_x_2", "h_y_2", "h_z_2"]
    assert rows[2][:3] == ["0.10000000000000001", "0.5", "0.25"]


def test_dos_and_matrix_schema(tmp_path):
    rows = read_csv(emit_csv(DosCurve(np.array([0.0]), np.array([0.1]), "analytic"), tmp_path / "d.csv"))
    assert rows == [["E", "dos", "kind"], ["0", "0.10000000000000001", "analytic"]]
    m = SubspaceMatrix(np.array([[0, 0], [1 + 2j, 0]]))
    rows = read_csv(emit_csv(m, tmp_path / "m.csv"))
    assert rows[0] == ["row", "col", "re", "im"]
    assert rows[3] == ["1", "0", "1", "2"]
    assert b"\r" not in (tmp_path / "m.csv").read_bytes()


def test_emit_unknown_type(tmp_path):
    with pytest.raises(TypeError):
        emit_csv([1, 2], tmp_path / "x.csv")


def test_parse_angle():
    assert _parse_angle("pi/3") == pytest.approx(math.pi / 3)
    assert _parse_angle("2*pi/5") == pytest.approx(2 * math.pi / 5)
    assert _parse_angle("-pi") == pytest.approx(-math.pi)
    assert _parse_angle("0.5") == 0.5
    with pytest.raises(ValueError):
        _parse_angle("__import__('os')")


def test_config_file(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("# chain\nn_sites = 6\nq_n = 2  # 2 pi 2 / 6\ntheta = pi/4\nlambda_list = 0, 1\n")
    vals = read_config_file(path)
    assert vals == {"n_sites": 6, "q_n": 2, "theta": pytest.approx(math.pi / 4), "lambda_list": [0.0, 1.0]}
    cfg = make_config("fig2_fidelity_sweep", vals, {"lam": 2.0, "n_bins": None})
    assert cfg.n_sites == 6 and cfg.lam == 2.0 and cfg.t_max == 50.0
    path.write_text("bogus = 1\n")
    with pytest.raises(ConfigError):
        read_config_file(path)
    path.write_text("n_sites 6\n")
    with pytest.raises(ConfigError):
        read_config_file(path)


def test_make_config_errors():
    with pytest.raises(ConfigError):
        make_config("fig9")
    with pytest.raises(ConfigError):
        make_config("fig1_helix", overrides={"kappa": -1.0})
    with pytest.raises(ConfigError):
        make_config("fig1_helix", overrides={"t_max": 1.0, "dt": 0.3})
    with pytest.raises(ConfigError):
        make_config("fig3_band_dos", overrides={"n_k": 10})


def test_fig1_run_manifest_and_reproducible(tmp_path):
    over = {"n_sites": 6, "q_n": 2, "t_max": 2.0, "dt": 0.5}
    a = run(make_config("fig1_helix", overrides={**over, "output_dir": str(tmp_path / "a")}))
    b = run(make_config("fig1_helix", overrides={**over, "output_dir": str(tmp_path / "b")}))
    assert a["passed"]
    assert [f["path"] for f in a["files"]] == ["helix_phi.csv", "helix_phibar.csv"]
    for fa, fb in zip(a["files"], b["files"]):
        data = (tmp_path / "a" / fa["path"]).read_bytes()
        assert hashlib.sha256(data).hexdigest() == fa["sha256"]
        assert data == (tmp_path / "b" / fb["path"]).read_bytes()
    on_disk = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert on_disk["config"]["n_sites"] == 6 and on_disk["library_version"]
    rows = read_csv(tmp_path / "a" / "helix_phi.csv")
    assert len(rows) == 6 and len(rows[0]) == 3 + 3 * 6


def test_fig2_sweep_onsets(tmp_path):
    cfg = make_config("fig2_fidelity_sweep", overrides={"t_max": 5.0, "lambda_list": [0, 0.5, 1, 2],
                                                         "jobs": 2, "output_dir": str(tmp_path)})
    m = run(cfg)
    assert m["passed"]
    rows = read_csv(tmp_path / "onset.csv")
    assert rows[0] == ["lambda", "onset_time"]
    assert rows[1][1] == "nan"
    onsets = [float(r[1]) for r in rows[2:]]
    assert onsets == sorted(onsets, reverse=True) and len(set(onsets)) == 3


def test_fig3_outputs(tmp_path):
    m = run(make_config("fig3_band_dos", overrides={"output_dir": str(tmp_path), "plot_script": True}))
    assert m["passed"]
    names = {f["path"] for f in m["files"]}
    assert {"dos_histogram_lambda_1.csv", "dos_zero.csv", "plot.py"} <= names
    rows = read_csv(tmp_path / "dos_histogram_lambda_5.csv")
    assert rows[0] == ["E", "dos", "kind"] and rows[1][2] == "histogram"


def test_main_exit_codes(tmp_path, capsys):
    assert main(["run", "fig1_helix", "--n-sites", "6", "--q-n", "2", "--t-max", "2", "--dt", "0.5",
                 "--out", str(tmp_path / "ok")]) == 0
    assert "PASS phi_fidelity_unity" in capsys.readouterr().out
    # p != q breaks the zero-energy property, so the built-in checks fail
    assert main(["run", "fig1_helix", "--n-sites", "6", "--q-n", "2", "--p-n", "1", "--t-max", "2",
                 "--dt", "0.5", "--out", str(tmp_path / "bad")]) == 1
    assert "FAIL phi_fidelity_unity" in capsys.readouterr().out
    assert main(["run", "fig1_helix", "--kappa", "-1", "--out", str(tmp_path / "cfg")]) == 2
    assert main(["run", "fig1_helix", "--config", str(tmp_path / "missing.txt")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["run", "fig9"])
    assert exc.value.code == 2


def test_validate_subcommand(tmp_path, capsys):
    assert main(["validate", "--n-sites", "4", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "model.sz_conservation[N=4]" in out
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["passed"] and len(manifest["assertions"]) > 15


def test_invariant_suite_default_sizes():
    from helixdm.validation import run_invariants

    results = run_invariants()
    failed = [name for name, ok, _ in results if not ok]
    assert not failed
    for n in (4, 6, 10):
        assert any(name.endswith(f"[N={n}]") for name, _, _ in results)
