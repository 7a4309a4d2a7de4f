import csv
import io
import json

import numpy as np
import pytest

from spinshape.cli import main
from spinshape.config import ConfigError, RunConfig, from_flat, load_config


def test_defaults_round_trip():
    cfg = RunConfig()
    assert from_flat(cfg.to_flat()) == cfg
    assert cfg.params.gamma == 2.5 and cfg.make_grid().points == 2000


@pytest.mark.parametrize(
    "flat,key",
    [
        ({"gamma": -1.0}, "gamma"),
        ({"grid.points": 10}, "grid.points"),
        ({"grid.points": 2.5}, "grid.points"),
        ({"solver.scheme": "spectral"}, "solver.scheme"),
        ({"outputs.format": "xml"}, "outputs.format"),
        ({"colour": 1}, "colour"),
        ({"beta": "one"}, "beta"),
    ],
)
def test_invalid_config(flat, key):
    with pytest.raises(ConfigError) as err:
        from_flat(flat)
    assert err.value.key == key


def test_load_config_reports_line(tmp_path):
    path = tmp_path / "run.json"
    path.write_text('{\n  "gamma": 2.0,\n  "grid.points": 8\n}\n')
    with pytest.raises(ConfigError) as err:
        load_config(path)
    assert err.value.line == 3 and err.value.key == "grid.points"
    path.write_text('{"gamma": 2.0,,}')
    with pytest.raises(ConfigError) as err:
        load_config(path)
    assert err.value.line == 1


def read_csv(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_levels_command(capsys):
    assert main(["levels"]) == 0
    out = capsys.readouterr().out
    assert "# continuum_threshold: 4" in out
    rows = read_csv(out)
    assert [int(r["n"]) for r in rows] == [0, 1]
    assert float(rows[1]["energy"]) == pytest.approx(32 / 9, rel=1e-16)


def test_levels_broken(capsys, tmp_path):
    assert main(["levels", "--gamma", "0.5", "--beta", "2", "--out", str(tmp_path), "--format", "json"]) == 0
    data = json.loads((tmp_path / "levels.json").read_text())
    assert data["rows"] == [] and "broken" in data["meta"]["note"]


def test_spectrum_command(capsys):
    assert main(["spectrum", "--grid.points", "1000", "--plus"]) == 0
    rows = read_csv(capsys.readouterr().out)
    bound = [r for r in rows if r["sector"] == "minus" and r["bound"] == "true"]
    assert len(bound) == 4
    for r in bound:
        assert abs(float(r["error"])) < 5e-3


def test_config_error_exit(capsys, tmp_path):
    assert main(["levels", "--grid.points", "10"]) == 2
    assert "grid.points" in capsys.readouterr().err
    assert main(["levels", "--config", str(tmp_path / "missing.json")]) == 2


def test_wavefunction_command(tmp_path, capsys):
    assert main(["wavefunction", "--n", "1", "--member", "1", "--gnuplot", "--out", str(tmp_path),
                 "--zeromode.spacing", "0.02"]) == 0
    rows = read_csv((tmp_path / "wavefunction_n1_m1.csv").read_text())
    assert set(rows[0]) == {"z", "re_psi1", "im_psi1", "re_psi2", "im_psi2"}
    assert (tmp_path / "wavefunction_n1_m1.gp").exists()
    assert main(["wavefunction", "--n", "3", "--out", str(tmp_path)]) == 2


def test_verify_exit_codes(tmp_path, capsys):
    base = ["verify", "--grid.points", "1000", "--out", str(tmp_path)]
    assert main(base) == 0
    verdict = json.loads((tmp_path / "verdict.json").read_text())
    assert verdict["passed"] and len(verdict["checks"]) == 11
    assert main(base + ["--sabotage-printed-potential"]) == 4
    err = capsys.readouterr().err
    assert "FAIL" in err


def sign_changes(values):
    v = values[abs(values) > 1e-6 * abs(values).max()]
    return int((v[1:] * v[:-1] < 0).sum())


def test_wavefunction_decoupled_member(tmp_path):
    args = ["--gamma", "2.5", "--beta", "0", "--lambda", "0", "--zeromode.spacing", "0.02", "--out", str(tmp_path)]
    counts = []
    for n in (0, 1):
        assert main(["wavefunction", "--n", str(n), "--member", "1"] + args) == 0
        rows = read_csv((tmp_path / f"wavefunction_n{n}_m1.csv").read_text())
        second = [float(r["re_psi2"]) ** 2 + float(r["im_psi2"]) ** 2 for r in rows]
        assert max(second) == 0.0
        counts.append(sign_changes(np.array([float(r["re_psi1"]) for r in rows])))
    assert counts == [0, 1]
