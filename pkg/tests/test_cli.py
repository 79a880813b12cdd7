import json

import pytest

from ergokit import cli
from ergokit.errors import InvariantViolation


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


DIAGRAM = {
    "kind": "energy_entropy_diagram",
    "rho": {"matrix": [[[0.8, 0], [0, 0], [0, 0]], [[0, 0], [0.03, 0], [0, 0]], [[0, 0], [0, 0], [0.17, 0]]]},
    "h": {"diagonal": [0, 0, 1]},
    "samples": 50,
    "seed": 5,
}


def test_diagram_success(tmp_path, capsys):
    config = write_config(tmp_path, DIAGRAM)
    out = tmp_path / "diagram.csv"
    assert cli.main(["diagram", "--config", config, "--out", str(out)]) == 0
    assert out.exists()
    assert "wrote" in capsys.readouterr().out


def test_overrides_change_output(tmp_path):
    config = write_config(tmp_path, DIAGRAM)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["diagram", "--config", config, "--out", str(out1), "--seed", "1", "--samples", "20"]) == 0
    assert cli.main(["diagram", "--config", config, "--out", str(out2), "--seed", "2", "--samples", "20"]) == 0
    assert out1.read_bytes() != out2.read_bytes()


def test_validation_error_exits_1(tmp_path, capsys):
    config = write_config(tmp_path, {"kind": "nope"})
    assert cli.main(["diagram", "--config", config]) == 1
    assert "error:" in capsys.readouterr().err


def test_missing_config_exits_1(tmp_path, capsys):
    assert cli.main(["sweep", "--config", str(tmp_path / "absent.json")]) == 1
    assert "error" in capsys.readouterr().err


def test_kind_mismatch_exits_1(tmp_path, capsys):
    config = write_config(tmp_path, DIAGRAM)
    assert cli.main(["sweep", "--config", config, "--out", str(tmp_path / "x.csv")]) == 1
    assert "expected beta_sweep" in capsys.readouterr().err


def test_missing_output_path_exits_1(tmp_path, capsys):
    config = write_config(tmp_path, DIAGRAM)
    assert cli.main(["diagram", "--config", config]) == 1
    assert "output_path" in capsys.readouterr().err


def test_invariant_violation_exits_2(tmp_path, capsys, monkeypatch):
    def explode(cfg):
        raise InvariantViolation("synthetic breakage")

    monkeypatch.setitem(cli._RUNNERS, "diagram", (cli.ExperimentKind.ENERGY_ENTROPY_DIAGRAM, explode))
    config = write_config(tmp_path, DIAGRAM)
    assert cli.main(["diagram", "--config", config, "--out", str(tmp_path / "x.csv")]) == 2
    assert "invariant violation" in capsys.readouterr().err


def test_classify_prints_single_line_json(tmp_path, capsys):
    config = write_config(
        tmp_path,
        {
            "kind": "crossing_classify",
            "h": {"diagonal": [0, 0.5, 1]},
            "h_prime": {"diagonal": [0, 0.1, 0.2]},
            "beta_grid": {"min": 0.01, "max": 50, "points": 100, "log": True},
        },
    )
    out = tmp_path / "report.json"
    assert cli.main(["classify", "--config", config, "--out", str(out)]) == 0
    printed = capsys.readouterr().out.strip()
    assert printed.count("\n") == 0
    report = json.loads(printed)
    assert report["pattern"] == "one_cross_increasing"
    assert out.read_text().strip() == printed


def test_check_subcommand_is_deterministic(capsys):
    assert cli.main(["check", "--seed", "7"]) == 0
    first = capsys.readouterr().out
    assert cli.main(["check", "--seed", "7"]) == 0
    second = capsys.readouterr().out
    assert first == second
    assert first.strip().endswith("checks, seed=7")
    assert "FAIL" not in first
