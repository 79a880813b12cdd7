"""Acceptance: render the three reference CSVs; byte-stable re-renders.

The CSVs are produced by the ergokit CLI (the only interface this package
consumes) from the reference configs shipped in the repository root.
"""

import pathlib
import subprocess
import sys

import pytest

from ergoplot import cli
from ergoplot.render import FigureSpec, render

CONFIGS = pathlib.Path(__file__).resolve().parents[2] / "configs"

REFERENCE = {
    "diagram": ("fig2_diagram.json", {
        "initial", "unital_sample", "feedback_sample", "gibbs_curve",
        "gibbs_endpoint", "degenerate_border", "ergotropy_line",
        "charging_line", "initial_entropy",
    }),
    "sweep": ("fig5_sweep.json", {
        "free_energy_gain", "unital_lower", "unital_upper",
        "nonunital_lower", "nonunital_upper", "unital_sample", "feedback_sample",
    }),
    "scatter": ("fig7_scatter.json", {
        "unital_sample", "feedback_sample", "max_entropy_boundary",
        "unital_lower", "unital_upper", "free_energy_gain", "zero_entropy_gain",
    }),
}


@pytest.fixture(scope="module")
def reference_csvs(tmp_path_factory):
    root = tmp_path_factory.mktemp("reference")
    paths = {}
    for subcommand, (config, _) in REFERENCE.items():
        out = root / f"{subcommand}.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "ergokit.cli", subcommand,
             "--config", str(CONFIGS / config), "--out", str(out)],
            capture_output=True,
            text=True,
            timeout=300,
        )
        assert proc.returncode == 0, proc.stderr
        paths[subcommand] = out
    return paths


@pytest.mark.parametrize("kind", list(REFERENCE))
def test_criterion_11_reference_render(kind, reference_csvs, tmp_path):
    expected_series = REFERENCE[kind][1]
    out = tmp_path / f"{kind}.png"
    result = render(FigureSpec(input_csv=str(reference_csvs[kind]), output_image=str(out)))
    assert result.figure_kind.value == kind
    assert set(result.series_drawn) >= expected_series
    assert out.stat().st_size > 0

    again = tmp_path / f"{kind}_again.png"
    render(FigureSpec(input_csv=str(reference_csvs[kind]), output_image=str(again)))
    assert out.read_bytes() == again.read_bytes()
    print(f"PASS criterion 11 ({kind}): series {sorted(result.series_drawn)}; re-render byte-stable")


def test_cli_end_to_end(reference_csvs, tmp_path, capsys):
    out = tmp_path / "diagram.png"
    assert cli.main(["--in", str(reference_csvs["diagram"]), "--out", str(out)]) == 0
    assert out.exists()
    assert "wrote" in capsys.readouterr().out


def test_cli_kind_mismatch(reference_csvs, tmp_path, capsys):
    assert cli.main(["--in", str(reference_csvs["sweep"]), "--out", str(tmp_path / "x.png"), "--kind", "diagram"]) == 1
    assert "does not match" in capsys.readouterr().err


def test_cli_missing_input(tmp_path, capsys):
    assert cli.main(["--in", str(tmp_path / "absent.csv"), "--out", str(tmp_path / "x.png")]) == 1
    assert "error" in capsys.readouterr().err
