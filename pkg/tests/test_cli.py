import csv
import json
import math
import os

import pytest

from conftest import worker_count
from sirsched import analytic
from sirsched.cli import (
    PRESET_DEFAULTS,
    ExperimentConfig,
    json_text,
    main,
    probing_threshold_schedule,
    run_experiment,
    validate_suite,
)

WORKERS = worker_count()


def _grid(start, stop, step):
    count = int(round((stop - start) / step)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))


def test_preset_defaults_are_frozen():
    # Changing any default is a breaking change; this is the golden copy.
    window = {"outer_min": 0.0, "outer_max": 600.0, "inner_min": 200.0, "inner_max": 400.0}
    assert PRESET_DEFAULTS == {
        "capacity-vs-gamma1": {
            "lambda0": 0.0025, "d": 10.0, "alpha": 4.0, "beta": 2.5,
            "sir_error_variance": 0.0, "gamma1_grid": _grid(0.0, 4.0, 0.25),
            "realizations": 2000, "seed": 0, **window,
        },
        "capacity-vs-density": {
            "gamma1": 0.6, "d": 10.0, "alpha": 4.0, "beta": 2.5,
            "lambda0_grid": _grid(0.0005, 0.006, 0.0005),
            "realizations": 2000, "seed": 0, **window,
        },
        "scheme-comparison": {
            "gamma1": 0.4, "channel_threshold": 0.4, "d": 10.0, "alpha": 4.0,
            "beta": 2.5, "lambda0_grid": _grid(0.001, 0.0055, 0.0005),
            "realizations": 2000, "seed": 0, **window,
        },
        "sir-error": {
            "gamma1": 0.4, "sir_error_variance": 0.01, "d": 10.0, "alpha": 4.0,
            "beta": 2.5, "lambda0_grid": _grid(0.0005, 0.006, 0.0005),
            "realizations": 2000, "seed": 0, **window,
        },
        "gamma-surface": {
            "lambda0": 0.0065, "d": 10.0, "alpha": 4.0, "beta": 2.0,
            "gamma_step": 0.05, "realizations": 2000, "seed": 0, **window,
        },
        "probing-tradeoff": {
            "lambda0": 0.0065, "d": 10.0, "alpha": 4.0, "beta": 2.0,
            "slot_duration": 1.0, "tau_values": (0.0, 0.04),
            "gamma_start": 0.01, "gamma_increment": 0.01, "max_stages": 19,
            "realizations": 2000, "seed": 0, **window,
        },
    }


def test_probing_threshold_schedule():
    ladder = probing_threshold_schedule(19)
    assert ladder[:5] == (0.01, 0.03, 0.06, 0.1, 0.15)
    assert len(ladder) == 19
    assert ladder[-1] == 1.9  # last stage below beta=2
    assert all(b > a for a, b in zip(ladder, ladder[1:]))
    # One more stage would cross beta=2 and the builder must refuse it.
    assert probing_threshold_schedule(20)[-1] == 2.1
    with pytest.raises(ValueError, match="exceeds beta"):
        run_experiment(
            ExperimentConfig(
                preset="probing-tradeoff",
                overrides={"max_stages": "20", "realizations": "1"},
                output_path="/tmp/never-written.csv",
            )
        )


def test_capacity_vs_gamma1_csv(tmp_path):
    out = tmp_path / "gamma1.csv"
    config = ExperimentConfig(
        preset="capacity-vs-gamma1",
        overrides={"gamma1_grid": "0:4:1", "realizations": "200"},
        output_path=str(out),
        format="csv",
    )
    result = run_experiment(config, workers=WORKERS)
    assert result.columns == [
        "gamma1", "mc_mean", "mc_stderr", "analytic_reference",
        "analytic_high_threshold", "analytic_integral", "analytic_closedform",
        "analytic_conventional",
    ]
    lines = out.read_text().splitlines()
    assert lines[0] == "# seed=0, realizations=200, version=0.1.0"
    rows = list(csv.DictReader(lines[1:]))
    assert [r["gamma1"] for r in rows] == ["0.0", "1.0", "2.0", "3.0", "4.0"]
    # At a zero threshold the scheme is the unscheduled reference, so the
    # Monte Carlo must sit within three standard errors of its closed form.
    zero = rows[0]
    gap = abs(float(zero["mc_mean"]) - float(zero["analytic_reference"]))
    assert gap < 3.0 * float(zero["mc_stderr"])
    # Approximation columns apply only strictly between 0 and beta.
    assert zero["analytic_integral"] == ""
    assert rows[1]["analytic_integral"] != ""
    assert rows[3]["analytic_integral"] == ""
    assert rows[3]["analytic_high_threshold"] != ""
    assert any(line.startswith("argmax mc_mean") for line in result.summary)


def test_json_round_trip_is_byte_identical(tmp_path):
    out = tmp_path / "surface.json"
    config = ExperimentConfig(
        preset="gamma-surface",
        overrides={"gamma_step": "1.0", "realizations": "30"},
        output_path=str(out),
        format="json",
    )
    run_experiment(config, workers=1)
    raw = out.read_text()
    assert json_text(json.loads(raw)) == raw


def test_schema_does_not_depend_on_values(tmp_path):
    columns = []
    for seed, lam_grid in ((0, "0.001,0.002"), (5, "0.0005")):
        config = ExperimentConfig(
            preset="scheme-comparison",
            overrides={"lambda0_grid": lam_grid, "realizations": "20", "seed": str(seed)},
            output_path=str(tmp_path / f"cmp{seed}.csv"),
        )
        columns.append(run_experiment(config).columns)
    assert columns[0] == columns[1] == [
        "lambda0",
        "mc_sir_threshold_mean", "mc_sir_threshold_stderr",
        "mc_probability_mean", "mc_probability_stderr",
        "mc_channel_threshold_mean", "mc_channel_threshold_stderr",
        "mc_reference_mean", "mc_reference_stderr",
        "analytic_reference",
    ]


def test_sir_error_and_density_schemas(tmp_path):
    config = ExperimentConfig(
        preset="sir-error",
        overrides={"lambda0_grid": "0.001", "realizations": "20"},
        output_path=str(tmp_path / "err.csv"),
    )
    assert run_experiment(config).columns == [
        "lambda0", "mc_error_free_mean", "mc_error_free_stderr",
        "mc_with_errors_mean", "mc_with_errors_stderr", "analytic_reference",
    ]
    config = ExperimentConfig(
        preset="capacity-vs-density",
        overrides={"lambda0_grid": "0.002,0.003", "realizations": "20"},
        output_path=str(tmp_path / "dens.csv"),
    )
    assert run_experiment(config).columns == [
        "lambda0", "mc_proposed_mean", "mc_proposed_stderr", "mc_reference_mean",
        "mc_reference_stderr", "analytic_reference", "analytic_integral",
        "analytic_closedform", "analytic_conventional",
    ]


def test_invalid_preset_and_override_key(tmp_path):
    with pytest.raises(ValueError, match="unknown preset"):
        run_experiment(ExperimentConfig(preset="nope", output_path=str(tmp_path / "x.csv")))
    with pytest.raises(ValueError, match="valid keys"):
        run_experiment(
            ExperimentConfig(
                preset="gamma-surface",
                overrides={"bogus_knob": "1"},
                output_path=str(tmp_path / "x.csv"),
            )
        )
    with pytest.raises(ValueError, match="format"):
        run_experiment(
            ExperimentConfig(
                preset="gamma-surface", output_path=str(tmp_path / "x.csv"), format="xml"
            )
        )


def test_main_reports_unwritable_path(capsys):
    code = main(
        [
            "simulate", "--preset", "gamma-surface",
            "--set", "gamma_step=1.0", "--realizations", "5",
            "--out", "/nonexistent-dir/out.csv",
        ]
    )
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_main_simulate_with_config_file(tmp_path, capsys):
    config_file = tmp_path / "overrides.cfg"
    config_file.write_text("# comment\ngamma_step=1.0\nrealizations=500\n")
    out = tmp_path / "surface.csv"
    code = main(
        [
            "simulate", "--preset", "gamma-surface",
            "--config", str(config_file),
            "--set", "realizations=10",  # beats the config file
            "--seed", "3",
            "--out", str(out),
        ]
    )
    assert code == 0
    assert "wrote 9 rows" in capsys.readouterr().out
    assert out.read_text().startswith("# seed=3, realizations=10, version=")
    assert not any(name.endswith(".part") for name in os.listdir(tmp_path))


def test_validate_suite_passes_and_reports_runtimes():
    report = validate_suite(realizations=60, base_seed=7, workers=WORKERS)
    assert report.passed
    assert all(c.seconds >= 0.0 for c in report.checks)
    assert len(report.checks) == 9
    assert report.lines()[-1] == "overall: PASS"


def test_validate_suite_names_corrupted_constant():
    report = validate_suite(realizations=30, base_seed=7, rho_fn=lambda alpha: math.pi)
    failed = [c.name for c in report.checks if not c.passed]
    assert failed == ["reference success probability via interference cdf"]


def test_main_validate_exit_code(capsys):
    code = main(["validate", "--realizations", "30", "--workers", str(WORKERS)])
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("PASS") >= 9
