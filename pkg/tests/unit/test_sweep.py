"""
Unit tests for sweep configuration, orchestration, CSV emission and the CLI
"""
import math

import numpy as np
import pandas as pd
import pytest

from backend.app.core.exceptions import (
    ConfigError,
    InvalidInputError,
    InvariantViolationError,
    OracleMismatchError,
    OutputError,
)
from backend.app.schemas.schemas import ColumnSet, MeasureRecord, SweepConfig
from backend.app.services import sweep as sweep_service
from backend.app.services.dynamics import JointDensity
from backend.app.services.sweep import (
    build_config,
    emit_csv,
    initial_field,
    load_config_file,
    run_sweep,
    time_average,
    time_grid,
)
from scripts.run_sweep import main as run_sweep_cli

STANDARD_HEADER = "t,negativity,mutual_entropy,s_atom,s_field,s_joint,classical_bound,truncation_mass_lost"


def _record(t, **overrides):
    values = dict(
        t=t, negativity=0.0, mutual_entropy=0.0, s_atom=0.0, s_field=0.0, s_joint=0.0,
        classical_bound=0.0, truncation_mass_lost=0.0,
    )
    values.update(overrides)
    return MeasureRecord(**values)


def _small_config(**overrides):
    values = dict(preset="fig3", n_points=6, t_end=3.0)
    values.update(overrides)
    preset = values.pop("preset")
    return build_config(preset=preset, overrides=values)


@pytest.fixture
def perturbed_oracle(monkeypatch):
    genuine = sweep_service.brute_force_state

    def perturbed(params, field0, t):
        rho = genuine(params, field0, t)
        a = rho.a.copy()
        a[0, 0] += 1e-4
        return JointDensity(a=a, b=rho.b, c=rho.c)

    monkeypatch.setattr(sweep_service, "brute_force_state", perturbed)


# Configuration

@pytest.mark.parametrize("name,delta,atom_ground_weight", [
    ("fig1", 0.0, 0.0),
    ("fig2", 0.0, 0.5),
    ("fig3", 5.0, 0.5),
    ("fig4", 10.0, 0.5),
    ("fig5", 10.0, 0.5),
])
def test_presets_carry_figure_parameters(name, delta, atom_ground_weight):
    config = build_config(preset=name)
    assert config.preset == name
    assert config.alpha_modulus == pytest.approx(math.sqrt(5.0))
    assert config.g == 1.0
    assert config.omega_A == 1.0
    assert config.delta == delta
    assert config.atom_ground_weight == atom_ground_weight


def test_fig5_emits_the_bound_pair():
    assert build_config(preset="fig5").columns == ColumnSet.BOUND_PAIR
    assert build_config(preset="fig4").columns == ColumnSet.STANDARD


def test_defaults_come_from_settings():
    config = SweepConfig()
    assert (config.t_start, config.t_end, config.n_points) == (0.0, 25.0, 1001)
    assert config.tail_tolerance == 1e-12
    assert config.buffer == 5
    assert config.oracle_stride == 10
    assert not config.oracle_check


def test_layers_override_in_order():
    config = build_config(
        preset="fig3",
        file_values={"delta": "7.5", "n-points": "11"},
        overrides={"n_points": 21},
    )
    assert config.delta == 7.5
    assert config.n_points == 21
    assert config.atom_ground_weight == 0.5


def test_squared_amplitude_replaces_preset_modulus():
    config = build_config(preset="fig1", overrides={"alpha_squared": 4.0})
    assert config.alpha_modulus == pytest.approx(2.0)


def test_alpha_phase():
    config = SweepConfig(alpha_modulus=2.0, alpha_phase=math.pi / 2)
    assert config.alpha == pytest.approx(2j)


def test_system_params_derive_field_frequency():
    params = build_config(preset="fig4").system_params()
    assert params.omega_F == pytest.approx(-9.0)
    assert params.atom_excited_weight == 0.5


def test_unknown_preset():
    with pytest.raises(ConfigError) as excinfo:
        build_config(preset="fig9")
    assert excinfo.value.fields == ["preset"]


def test_empty_time_window_rejected():
    with pytest.raises(ConfigError):
        build_config(overrides={"t_start": 2.0, "t_end": 2.0})


def test_invalid_fields_are_named():
    with pytest.raises(ConfigError) as excinfo:
        build_config(overrides={"n_points": 1, "atom_ground_weight": 1.5})
    assert excinfo.value.fields == ["atom_ground_weight", "n_points"]
    assert "n_points" in str(excinfo.value)


def test_unknown_field_rejected():
    with pytest.raises(ConfigError) as excinfo:
        build_config(overrides={"coupling": 2.0})
    assert "coupling" in excinfo.value.fields


def test_contradictory_amplitudes_rejected():
    with pytest.raises(ConfigError):
        build_config(overrides={"alpha_modulus": 1.0, "alpha_squared": 4.0})


def test_loose_tail_tolerance_rejected():
    with pytest.raises(ConfigError) as excinfo:
        build_config(preset="fig2", overrides={"tail_tolerance": 1e-3, "buffer": 1, "n_points": 3, "t_end": 1.0})
    assert excinfo.value.fields == ["tail_tolerance"]


def test_tail_tolerance_at_the_cap_still_sweeps():
    records = run_sweep(_small_config(preset="fig2", tail_tolerance=1e-7, buffer=1, n_points=3, t_end=1.0))
    assert len(records) == 3
    assert all(0.0 < r.truncation_mass_lost < 1e-7 for r in records)


def test_explicit_preset_beats_config_file_preset():
    config = build_config(preset="fig1", file_values={"preset": "fig5"})
    assert config.preset == "fig1"
    assert config.columns == ColumnSet.STANDARD
    assert config.atom_ground_weight == 0.0


def test_override_preset_beats_config_file_preset():
    config = build_config(file_values={"preset": "fig5", "n_points": "7"}, overrides={"preset": "fig2"})
    assert config.preset == "fig2"
    assert config.columns == ColumnSet.STANDARD
    assert config.n_points == 7


def test_config_file(tmp_path):
    path = tmp_path / "sweep.conf"
    path.write_text(
        "# detuned run\n"
        "preset = fig3\n"
        "delta = 2.5\n"
        "\n"
        "n-points = 51\n"
        "oracle_check = true\n"
    )
    values = load_config_file(str(path))
    assert values == {"preset": "fig3", "delta": "2.5", "n_points": "51", "oracle_check": "true"}

    config = build_config(file_values=values, overrides={"delta": 4.0})
    assert config.preset == "fig3"
    assert config.delta == 4.0
    assert config.n_points == 51
    assert config.oracle_check is True


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config_file(str(tmp_path / "absent.conf"))


# Sweep

def test_time_grid_and_field():
    config = _small_config()
    np.testing.assert_allclose(time_grid(config), [0.0, 0.6, 1.2, 1.8, 2.4, 3.0])
    field0 = initial_field(config)
    assert field0.truncation_mass_lost() < config.tail_tolerance


def test_run_sweep_returns_ordered_records():
    records = run_sweep(_small_config())
    assert [r.t for r in records] == pytest.approx([0.0, 0.6, 1.2, 1.8, 2.4, 3.0])
    assert records[0].negativity < 1e-10
    assert records[0].mutual_entropy < 1e-10
    assert all(r.truncation_mass_lost == records[0].truncation_mass_lost for r in records)


def test_thread_pool_gives_the_same_records():
    serial = run_sweep(_small_config(n_points=9))
    pooled = run_sweep(_small_config(n_points=9, workers=4))
    assert [r.t for r in pooled] == [r.t for r in serial]
    for first, second in zip(serial, pooled):
        assert first.negativity == pytest.approx(second.negativity, abs=1e-14)
        assert first.mutual_entropy == pytest.approx(second.mutual_entropy, abs=1e-14)


def test_oracle_check_passes():
    records = run_sweep(_small_config(oracle_check=True, oracle_stride=2))
    assert len(records) == 6


def test_oracle_mismatch_reports_time_and_values(perturbed_oracle):
    with pytest.raises(OracleMismatchError) as excinfo:
        run_sweep(_small_config(oracle_check=True))
    error = excinfo.value
    assert error.t == 0.0
    assert error.quantity == "rho[0,0]"
    assert error.delta == pytest.approx(1e-4, rel=1e-6)
    assert error.exit_code == 2
    assert "t=0.0" in str(error)


def test_time_average():
    records = [_record(t, negativity=t) for t in np.linspace(0.0, 4.0, 9)]
    assert time_average(records, "negativity") == pytest.approx(2.0)
    assert time_average(records, "negativity", t_min=2.0) == pytest.approx(3.0)
    with pytest.raises(InvalidInputError):
        time_average(records, "negativity", t_min=4.0)


# CSV

def test_csv_single_zero_record(tmp_path):
    path = tmp_path / "out.csv"
    emit_csv([_record(0.0)], str(path))
    lines = path.read_text().split("\n")
    assert lines[0] == STANDARD_HEADER
    assert lines[1] == "0,0,0,0,0,0,0,0"
    assert lines[2] == ""


def test_csv_line_count(tmp_path):
    path = tmp_path / "out.csv"
    emit_csv([_record(float(k)) for k in range(500)], str(path))
    assert len(path.read_text().splitlines()) == 501


def test_csv_round_trip_is_bit_identical(tmp_path):
    path = tmp_path / "out.csv"
    records = run_sweep(_small_config())
    emit_csv(records, str(path))
    frame = pd.read_csv(path, float_precision="round_trip")
    for record, row in zip(records, frame.itertuples(index=False)):
        assert row.t == record.t
        assert row.negativity == record.negativity
        assert row.mutual_entropy == record.mutual_entropy
        assert row.s_joint == record.s_joint


def test_csv_is_deterministic(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(run_sweep(_small_config()), str(first))
    emit_csv(run_sweep(_small_config()), str(second))
    assert first.read_bytes() == second.read_bytes()


@pytest.mark.parametrize("columns,header", [
    (ColumnSet.BOUND_PAIR, "t,mutual_entropy,classical_bound"),
    (ColumnSet.EXTENDED, STANDARD_HEADER + ",quantum_bound,atomic_inversion,mean_photon_number,chi_rank"),
])
def test_csv_column_layouts(tmp_path, columns, header):
    path = tmp_path / "out.csv"
    emit_csv([_record(0.0)], str(path), columns=columns)
    assert path.read_text().splitlines()[0] == header


def test_csv_needs_records(tmp_path):
    with pytest.raises(InvalidInputError):
        emit_csv([], str(tmp_path / "out.csv"))


def test_csv_unwritable_path(tmp_path):
    with pytest.raises(OutputError) as excinfo:
        emit_csv([_record(0.0)], str(tmp_path / "missing" / "out.csv"))
    assert excinfo.value.exit_code == 3
    assert "missing" in str(excinfo.value)


# CLI

def test_cli_writes_csv(tmp_path):
    path = tmp_path / "fig2.csv"
    code = run_sweep_cli(["--preset", "fig2", "--n-points", "5", "--t-end", "2", "--output", str(path)])
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == STANDARD_HEADER
    assert len(lines) == 6


def test_cli_flags_override_config_file(tmp_path):
    config_path = tmp_path / "sweep.conf"
    config_path.write_text("preset = fig5\nn-points = 3\nt-end = 1.0\n")
    path = tmp_path / "fig5.csv"
    code = run_sweep_cli(["--config", str(config_path), "--n-points", "4", "-o", str(path)])
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "t,mutual_entropy,classical_bound"
    assert len(lines) == 5


def test_cli_config_error_exit_code(tmp_path):
    code = run_sweep_cli(["--preset", "fig1", "--t-end", "0", "-o", str(tmp_path / "x.csv")])
    assert code == 1


def test_cli_requires_output_path():
    assert run_sweep_cli(["--preset", "fig1", "--n-points", "3"]) == 1


def test_cli_oracle_mismatch_exit_code(tmp_path, perturbed_oracle):
    code = run_sweep_cli([
        "--preset", "fig3", "--n-points", "3", "--t-end", "1", "--oracle-check",
        "-o", str(tmp_path / "x.csv"),
    ])
    assert code == 2
    assert not (tmp_path / "x.csv").exists()


def test_cli_output_error_exit_code(tmp_path):
    code = run_sweep_cli([
        "--preset", "fig1", "--n-points", "3", "--t-end", "1",
        "-o", str(tmp_path / "no" / "such" / "dir.csv"),
    ])
    assert code == 3


def test_cli_preset_flag_beats_config_file_preset(tmp_path):
    config_path = tmp_path / "sweep.conf"
    config_path.write_text("preset = fig5\nn-points = 3\nt-end = 1.0\n")
    path = tmp_path / "fig1.csv"
    code = run_sweep_cli(["--config", str(config_path), "--preset", "fig1", "-o", str(path)])
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == STANDARD_HEADER
    assert len(lines) == 4


def test_cli_first_row_reports_exact_zero_negativity(tmp_path):
    path = tmp_path / "fig2.csv"
    assert run_sweep_cli(["--preset", "fig2", "--n-points", "3", "--t-end", "1", "-o", str(path)]) == 0
    assert path.read_text().splitlines()[1].startswith("0,0,")


def test_cli_invariant_violation_exit_code(tmp_path, monkeypatch):
    def broken(params, field0, t, check_invariants=None):
        raise InvariantViolationError(f"t={t!r}: joint trace is 0.5")

    monkeypatch.setattr(sweep_service, "measure_sweep_point", broken)
    code = run_sweep_cli(["--preset", "fig1", "--n-points", "3", "--t-end", "1", "-o", str(tmp_path / "x.csv")])
    assert code == 4
    assert not (tmp_path / "x.csv").exists()
