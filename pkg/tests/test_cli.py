import json
from importlib import resources

import pytest

from rabi_ybi import __version__
from rabi_ybi.cli import RunConfig, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def write_config(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_verify_ybe_passes(capsys):
    code, out, _ = run(["verify-ybe", "--samples", "20"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["pass"] and doc["samples"] == 20 and doc["max_residual"] <= 1e-12
    assert doc["version"] == __version__
    assert doc["config"]["command"] == "verify-ybe"


def test_failed_check_exits_one(capsys):
    code, out, _ = run(["verify-ybe", "--samples", "5", "--ybe-threshold", "1e-300"], capsys)
    assert code == 1 and json.loads(out)["pass"] is False


def test_unknown_config_key_exits_two(tmp_path, capsys):
    cfg = write_config(tmp_path, {"samples": 3, "colour": "red"})
    code, _, err = run(["verify-ybe", "--config", cfg], capsys)
    assert code == 2 and "colour" in err


def test_inconsistent_point_exits_two(capsys):
    code, _, err = run(["verify-rtt", "--point", "delta0", "--delta", "0.3"], capsys)
    assert code == 2 and "delta" in err


def test_flags_override_file(tmp_path, capsys):
    cfg = write_config(tmp_path, {"samples": 3, "seed": 4})
    code, out, _ = run(["verify-ybe", "--config", cfg, "--samples", "7"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["samples"] == 7 and doc["config"]["seed"] == 4


def test_config_keys_are_flat_field_names():
    keys = RunConfig.keys()
    for key in ("delta", "omega", "g", "epsilon", "n_qubits", "rep", "n_max", "grid", "seed"):
        assert key in keys


@pytest.mark.parametrize(
    "extra",
    [
        ["--point", "delta0", "--model", "rabi"],
        ["--point", "omega0", "--n-qubits", "2", "--rep", "full_tensor"],
        ["--point", "delta0", "--model", "generalized", "--epsilon", "0.4"],
    ],
)
def test_verify_rtt(extra, capsys):
    code, out, _ = run(["verify-rtt", "--samples", "3", "--n-max", "12"] + extra, capsys)
    doc = json.loads(out)
    assert code == 0 and doc["max_residual"] <= 1e-10


def test_charges_at_omega0(capsys):
    argv = ["charges", "--point", "omega0", "--n-qubits", "3", "--rep", "full_tensor", "--n-max", "8"]
    code, out, _ = run(argv, capsys)
    doc = json.loads(out)
    assert code == 0 and doc["n_charges"] == 3 and doc["hamiltonian_power"] == 2


def test_charges_at_delta0_notes_linear_tau(capsys):
    code, out, _ = run(["charges", "--point", "delta0", "--n-max", "8"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["n_charges"] == 1 and "note" in doc


def test_spectrum_csv_has_provenance(capsys):
    argv = ["spectrum", "--model", "rabi", "--delta", "0.6", "--omega", "1", "--g", "0",
            "--n-max", "6", "--sector", "none", "--format", "csv"]
    code, out, _ = run(argv, capsys)
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == f"# rabi_ybi {__version__}"
    assert lines[1].startswith("# config: ")
    assert lines[2] == "sector,index,eigenvalue,converged"
    assert float(lines[3].split(",")[2]) == pytest.approx(-0.3)


def test_level_stats_reference_histogram_csv(capsys):
    argv = ["level-stats", "--ensemble", "poisson", "--dimension", "200", "--draws", "10", "--format", "csv"]
    code, out, _ = run(argv, capsys)
    lines = out.splitlines()
    assert code == 0 and lines[2] == "bin_left,bin_right,density" and len(lines) == 3 + 40


def test_sweep_from_config_file(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        {
            "model": "dicke",
            "n_qubits": 4,
            "delta": 0.5,
            "sector": "both",
            "grid": [{"omega": 1.0, "g": 0.3, "n_max": 60}, {"omega": 0.5, "g": 0.2, "n_max": 60}],
            "format": "csv",
        },
    )
    code, out, _ = run(["sweep", "--config", cfg], capsys)
    rows = out.splitlines()[3:]
    assert code == 0 and len(rows) == 4


def test_sweep_needs_grid(capsys):
    code, _, _ = run(["sweep"], capsys)
    assert code == 2


def test_probe_csv(capsys):
    code, out, _ = run(["probe", "--theta-points", "5", "--probe-n-max", "10", "--format", "csv"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[2] == "theta,residual,overlap_sx,overlap_x" and len(lines) == 8


def test_output_file_is_byte_identical_across_runs(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        code, _, _ = run(["verify-rtt", "--point", "omega0", "--n-qubits", "2", "--samples", "4",
                          "--n-max", "10", "--seed", "11", "--output", str(path)], capsys)
        assert code == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_shipped_trend_config_is_valid():
    text = resources.files("rabi_ybi").joinpath("configs/dicke_trend.json").read_text()
    data = json.loads(text)
    assert set(data) <= set(RunConfig.keys())
    assert data["n_qubits"] == 20 and data["rep"] == "collective"
    assert all(point["n_max"] >= 120 for point in data["grid"])
