import json

from holobeam.cli import main


def write_config(tmp_path, text):
    path = tmp_path / "cfg.yaml"
    path.write_text(text)
    return str(path)


def test_sweep_writes_outputs(tmp_path, capsys):
    cfg = write_config(tmp_path, "trials: 2\nsweep: {axis: snr_db, values: [0, 20]}\n")
    out = tmp_path / "out"
    assert main(["sweep", "--config", cfg, "--out", str(out), "--seed", "5", "--threads", "2"]) == 0
    assert {p.name for p in out.iterdir()} == {"records.csv", "manifest.json", "plot_snr_db.script"}
    assert json.loads((out / "manifest.json").read_text())["seed"] == 5
    assert "wrote 6 records" in capsys.readouterr().out


def test_sweep_is_default_command(tmp_path):
    cfg = write_config(tmp_path, "trials: 1\n")
    assert main(["--config", cfg, "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "records.csv").exists()


def test_ceilings_reports_reference_bounds(tmp_path, capsys):
    cfg = write_config(tmp_path, "nx: 16\nny: 16\nsweep: {axis: epsilon, values: [0.6, 0.8]}\n")
    assert main(["ceilings", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "22.99" in out and "10.04" in out and "11.79" in out and "5.15" in out


def test_ceilings_for_ideal_hardware(capsys):
    assert main(["ceilings"]) == 0
    assert "inf" in capsys.readouterr().out


def test_validate_subset(capsys):
    assert main(["validate", "--only", "2", "4"]) == 0
    out = capsys.readouterr().out
    assert "2/2 checks passed" in out


def test_bad_config_reports_key(tmp_path, capsys):
    cfg = write_config(tmp_path, "trials: 0\n")
    assert main(["sweep", "--config", cfg]) == 2
    assert "trials" in capsys.readouterr().err


def test_missing_config(tmp_path, capsys):
    assert main(["--config", str(tmp_path / "missing.yaml")]) == 2
    assert "missing.yaml" in capsys.readouterr().err


def test_seed_range(capsys):
    assert main(["ceilings", "--seed", "-1"]) == 2
    assert "seed" in capsys.readouterr().err
