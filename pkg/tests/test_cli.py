import hashlib
import json
import subprocess
import sys


from defect_spectro import __version__
from defect_spectro.cli import run


def test_no_arguments_is_usage_error(capsys):
    assert run([]) == 2
    assert "usage" in capsys.readouterr().err


def test_unknown_subcommand(capsys):
    assert run(["frobnicate"]) == 2


def test_thermo_writes_tables_and_manifest(fixture_path, tmp_path):
    assert run(["thermo", "-i", str(fixture_path), "-o", str(tmp_path), "--quiet"]) == 0
    for name in ("formation_lines.csv", "transition_levels.csv", "stability.csv", "formation_PaV2.svg"):
        assert (tmp_path / name).is_file()
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["subcommand"] == "thermo"
    assert manifest["version"] == __version__
    assert manifest["input_sha256"] == hashlib.sha256(fixture_path.read_bytes()).hexdigest()
    header = (tmp_path / "formation_lines.csv").read_text().splitlines()[0]
    assert header == "label,q,intercept_eV,slope"


def test_validation_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"host": {}}')
    assert run(["thermo", "-i", str(bad), "-o", str(tmp_path / "o")]) == 1
    err = capsys.readouterr().err
    assert "error" in err


def test_missing_input_file(tmp_path):
    assert run(["stark", "-i", str(tmp_path / "missing.json")]) == 1


def test_correction_standalone(capsys, tmp_path):
    assert run(["correction", "--charge", "1", "--cell-length", "10", "--epsilon", "1", "-o", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "E_corr_eV=2.0428038913" in out
    assert (tmp_path / "manifest.json").is_file()


def test_correction_needs_parameters():
    assert run(["correction", "--charge", "1"]) == 2


def test_levels_stdout(fixture_path, capsys):
    assert run(["levels", "-i", str(fixture_path), "--system", "PaV2-1", "--B", "1", "--stdout"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[1] == "B_T,index,energy_MHz,m_S,m_I,branch"
    assert len(out) == 2 + 18


def test_levels_bad_system(fixture_path):
    assert run(["levels", "-i", str(fixture_path), "--system", "nope"]) == 2


def test_levels_bad_sweep(fixture_path):
    assert run(["levels", "-i", str(fixture_path), "--system", "PaV2-1", "--sweep", "1:0"]) == 2


def test_stark_shielding(fixture_path, tmp_path):
    assert run(["stark", "-i", str(fixture_path), "-o", str(tmp_path), "--shielding", "100", "--quiet"]) == 0
    rows = (tmp_path / "stark.csv").read_text().splitlines()
    assert rows[0].startswith("label,delta_mu_eA,delta_mu_D")
    assert len(rows) == 3


def test_threads_env_validation(fixture_path, monkeypatch):
    monkeypatch.setenv("DEFECT_SPECTRO_THREADS", "many")
    assert run(["levels", "-i", str(fixture_path), "--system", "PaV2-1", "--sweep", "0:1:3", "--stdout"]) == 2


def test_all_is_deterministic(fixture_path, tmp_path, monkeypatch):
    monkeypatch.setenv("DEFECT_SPECTRO_THREADS", "4")
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["all", "-i", str(fixture_path), "-o", str(a), "--quiet"]) == 0
    monkeypatch.setenv("DEFECT_SPECTRO_THREADS", "1")
    assert run(["all", "-i", str(fixture_path), "-o", str(b), "--quiet"]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    for expected in ("corrections.csv", "selection.csv", "optical_transitions.csv", "stark.csv", "levels_PaV2-1.csv"):
        assert expected in names


def test_module_entry_point(fixture_path, tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "defect_spectro", "selection", "-i", str(fixture_path), "-o", str(tmp_path), "--quiet"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "selection.csv").read_text().count("\n") == 5
