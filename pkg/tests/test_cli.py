import filecmp
import os

import pytest

from secsplit import io
from secsplit.cli import EXIT_CONFIG, EXIT_OK, EXIT_RECONCILIATION, main
from secsplit.melnikov import CANONICAL_VARIANT

SMALL = """
[separatrix]
n_samples = 41
random_sets = 3
[melnikov]
n_potential = 16
[scan]
n_L1 = 2
n_frac = 3
[portrait]
n_g1 = 21
n_G1 = 21
n_xi = 21
[dynamics]
mu = 0, 1e-3
n_grid = 32
manifold_resolution = 0.1
"""


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(SMALL)
    return str(path)


def _run(cmd, config, out, *extra):
    return main([cmd, "--config", config, "--out", str(out), *extra])


@pytest.mark.parametrize("cmd", ["separatrix", "melnikov", "scan", "portrait"])
def test_outputs_are_byte_identical(cmd, config, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert _run(cmd, config, a) == EXIT_OK
    assert _run(cmd, config, b, "--jobs", "2") == EXIT_OK
    names = sorted(os.listdir(a))
    assert names and names == sorted(os.listdir(b))
    _, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
    assert not mismatch and not errors


def test_splitting_report(config, tmp_path, capsys):
    assert _run("splitting", config, tmp_path) == EXIT_OK
    out = capsys.readouterr().out
    assert "granted" in out
    meta, cols, rows = io.read_csv(str(tmp_path / "splitting.csv"))
    assert cols[0] == "mu" and len(rows) == 2
    assert {"splitting.json", "splitting.png", "manifolds.csv"} <= set(os.listdir(tmp_path))


def test_melnikov_records_the_surviving_variant(config, tmp_path):
    assert _run("melnikov", config, tmp_path) == EXIT_OK
    d = io.read_json(str(tmp_path / "melnikov.json"))
    rec = d["metadata"]["reconciliation"]
    assert rec["status"] == "reconciled" and rec["survivors"] == [CANONICAL_VARIANT]
    assert d["data"]["harmonic_purity"] < 1e-10
    meta, _, _ = io.read_csv(str(tmp_path / "melnikov_potential.csv"))
    assert meta["reconciliation"]["survivors"] == [CANONICAL_VARIANT]


def test_quadrature_only_is_recorded(config, tmp_path):
    assert _run("melnikov", config, tmp_path, "--quadrature-only") == EXIT_OK
    rec = io.read_json(str(tmp_path / "melnikov.json"))["metadata"]["reconciliation"]
    assert rec == {"status": "quadrature only"}


def test_reconciliation_failure_exit_code(tmp_path):
    cfg = tmp_path / "strict.ini"
    cfg.write_text("[melnikov]\ntol = 1e-300\nn_potential = 8\n")
    assert _run("melnikov", str(cfg), tmp_path) == EXIT_RECONCILIATION
    rec = io.read_json(str(tmp_path / "melnikov.json"))["metadata"]["reconciliation"]
    assert rec["status"] == "failed"


def test_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[orbit]\nGamma = 5\n")
    assert _run("separatrix", str(cfg), tmp_path) == EXIT_CONFIG
    assert "constraint violated" in capsys.readouterr().err
    assert main(["separatrix", "--jobs", "0", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_seed_changes_random_checks_only(config, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    _run("separatrix", config, a, "--seed", "1")
    _run("separatrix", config, b, "--seed", "2")
    _, _, ra = io.read_csv(str(a / "separatrix.csv"))
    _, _, rb = io.read_csv(str(b / "separatrix.csv"))
    assert ra == rb
    assert not filecmp.cmp(a / "random_checks.csv", b / "random_checks.csv", shallow=False)
