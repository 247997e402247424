import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secsplit import io
from secsplit.config import RunConfig, load_config, parse_config
from secsplit.errors import ConfigError


def test_empty_config_gives_defaults():
    cfg = parse_config("")
    assert cfg.orbit.L1 == 1.0 and cfg.orbit.Gamma == 0.3
    assert cfg.dynamics.mu == (0.0, 1e-4, 3e-4, 1e-3)
    assert not cfg.has_scan
    assert load_config(None) == RunConfig()


def test_values_are_parsed():
    cfg = parse_config("""
[run]
seed = 7
[orbit]
L1 = 1.5
Gamma = 0.4
[dynamics]
mu = 1e-4 2e-4
manifolds = no
method = gauss4
[scan]
n_L1 = 3
""")
    assert cfg.seed == 7 and cfg.orbit.L1 == 1.5 and cfg.dynamics.mu == (1e-4, 2e-4)
    assert cfg.dynamics.manifolds is False and cfg.dynamics.method == "gauss4"
    assert cfg.has_scan and cfg.scan.n_L1 == 3
    assert cfg.integrator().method == "gauss4"


@pytest.mark.parametrize("text,needle", [
    ("[orbit]\nGamma = 0.9\n", "Gamma < L1*sqrt(3/5)"),
    ("[orbit]\nL1 = -1\n", "L1 > 0"),
    ("[system]\ndelta = 0.5\ne2 = 0.5\n", "at most one of delta, e2"),
    ("[dynamics]\nmu = -1e-4\n", "mu >= 0"),
    ("[dynamics]\ntransversal_phi = 1.0\n", "transversal_phi"),
    ("[dynamics]\nmethod = rk4\n", "dynamics.method"),
    ("[scan]\nfrac_max = 1.0\n", "scan fractions"),
    ("[orbit]\nL1 = abc\n", "cannot parse"),
    ("[orbit]\ngamma = 0.3\n", "unknown key"),
    ("[orbits]\nL1 = 1\n", "unknown section"),
    ("[run]\nseeds = 1\n", "unknown key"),
    ("not an ini file", "malformed"),
])
def test_violations_are_named(text, needle):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert needle in str(exc.value)


def test_missing_file_is_a_config_error(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "nope.ini"))


def test_hash_ignores_output_location():
    a = RunConfig()
    assert a.hash == a.with_output("/elsewhere").hash
    assert a.hash != a.with_seed(3).hash
    assert len(a.hash) == 16


def test_params_follow_the_system_section():
    cfg = parse_config("[system]\ne2 = 0.8\n")
    assert cfg.delta == pytest.approx(0.6)
    assert cfg.params().A_oct == pytest.approx(-15 / 64)
    phys = parse_config("[system]\noctupole_scale = physical\n").params()
    assert phys.octupole_scale is None


def test_fmt_round_trips_floats():
    for x in (0.1, 1 / 3, math.pi * 1e-300, -2.5e17):
        assert float(io.fmt(x)) == x
    assert io.fmt(np.int64(3)) == "3" and io.fmt(True) == "true" and io.fmt(math.nan) == "nan"


@settings(max_examples=200, deadline=None)
@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_round_trip_property(x):
    assert float(io.fmt(x)) == x


def test_csv_and_json_round_trip(tmp_path):
    cfg = RunConfig()
    meta = io.metadata(cfg, "test", {"tol": 1e-8}, {"status": "not run"})
    path = io.write_csv(str(tmp_path / "a.csv"), ["x", "y"], [(1.0, 2), (0.1, np.float64(3.5))], meta)
    m, cols, rows = io.read_csv(path)
    assert m["config_hash"] == cfg.hash and m["reconciliation"] == {"status": "not run"}
    assert cols == ["x", "y"] and rows == [["1", "2"], ["0.10000000000000001", "3.5"]]
    jp = io.write_json(str(tmp_path / "a.json"), {"z": 1 + 2j, "n": math.nan, "v": np.arange(2)}, meta)
    d = io.read_json(jp)
    assert d["data"] == {"z": {"re": 1.0, "im": 2.0}, "n": None, "v": [0, 1]}
    assert d["metadata"]["kind"] == "test"
