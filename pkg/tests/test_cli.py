import json

import pytest

from Levinson.cli import EXIT_CONFIG, EXIT_OK, main
from Levinson.config.loader import load_config
from Levinson.exception import ConfigurationError


@pytest.fixture
def free_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("FAMILY=well\nDEPTH=0\nDIMENSION=2\nGRID_POINTS=30\n")
    return path


def test_levinson_command(tmp_path, free_config_file):
    out = tmp_path / "out"
    assert main(["levinson", "--config", str(free_config_file), "--out", str(out)]) == EXIT_OK
    report = json.loads((out / "levinson_report.json").read_text())
    assert report["residual"] == 0.0


def test_rerun_is_byte_identical(tmp_path, free_config_file):
    for name in ("a", "b"):
        assert main(["curves", "--config", str(free_config_file), "--out", str(tmp_path / name)]) == EXIT_OK
    for file in ("curves.csv", "manifest.json"):
        assert (tmp_path / "a" / file).read_bytes() == (tmp_path / "b" / file).read_bytes()


def test_unknown_key_is_a_config_error(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("DEPTH=1\nCOLOUR=blue\n")
    assert main(["levinson", "--config", str(path), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_bad_dimension_is_a_config_error(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("DIMENSION=7\n")
    assert main(["levinson", "--config", str(path), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_missing_file_is_a_config_error(tmp_path):
    assert main(["levinson", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_load_config_values(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("family=bump\ndepth=2.5\nlambda_max=none\nl_max=12\nflow_s=0.75,1,2\n")
    cfg = load_config(str(path))
    assert cfg.family == "bump"
    assert cfg.depth == 2.5
    assert cfg.lambda_max is None
    assert cfg.l_max == 12
    assert cfg.flow_s == (0.75, 1.0, 2.0)


def test_invalid_values_rejected():
    with pytest.raises(ConfigurationError):
        load_config(step_tol=-1.0)
    with pytest.raises(ConfigurationError):
        load_config(mode="plot")
    with pytest.raises(ConfigurationError):
        load_config(flow_s=(0.5,))
