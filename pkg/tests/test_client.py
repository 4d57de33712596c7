import json
import math
from fractions import Fraction

import pandas as pd
import pytest

from Levinson.client import LevinsonClient
from Levinson.config.loader import load_config


@pytest.fixture
def free_config():
    """Zero potential in three dimensions on a short grid."""
    return load_config(family="well", depth=0.0, radius=1.0, dimension=3, grid_points=40, flow_seeds=4,
                       flow_box_points=300)


@pytest.fixture
def client(tmp_path, free_config):
    """Create a LevinsonClient writing into a temporary directory."""
    return LevinsonClient(free_config, output_dir=str(tmp_path / "out"))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_free_levinson_identity(tmp_path, n):
    cfg = load_config(family="well", depth=0.0, dimension=n, grid_points=40)
    report = LevinsonClient(cfg, output_dir=str(tmp_path)).run_levinson()
    assert report.N == 0
    assert report.integral == 0.0
    assert report.beta_n == 0.0
    assert report.N_res == Fraction(0)
    assert report.residual <= 1e-12
    assert report.passed


def test_report_files(client):
    client.run_levinson()
    data = json.loads((client.output_dir / "levinson_report.json").read_text())
    assert data["N"] == 0
    assert "diagnostics" in data
    manifest = json.loads((client.output_dir / "manifest.json").read_text())
    assert manifest["files"][0]["file"] == "levinson_report.json"


def test_curves_are_deterministic(client):
    csv_path, manifest_path = client.run_curves()
    first = csv_path.read_bytes()
    frame = pd.read_csv(csv_path)
    manifest = json.loads(manifest_path.read_text())
    assert len(frame) == manifest["metadata"]["grid"]["rows"]
    assert (frame["xi"] == 0).all()
    client.run_curves()
    assert csv_path.read_bytes() == first


async def test_flow_suite_async(client):
    report = await client.flow_suite()
    assert report.passed
    assert report.passed_count == 4
    assert report.canned == {"t_minus_half": 1, "half_minus_t": -1}
    assert (client.output_dir / "flow_suite.json").exists()


def test_resonance_scan(tmp_path):
    cfg = load_config(family="well", depth=1.0, dimension=3, scan_channel=0, scan_low=1.0, scan_high=4.0,
                      scan_points=12)
    report = LevinsonClient(cfg, output_dir=str(tmp_path)).run_resonance_scan()
    assert report.channel == "l0"
    assert report.thresholds == [pytest.approx(2.4674011002723395, abs=1e-6)]


async def test_levinson_multiple(client, free_config):
    reports = await client.levinson_multiple([free_config, free_config])
    assert len(reports) == 2


@pytest.mark.slow
@pytest.mark.parametrize(
    "n, family, depth",
    [
        (1, "well", 2.0),
        (1, "well", 0.3),
        (1, "bump", 3.0),
        (2, "well", 0.5),
        (2, "well", 3.0),
        (2, "bump", 3.0),
        (3, "well", 1.0),
        (3, "well", 4.0),
        (3, "bump", 8.0),
        (4, "bump", 1.0),
        (4, "bump", 6.0),
        (4, "well", 3.0),
    ],
)
def test_levinson_identity(tmp_path, n, family, depth):
    cfg = load_config(family=family, depth=depth, dimension=n, threads=4)
    report = LevinsonClient(cfg, output_dir=str(tmp_path)).run_levinson()
    assert report.residual <= 0.05 + 0.25 * abs(report.tail_estimate)


@pytest.mark.slow
def test_levinson_identity_at_s_wave_threshold(tmp_path):
    cfg = load_config(family="well", depth=2.4674011002723395, dimension=3, threads=4)
    report = LevinsonClient(cfg, output_dir=str(tmp_path)).run_levinson()
    assert report.N == 0
    assert report.N_res == Fraction(1, 2)
    assert report.residual <= 0.05 + 0.25 * abs(report.tail_estimate)


@pytest.mark.slow
def test_weak_two_dimensional_well(tmp_path):
    """Binding is exponentially weak, so the s-wave is still near pi/2 at the bottom of the grid."""
    cfg = load_config(family="well", depth=0.5, dimension=2, threads=4)
    report = LevinsonClient(cfg, output_dir=str(tmp_path)).run_levinson()
    assert report.N == 1
    assert report.N_res == 0
    assert report.residual <= 0.05


@pytest.mark.slow
def test_one_dimensional_even_threshold_from_scan(tmp_path):
    scan_cfg = load_config(family="well", depth=1.0, dimension=1, scan_channel=0, scan_low=8.0, scan_high=11.0,
                           scan_points=8)
    client = LevinsonClient(scan_cfg, output_dir=str(tmp_path))
    (depth,) = client.run_resonance_scan().thresholds
    assert depth == pytest.approx(math.pi ** 2, abs=1e-6)

    at_threshold = client.run_levinson(load_config(family="well", depth=depth, dimension=1, threads=4))
    assert at_threshold.N_res == 0
    assert at_threshold.residual <= 0.05 + 0.25 * abs(at_threshold.tail_estimate)

    generic = client.run_levinson(load_config(family="well", depth=8.0, dimension=1, threads=4))
    assert generic.N_res == Fraction(-1, 2)
    assert generic.residual <= 0.05 + 0.25 * abs(generic.tail_estimate)


@pytest.mark.slow
@pytest.mark.parametrize("n", [3, 4])
def test_high_energy_law_in_diagnostics(tmp_path, n):
    cfg = load_config(family="bump", depth=2.0, dimension=n, threads=4)
    report = LevinsonClient(cfg, output_dir=str(tmp_path)).run_levinson()
    assert report.diagnostics["high_energy_gap"] <= 0.05
    assert report.diagnostics["high_energy_exponent_expected"] == (1.5 if n == 3 else 2.0)
