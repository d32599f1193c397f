import numpy as np
import pytest

from ntnscp.model import PER_KM2, Layer, Scenario, random_route, reference_layers
from ntnscp.scenario_io import ScenarioFile, dumps_scenario


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_layer():
    return Layer(id="U", alpha=4.0, eve_density=1.0 / np.pi, k_db_mean=10.0,
                 link_distance_range=(1.0, 10.0), tx_power=1.0, noise_power=1.0)


@pytest.fixture
def reference_scenario():
    layers = reference_layers(1e-7 * PER_KM2)
    route = random_route(layers, (7, 7), np.random.default_rng(2024))
    return Scenario(tuple(layers), route, seed=7)


@pytest.fixture
def scenario_file(tmp_path, reference_scenario):
    path = tmp_path / "scenario.json"
    path.write_text(dumps_scenario(ScenarioFile.from_scenario(reference_scenario)))
    return path


_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record_acceptance():
    """record(n, passed, detail): one summary line per acceptance criterion."""
    def record(n, passed, detail):
        _ACCEPTANCE[n] = (bool(passed), detail)
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
