import math

import pytest

from ntnscp import closedform as cf
from ntnscp.model import KM, PER_KM2
from ntnscp.scenario_io import SweepSpec
from ntnscp.sweeps import apply_parameter, rows_to_csv, run_sweep


def test_apply_density(reference_scenario):
    sc = apply_parameter(reference_scenario, "eve_density", 3e-12)
    assert all(l.eve_density == 3e-12 for l in sc.layers)


def test_apply_k_factor(reference_scenario):
    sc = apply_parameter(reference_scenario, "k_factor_db", 10.0)
    assert all(h.k_factor == pytest.approx(10.0) for h in sc.route.hops)


def test_apply_distance_keeps_ratios(reference_scenario):
    sc = apply_parameter(reference_scenario, "avg_link_distance", 100.0)
    d = [h.distance for h in sc.route.hops]
    assert sum(d) / len(d) == pytest.approx(100.0 * KM)
    d0 = [h.distance for h in reference_scenario.route.hops]
    assert d[0] / d[1] == pytest.approx(d0[0] / d0[1])


def test_apply_hop_count(reference_scenario):
    sc = apply_parameter(reference_scenario, "hop_count", 10)
    assert len(sc.route) == 10 and sc.route.hops[7] == reference_scenario.route.hops[0]
    with pytest.raises(ValueError):
        apply_parameter(reference_scenario, "hop_count", 2.5)


def test_sweep_rows_ordered_and_consistent(reference_scenario):
    spec = SweepSpec("eve_density", (1e-9 * PER_KM2, 1e-6 * PER_KM2), models=("rician", "erlang"))
    rows = run_sweep(reference_scenario, spec)
    assert [(r[0], r[1]) for r in rows] == [
        (1e-15, "erlang"), (1e-15, "rician"), (1e-12, "erlang"), (1e-12, "rician")]
    sc = reference_scenario.with_density(1e-12)
    assert rows[3][2] == cf.end_to_end(sc, "rician")


def test_sweep_with_monte_carlo(reference_scenario):
    spec = SweepSpec("eve_density", (1e-13,), models=("monte_carlo",), trials=2000, seed=1)
    (row,) = run_sweep(reference_scenario, spec)
    assert 0.0 <= row[2] <= 1.0 and row[3] is not None


def test_fixed_overrides_apply_first(reference_scenario):
    spec = SweepSpec("eve_density", (1e-13,), models=("rayleigh_multi",), fixed={"hop_count": 2})
    (row,) = run_sweep(reference_scenario, spec)
    two = apply_parameter(reference_scenario, "hop_count", 2).with_density(1e-13)
    assert row[2] == cf.end_to_end(two, "rayleigh_multi")


def test_csv_blank_for_nan():
    text = rows_to_csv([(1.0, "rician", math.nan, None), (1.0, "monte_carlo", 0.5, 0.01)])
    assert text.splitlines() == ["parameter_value,model,scp,mc_half_width", "1.0,rician,,", "1.0,monte_carlo,0.5,0.01"]
