"""Parameter sweeps over a base scenario (density, K-factor, distance, hops)."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import replace


from . import closedform
from .model import KM, Route, Scenario
from .montecarlo import McConfig, estimate_scp
from .scenario_io import SweepSpec


def apply_parameter(scenario: Scenario, parameter: str, value: float) -> Scenario:
    """Scenario with one sweep parameter set.

    ``avg_link_distance`` is in km and rescales every hop by a common factor;
    ``hop_count`` cycles through the base route's hops.
    """
    route = scenario.route
    if parameter == "eve_density":
        return scenario.with_density(value)
    if parameter == "k_factor_db":
        k = 10.0 ** (value / 10.0)
        return scenario.with_route(Route(tuple(replace(h, k_factor=k) for h in route.hops)))
    if parameter == "avg_link_distance":
        mean = sum(h.distance for h in route.hops) / len(route)
        f = value * KM / mean
        return scenario.with_route(Route(tuple(replace(h, distance=h.distance * f) for h in route.hops)))
    if parameter == "hop_count":
        n = int(value)
        if n < 1 or n != value:
            raise ValueError(f"hop_count must be a positive integer, got {value}")
        return scenario.with_route(Route(tuple(route.hops[i % len(route)] for i in range(n))))
    raise ValueError(f"unknown sweep parameter {parameter!r}")


def evaluate_models(scenario: Scenario, models, mc_config: McConfig | None = None):
    """{model: (scp, half_width or None)}; Rician in the a_hat = 0 regime gives NaN."""
    out = {}
    for m in models:
        if m == "monte_carlo":
            est = estimate_scp(scenario, mc_config)
            out[m] = (est.scp_hat, est.half_width_95)
            continue
        try:
            out[m] = (closedform.end_to_end(scenario, m), None)
        except closedform.SingularCoefficientError:
            out[m] = (math.nan, None)
    return out


def run_sweep(scenario: Scenario, spec: SweepSpec, trials=None, seed=None, mode=None, workers=1):
    """Rows (parameter_value, model, scp, half_width) ordered by value, then model name."""
    base = scenario
    # hop count first so a fixed distance or K applies to the final route
    for key in sorted(spec.fixed, key=lambda k: k != "hop_count"):
        base = apply_parameter(base, key, spec.fixed[key])
    mc = None
    if "monte_carlo" in spec.models:
        mc = McConfig(
            trials=trials or spec.trials,
            seed=seed if seed is not None else (spec.seed if spec.seed is not None else scenario.seed),
            mode=mode or spec.mode,
            workers=workers,
        )
    rows = []
    for v in spec.values:
        sc = apply_parameter(base, spec.parameter, v)
        res = evaluate_models(sc, spec.models, mc)
        for m in sorted(res):
            rows.append((v, m, res[m][0], res[m][1]))
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["parameter_value", "model", "scp", "mc_half_width"])
    for v, m, p, hw in rows:
        w.writerow([repr(float(v)), m, "" if p != p else repr(float(p)), "" if hw is None else repr(float(hw))])
    return buf.getvalue()
