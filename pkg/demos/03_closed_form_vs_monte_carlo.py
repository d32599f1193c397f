"""
Closed form against Monte-Carlo over Eve density
================================================

Four reference layers, random routes of 2..7 hops, Eve density swept
geometrically. The heterogeneous-Rician closed form tracks the simulation;
the Rayleigh-family baselines fall off much earlier.
"""
import numpy as np

from ntnscp import closedform as cf
from ntnscp.model import PER_KM2, Scenario, random_route, reference_layers
from ntnscp.montecarlo import McConfig, estimate_scp

layers = reference_layers()
rng = np.random.default_rng(55)
routes = [random_route(layers, (2, 7), rng) for _ in range(5)]
densities = np.logspace(-9, -4, 6)  # per km^2

print("lambda/km2    MC      rician  ray-multi ray-single erlang")
for lam in densities:
    row = {m: 0.0 for m in ("monte_carlo",) + cf.MODELS}
    for i, route in enumerate(routes):
        sc = Scenario(tuple(layers), route).with_density(lam * PER_KM2)
        for m in cf.MODELS:
            row[m] += cf.end_to_end(sc, m) / len(routes)
        row["monte_carlo"] += estimate_scp(sc, McConfig(trials=5000, seed=i)).scp_hat / len(routes)
    print(f"{lam:9.1e}  " + "  ".join(f"{row[m]:.4f}" for m in ("monte_carlo",) + cf.MODELS))
