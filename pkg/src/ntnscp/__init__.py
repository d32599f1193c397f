"""End-to-end secure connection probability of multi-hop, multi-layer routes
under heterogeneous Rician fading: closed forms, baselines and a Monte-Carlo
ground truth."""
from .closedform import (
    end_to_end,
    end_to_end_scp_rician,
    fit_marcum_a_hat,
    moment_match,
    scp_erlang_multihop,
    scp_rayleigh_multihop,
    scp_rayleigh_singlehop,
)
from .model import PER_KM2, Hop, Layer, Route, Scenario, random_route, reference_layer, reference_layers
from .montecarlo import McConfig, McEstimate, estimate_scp
from .specfun import marcum_p1, marcum_q1

__version__ = "0.1.0"

__all__ = [
    "end_to_end", "end_to_end_scp_rician", "fit_marcum_a_hat", "moment_match",
    "scp_erlang_multihop", "scp_rayleigh_multihop", "scp_rayleigh_singlehop",
    "PER_KM2", "Hop", "Layer", "Route", "Scenario", "random_route", "reference_layer", "reference_layers",
    "McConfig", "McEstimate", "estimate_scp", "marcum_p1", "marcum_q1",
]
