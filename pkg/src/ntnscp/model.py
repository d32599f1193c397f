"""Layers, hops, routes and scenarios, in SI units (meters, watts, m^-2)."""
from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

KM = 1000.0
# Eve densities are usually quoted per square kilometer.
PER_KM2 = 1e-6


class ScenarioError(ValueError):
    """Invalid layer, hop, route or scenario."""


@dataclass(frozen=True)
class Layer:
    id: str
    alpha: float
    eve_density: float
    k_db_mean: float
    k_db_var: float = 0.0
    link_distance_range: tuple[float, float] = (1.0, 1.0)
    tx_power: float = 10.0
    noise_power: float = 1e-13

    def __post_init__(self):
        if not self.alpha > 2:
            raise ScenarioError(f"layer {self.id!r}: alpha must be > 2, got {self.alpha}")
        if not self.eve_density >= 0:
            raise ScenarioError(f"layer {self.id!r}: eve_density must be >= 0")
        if not self.tx_power > 0:
            raise ScenarioError(f"layer {self.id!r}: tx_power must be > 0")
        if not self.noise_power > 0:
            raise ScenarioError(f"layer {self.id!r}: noise_power must be > 0")
        if not self.k_db_var >= 0:
            raise ScenarioError(f"layer {self.id!r}: k_db_var must be >= 0")
        lo, hi = self.link_distance_range
        if not 0 < lo <= hi:
            raise ScenarioError(f"layer {self.id!r}: link_distance_range must satisfy 0 < min <= max")
        object.__setattr__(self, "link_distance_range", (float(lo), float(hi)))

    @property
    def snr_scale(self) -> float:
        """P_l / n_0."""
        return self.tx_power / self.noise_power

    def with_density(self, eve_density: float) -> "Layer":
        return replace(self, eve_density=eve_density)


@dataclass(frozen=True)
class Hop:
    layer_id: str
    distance: float
    k_factor: float

    def __post_init__(self):
        if not self.distance > 0:
            raise ScenarioError(f"hop distance must be > 0, got {self.distance}")
        if not (self.k_factor >= 0 and math.isfinite(self.k_factor)):
            raise ScenarioError(f"hop k_factor must be finite and >= 0, got {self.k_factor}")


@dataclass(frozen=True)
class Route:
    hops: tuple[Hop, ...]

    def __post_init__(self):
        object.__setattr__(self, "hops", tuple(self.hops))
        if not self.hops:
            raise ScenarioError("route must contain at least one hop")

    def __len__(self):
        return len(self.hops)

    def by_layer(self) -> "OrderedDict[str, list[Hop]]":
        """Hops grouped by layer, layers in order of first appearance."""
        groups: OrderedDict[str, list[Hop]] = OrderedDict()
        for hop in self.hops:
            groups.setdefault(hop.layer_id, []).append(hop)
        return groups

    def hop_counts(self) -> dict[str, int]:
        return {lid: len(hops) for lid, hops in self.by_layer().items()}


@dataclass(frozen=True)
class Scenario:
    layers: tuple[Layer, ...]
    route: Route
    seed: int = 0
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        index = {}
        for layer in self.layers:
            if layer.id in index:
                raise ScenarioError(f"duplicate layer id {layer.id!r}")
            index[layer.id] = layer
        for hop in self.route.hops:
            if hop.layer_id not in index:
                raise ScenarioError(f"hop refers to unknown layer {hop.layer_id!r}")
        object.__setattr__(self, "_index", index)

    def layer(self, layer_id: str) -> Layer:
        return self._index[layer_id]

    def groups(self) -> list[tuple[Layer, list[Hop]]]:
        """(layer, hops) for every layer the route visits."""
        return [(self._index[lid], hops) for lid, hops in self.route.by_layer().items()]

    def with_density(self, eve_density: float | dict) -> "Scenario":
        """Copy with every layer's Eve density replaced (scalar or per-layer map)."""
        if isinstance(eve_density, dict):
            layers = [l.with_density(eve_density.get(l.id, l.eve_density)) for l in self.layers]
        else:
            layers = [l.with_density(eve_density) for l in self.layers]
        return Scenario(tuple(layers), self.route, self.seed)

    def with_route(self, route: Route) -> "Scenario":
        return Scenario(self.layers, route, self.seed)


def sample_k_factor(layer: Layer, rng, size=None):
    """Linear K-factor with K_dB ~ Normal(k_db_mean, k_db_var)."""
    return 10.0 ** (rng.normal(layer.k_db_mean, math.sqrt(layer.k_db_var), size) / 10.0)


def legit_snr(hop: Hop, layer: Layer, power_gain):
    return layer.tx_power * power_gain / (layer.noise_power * hop.distance ** layer.alpha)


def random_route(layers: Sequence[Layer], hop_count_range=(2, 7), rng=None) -> Route:
    """Random route: uniform hop count, uniform layer per hop, uniform distance."""
    if not layers:
        raise ScenarioError("need at least one layer")
    if rng is None:
        rng = np.random.default_rng()
    lo, hi = hop_count_range
    n = int(rng.integers(lo, hi + 1))
    hops = []
    for _ in range(n):
        layer = layers[int(rng.integers(len(layers)))]
        d = float(rng.uniform(*layer.link_distance_range))
        hops.append(Hop(layer.id, d, float(sample_k_factor(layer, rng))))
    return Route(tuple(hops))


# Reference layers: (distance range km, K_dB mean, K_dB var, alpha)
REFERENCE_LAYERS = {
    "LEO": ((200.0, 550.0), 13.5, 1.8, 2.1),
    "HAPS": ((20.0, 380.0), 13.5, 1.8, 2.3),
    "Ground": ((10.0, 30.0), 7.0, 4.0, 2.9),
    "Sea": ((10.0, 30.0), 12.7, 1.2, 2.5),
}


def reference_layer(name: str, eve_density: float = 0.0, tx_power: float = 10.0,
                 noise_power: float | None = None) -> Layer:
    """One reference layer in SI units.

    Without an explicit ``noise_power`` the link budget is normalized so the
    mean SNR is 0 dB at 1 km (``P/n0 = 1000**alpha``). That places every
    reference link's SNR transition inside the 1e-9..1e-2 fitting grid.
    """
    (dmin, dmax), k_mean, k_var, alpha = REFERENCE_LAYERS[name]
    if noise_power is None:
        noise_power = tx_power / KM**alpha
    return Layer(
        id=name,
        alpha=alpha,
        eve_density=eve_density,
        k_db_mean=k_mean,
        k_db_var=k_var,
        link_distance_range=(dmin * KM, dmax * KM),
        tx_power=tx_power,
        noise_power=noise_power,
    )


def reference_layers(eve_density: float = 0.0, names=("LEO", "HAPS", "Ground", "Sea")) -> list[Layer]:
    return [reference_layer(n, eve_density) for n in names]
