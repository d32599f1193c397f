"""Per-node secure-reachability classification on a node/adjacency dataset.

The SCP exponent of a layer is not a sum over hops, so shortest-path search
on per-edge weights does not find the most secure route. Instead, partial
paths are expanded one hop at a time up to ``hop_bound`` hops and every
candidate is re-evaluated as a whole route. Extensions of a path can only
raise its exponent under the Rayleigh-family models; for the Rician model
this is usually but not provably the case, so a ``beam`` of the best
partial paths per (node, depth) is kept rather than only the best one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import closedform
from .model import Hop, Layer, Route, Scenario, sample_k_factor
from .montecarlo import McConfig, estimate_scp
from .scenario_io import NodeDataset

WGS84_A = 6378137.0
WGS84_E2 = 6.69437999014e-3
CLASSIFY_MODELS = ("rician", "rayleigh_multi", "rayleigh_single", "erlang")


def geodetic_to_ecef(lat_deg, lon_deg, alt_m):
    lat = np.radians(lat_deg)
    lon = np.radians(lon_deg)
    n = WGS84_A / np.sqrt(1.0 - WGS84_E2 * np.sin(lat) ** 2)
    x = (n + alt_m) * np.cos(lat) * np.cos(lon)
    y = (n + alt_m) * np.cos(lat) * np.sin(lon)
    z = (n * (1.0 - WGS84_E2) + alt_m) * np.sin(lat)
    return np.stack([x, y, z], axis=-1)


def local_enu(dataset: NodeDataset, origin_id: str) -> dict[str, np.ndarray]:
    """East-north-up coordinates (m) of every node relative to ``origin_id``."""
    by_id = {n.id: n for n in dataset.nodes}
    o = by_id[origin_id]
    lat0, lon0 = math.radians(o.lat), math.radians(o.lon)
    rot = np.array([
        [-math.sin(lon0), math.cos(lon0), 0.0],
        [-math.sin(lat0) * math.cos(lon0), -math.sin(lat0) * math.sin(lon0), math.cos(lat0)],
        [math.cos(lat0) * math.cos(lon0), math.cos(lat0) * math.sin(lon0), math.sin(lat0)],
    ])
    ecef0 = geodetic_to_ecef(o.lat, o.lon, o.alt)
    return {n.id: rot @ (geodetic_to_ecef(n.lat, n.lon, n.alt) - ecef0) for n in dataset.nodes}


@dataclass(frozen=True)
class NodeResult:
    node_id: str
    layer_id: str
    model: str
    reachable: bool
    best_scp: float
    path: tuple[str, ...]
    passes: bool


class RouteEvaluator:
    """Full-route SCP for a node path, caching per-layer terms."""

    def __init__(self, layers: dict[str, Layer], hops: dict[tuple[str, str], Hop], model: str):
        self.layers = layers
        self.hops = hops
        self.model = model
        self._layer_fn = closedform._LAYER_FNS[model]
        self._cache = lru_cache(maxsize=200_000)(self._layer_exponent)

    def _layer_exponent(self, layer_id, hop_key):
        hops = [Hop(layer_id, d, k) for d, k in hop_key]
        try:
            return self._layer_fn(hops, self.layers[layer_id]).exponent
        except closedform.SingularCoefficientError:
            return math.inf

    def scp(self, path) -> float:
        groups: dict[str, list] = {}
        for u, v in zip(path, path[1:]):
            h = self.hops[(u, v)]
            groups.setdefault(h.layer_id, []).append((h.distance, h.k_factor))
        expo = sum(self._cache(lid, tuple(sorted(g))) for lid, g in groups.items())
        return math.exp(-expo)


def build_hops(dataset: NodeDataset, layers: dict[str, Layer], rng) -> dict[tuple[str, str], Hop]:
    """Directed hop for every edge; a hop belongs to its transmitter's layer.

    One K-factor is drawn per undirected edge so both directions share it.
    """
    pos = {n.id: geodetic_to_ecef(n.lat, n.lon, n.alt) for n in dataset.nodes}
    layer_of = {n.id: n.layer_id for n in dataset.nodes}
    hops = {}
    for a, b in dataset.edges:
        if a == b:
            continue
        d = float(np.linalg.norm(pos[a] - pos[b]))
        for u, v in ((a, b), (b, a)):
            if (u, v) in hops:
                continue
            lid = layer_of[u]
            if lid not in layers:
                raise ValueError(f"node {u!r} is in unknown layer {lid!r}")
            if (v, u) in hops:
                k = hops[(v, u)].k_factor if layer_of[v] == lid else float(sample_k_factor(layers[lid], rng))
            else:
                k = float(sample_k_factor(layers[lid], rng))
            hops[(u, v)] = Hop(lid, d, k)
    return hops


def best_paths(dataset: NodeDataset, source: str, evaluator: RouteEvaluator, hop_bound=7, beam=8):
    """Best (scp, path) per node over simple paths of at most ``hop_bound`` hops."""
    adj: dict[str, list[str]] = {n.id: [] for n in dataset.nodes}
    for u, v in evaluator.hops:
        adj[u].append(v)
    for k in adj:
        adj[k].sort()
    best = {source: (1.0, (source,))}
    frontier = [(source,)]
    for _ in range(hop_bound):
        cand: dict[str, list] = {}
        for path in frontier:
            for nxt in adj[path[-1]]:
                if nxt in path:
                    continue
                p = path + (nxt,)
                cand.setdefault(nxt, []).append((evaluator.scp(p), p))
        frontier = []
        for node in sorted(cand):
            ranked = sorted(cand[node], key=lambda t: (-t[0], t[1]))[:beam]
            if node != source and (node not in best or ranked[0][0] > best[node][0]):
                best[node] = ranked[0]
            frontier.extend(p for s, p in ranked if s > 0.0)
        if not frontier:
            break
    return best


def classify(dataset: NodeDataset, layers: list[Layer], source: str, threshold: float,
             models=CLASSIFY_MODELS, hop_bound=7, beam=8, seed=0, mc_trials=0):
    """Per-node, per-model verdict: does the best route from ``source`` reach ``threshold``."""
    ids = {n.id for n in dataset.nodes}
    if source not in ids:
        raise ValueError(f"source {source!r} is not in the dataset")
    layer_map = {l.id: l for l in layers}
    rng = np.random.default_rng(seed)
    hops = build_hops(dataset, layer_map, rng)
    results = []
    rician_best = None
    for model in models:
        ev = RouteEvaluator(layer_map, hops, model)
        best = best_paths(dataset, source, ev, hop_bound, beam)
        if model == "rician":
            rician_best = best
        for node in dataset.nodes:
            if node.id in best:
                scp, path = best[node.id]
                results.append(NodeResult(node.id, node.layer_id, model, True, scp, path, scp >= threshold))
            else:
                results.append(NodeResult(node.id, node.layer_id, model, False, 0.0, (), False))
    if mc_trials and rician_best is not None:
        for node in dataset.nodes:
            if node.id not in rician_best or node.id == source:
                reachable = node.id == source
                results.append(NodeResult(node.id, node.layer_id, "monte_carlo", reachable, float(reachable),
                                          (source,) if reachable else (), reachable and threshold <= 1.0))
                continue
            path = rician_best[node.id][1]
            route = Route(tuple(hops[(u, v)] for u, v in zip(path, path[1:])))
            est = estimate_scp(Scenario(tuple(layers), route, seed), McConfig(trials=mc_trials, seed=seed))
            results.append(NodeResult(node.id, node.layer_id, "monte_carlo", True, est.scp_hat, path,
                                      est.scp_hat >= threshold))
    return results
