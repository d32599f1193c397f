"""Scenario, sweep and dataset files.

Files use field-friendly units: link distances in km, powers in dBm, Eve
densities per square meter, K-factors linear. :class:`ScenarioFile` keeps
the file's own numbers so that parse -> serialize -> parse is exact; call
:meth:`ScenarioFile.build` to get the SI :class:`~ntnscp.model.Scenario`.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .model import KM, Hop, Layer, Route, Scenario, ScenarioError

SWEEP_PARAMETERS = ("eve_density", "k_factor_db", "avg_link_distance", "hop_count")
SWEEP_MODELS = ("rician", "rayleigh_multi", "rayleigh_single", "erlang", "monte_carlo")


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(w: float) -> float:
    return 10.0 * math.log10(w) + 30.0


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ScenarioError(f"{where}: missing field {key!r}")
    return obj[key]


def _number(obj: dict, key: str, where: str, default=None) -> float:
    if key not in obj:
        if default is None:
            raise ScenarioError(f"{where}: missing field {key!r}")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ScenarioError(f"{where}.{key}: expected a finite number, got {v!r}")
    return float(v)


@dataclass(frozen=True)
class LayerFile:
    id: str
    alpha: float
    eve_density: float
    k_db_mean: float
    k_db_var: float
    link_distance_range: tuple[float, float]
    tx_power: float = 40.0
    noise_power: float = -100.0

    @classmethod
    def from_dict(cls, d: dict, where: str) -> "LayerFile":
        if not isinstance(d, dict):
            raise ScenarioError(f"{where}: expected an object")
        rng = _require(d, "link_distance_range", where)
        if not (isinstance(rng, list) and len(rng) == 2):
            raise ScenarioError(f"{where}.link_distance_range: expected [min, max] in km")
        return cls(
            id=str(_require(d, "id", where)),
            alpha=_number(d, "alpha", where),
            eve_density=_number(d, "eve_density", where),
            k_db_mean=_number(d, "k_db_mean", where),
            k_db_var=_number(d, "k_db_var", where, 0.0),
            link_distance_range=(float(rng[0]), float(rng[1])),
            tx_power=_number(d, "tx_power", where, 40.0),
            noise_power=_number(d, "noise_power", where, -100.0),
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["link_distance_range"] = list(self.link_distance_range)
        return d

    def build(self) -> Layer:
        lo, hi = self.link_distance_range
        return Layer(
            id=self.id,
            alpha=self.alpha,
            eve_density=self.eve_density,
            k_db_mean=self.k_db_mean,
            k_db_var=self.k_db_var,
            link_distance_range=(lo * KM, hi * KM),
            tx_power=dbm_to_watts(self.tx_power),
            noise_power=dbm_to_watts(self.noise_power),
        )

    @classmethod
    def from_layer(cls, layer: Layer) -> "LayerFile":
        lo, hi = layer.link_distance_range
        return cls(
            id=layer.id,
            alpha=layer.alpha,
            eve_density=layer.eve_density,
            k_db_mean=layer.k_db_mean,
            k_db_var=layer.k_db_var,
            link_distance_range=(lo / KM, hi / KM),
            tx_power=watts_to_dbm(layer.tx_power),
            noise_power=watts_to_dbm(layer.noise_power),
        )


@dataclass(frozen=True)
class HopFile:
    layer_id: str
    distance: float
    k_factor: float

    @classmethod
    def from_dict(cls, d: dict, where: str) -> "HopFile":
        if not isinstance(d, dict):
            raise ScenarioError(f"{where}: expected an object")
        return cls(
            layer_id=str(_require(d, "layer_id", where)),
            distance=_number(d, "distance", where),
            k_factor=_number(d, "k_factor", where),
        )

    def build(self) -> Hop:
        return Hop(self.layer_id, self.distance * KM, self.k_factor)


@dataclass(frozen=True)
class ScenarioFile:
    layers: tuple[LayerFile, ...]
    hops: tuple[HopFile, ...]
    seed: int = 0

    @classmethod
    def from_dict(cls, d: Any) -> "ScenarioFile":
        if not isinstance(d, dict):
            raise ScenarioError("scenario: expected a JSON object")
        layers = _require(d, "layers", "scenario")
        if not isinstance(layers, list) or not layers:
            raise ScenarioError("scenario.layers: expected a nonempty list")
        route = _require(d, "route", "scenario")
        if not isinstance(route, dict):
            raise ScenarioError("scenario.route: expected an object")
        hops = _require(route, "hops", "scenario.route")
        if not isinstance(hops, list):
            raise ScenarioError("scenario.route.hops: expected a list")
        seed = d.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
            raise ScenarioError("scenario.seed: expected a 64-bit nonnegative integer")
        return cls(
            layers=tuple(LayerFile.from_dict(l, f"scenario.layers[{i}]") for i, l in enumerate(layers)),
            hops=tuple(HopFile.from_dict(h, f"scenario.route.hops[{i}]") for i, h in enumerate(hops)),
            seed=seed,
        )

    def to_dict(self) -> dict:
        return {
            "layers": [l.to_dict() for l in self.layers],
            "route": {"hops": [asdict(h) for h in self.hops]},
            "seed": self.seed,
        }

    def build(self) -> Scenario:
        return Scenario(
            tuple(l.build() for l in self.layers),
            Route(tuple(h.build() for h in self.hops)),
            self.seed,
        )

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> "ScenarioFile":
        return cls(
            layers=tuple(LayerFile.from_layer(l) for l in scenario.layers),
            hops=tuple(HopFile(h.layer_id, h.distance / KM, h.k_factor) for h in scenario.route.hops),
            seed=scenario.seed,
        )


def loads_scenario(text: str) -> ScenarioFile:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario: malformed JSON ({exc})") from exc
    return ScenarioFile.from_dict(raw)


def dumps_scenario(sf: ScenarioFile) -> str:
    return json.dumps(sf.to_dict(), indent=2) + "\n"


def load_scenario(path) -> ScenarioFile:
    return loads_scenario(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple[float, ...]
    models: tuple[str, ...] = ("rician", "rayleigh_multi", "rayleigh_single", "erlang")
    trials: int | None = None
    seed: int | None = None
    mode: str = "common"
    fixed: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: Any) -> "SweepSpec":
        if not isinstance(d, dict):
            raise ScenarioError("sweep: expected a JSON object")
        param = _require(d, "parameter", "sweep")
        if param not in SWEEP_PARAMETERS:
            raise ScenarioError(f"sweep.parameter: expected one of {SWEEP_PARAMETERS}, got {param!r}")
        values = _require(d, "values", "sweep")
        if isinstance(values, dict):
            start = _number(values, "from", "sweep.values")
            stop = _number(values, "to", "sweep.values")
            count = int(_number(values, "count", "sweep.values"))
            spacing = values.get("spacing", "linear")
            if count < 1:
                raise ScenarioError("sweep.values.count: must be >= 1")
            if spacing == "linear":
                vals = np.linspace(start, stop, count)
            elif spacing == "log":
                if start <= 0 or stop <= 0:
                    raise ScenarioError("sweep.values: log spacing needs positive bounds")
                vals = np.logspace(math.log10(start), math.log10(stop), count)
            else:
                raise ScenarioError(f"sweep.values.spacing: expected 'linear' or 'log', got {spacing!r}")
            values = [float(v) for v in vals]
        if not isinstance(values, list) or not values:
            raise ScenarioError("sweep.values: expected a nonempty list or a range object")
        values = tuple(_number({"v": v}, "v", "sweep.values") for v in values)
        models = tuple(d.get("models", cls.models))
        bad = [m for m in models if m not in SWEEP_MODELS]
        if bad or not models:
            raise ScenarioError(f"sweep.models: unknown or empty {bad}; choose from {SWEEP_MODELS}")
        trials = d.get("trials")
        if "monte_carlo" in models and trials is None:
            raise ScenarioError("sweep.trials: required when models include monte_carlo")
        if trials is not None and (not isinstance(trials, int) or trials < 1):
            raise ScenarioError("sweep.trials: expected a positive integer")
        fixed = d.get("fixed", {})
        if not isinstance(fixed, dict) or any(k not in SWEEP_PARAMETERS for k in fixed):
            raise ScenarioError(f"sweep.fixed: keys must be among {SWEEP_PARAMETERS}")
        mode = d.get("mode", "common")
        if mode not in ("common", "exact"):
            raise ScenarioError("sweep.mode: expected 'common' or 'exact'")
        return cls(param, values, models, trials, d.get("seed"), mode, dict(fixed))


def load_sweep(path) -> SweepSpec:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"sweep: malformed JSON ({exc})") from exc
    return SweepSpec.from_dict(raw)


@dataclass(frozen=True)
class Node:
    id: str
    layer_id: str
    lat: float
    lon: float
    alt: float


@dataclass(frozen=True)
class NodeDataset:
    nodes: tuple[Node, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self):
        ids = {n.id for n in self.nodes}
        if len(ids) != len(self.nodes):
            raise ScenarioError("dataset: duplicate node id")
        for n in self.nodes:
            if not (-90.0 <= n.lat <= 90.0 and -180.0 <= n.lon <= 180.0):
                raise ScenarioError(f"dataset: node {n.id!r} has invalid lat/lon")
        for a, b in self.edges:
            if a not in ids or b not in ids:
                raise ScenarioError(f"adjacency: edge ({a}, {b}) refers to an unknown node")


def load_dataset(nodes_csv, adjacency_csv) -> NodeDataset:
    nodes = []
    with open(nodes_csv, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"id", "layer", "lat", "lon", "alt"} - set(reader.fieldnames or ())
        if missing:
            raise ScenarioError(f"dataset: missing columns {sorted(missing)}")
        for i, row in enumerate(reader):
            try:
                nodes.append(Node(row["id"], row["layer"], float(row["lat"]), float(row["lon"]), float(row["alt"])))
            except ValueError as exc:
                raise ScenarioError(f"dataset row {i + 1}: {exc}") from exc
    if adjacency_csv is None:
        raise ScenarioError("adjacency: an explicit adjacency CSV is required")
    edges = []
    with open(adjacency_csv, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"id_a", "id_b"} - set(reader.fieldnames or ())
        if missing:
            raise ScenarioError(f"adjacency: missing columns {sorted(missing)}")
        for row in reader:
            edges.append((row["id_a"], row["id_b"]))
    return NodeDataset(tuple(nodes), tuple(edges))
