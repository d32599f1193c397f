"""Monte-Carlo ground truth for the secure connection probability.

Each trial draws legitimate Rician fades, deploys eavesdroppers as a
homogeneous Poisson point process around the layer, lets every Eve combine
all hops of the layer (MRC), and declares the layer secure when the weakest
legitimate SNR beats the strongest combined Eve SNR.

Eves are generated in order of increasing distance from the reference point
(cumulative exponential arrivals of the mapped 1-D process), so a trial
stops as soon as one Eve wins. The window around the reference point is
truncated per trial at the radius beyond which no Eve whose combined fade is
below its (1 - fade_tail) quantile can beat that trial's legitimate SNR, and
never below ``floor_factor`` times the longest hop of the layer.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .model import Layer, Scenario
from .specfun import rician_power_isf, sample_rician_power

MODES = ("common", "exact")


@dataclass(frozen=True)
class McConfig:
    trials: int = 100_000
    seed: int = 0
    mode: str = "common"
    truncation_radius: Optional[Mapping[str, float]] = None
    truncation_scale: float = 1.0
    fade_tail: float = 1e-6
    floor_factor: float = 10.0
    block_size: int = 4096
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.truncation_radius is not None:
            if any(not r > 0 for r in self.truncation_radius.values()):
                raise ValueError("truncation_radius must be > 0")
        if not self.truncation_scale > 0:
            raise ValueError("truncation_scale must be > 0")


@dataclass(frozen=True)
class McEstimate:
    scp_hat: float
    half_width_95: float
    per_layer_scp_hat: dict = field(default_factory=dict)
    trials: int = 0
    secure: int = 0

    def as_dict(self):
        return {
            "scp_hat": self.scp_hat,
            "half_width_95": self.half_width_95,
            "per_layer_scp_hat": dict(self.per_layer_scp_hat),
            "trials": self.trials,
            "secure": self.secure,
        }


def sample_hppp_disc(density, radius, rng):
    """HPPP on a disc centred at the origin; returns an (n, 2) array."""
    if density < 0 or not radius > 0:
        raise ValueError("density must be >= 0 and radius > 0")
    n = rng.poisson(density * math.pi * radius * radius) if density > 0 else 0
    r = radius * np.sqrt(rng.random(n))
    phi = rng.uniform(0.0, 2.0 * math.pi, n)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def _tx_positions(hops):
    """x-coordinates of the hop transmitters laid out on a line from the origin."""
    d = np.array([h.distance for h in hops])
    return np.concatenate([[0.0], np.cumsum(d)[:-1]])


def _legit_min_snr(hops, layer, n, rng):
    k = np.array([h.k_factor for h in hops])
    d = np.array([h.distance for h in hops])
    g = sample_rician_power(k, rng, (n, len(hops)))
    return np.min(layer.snr_scale * g / d**layer.alpha, axis=1)


def _eve_snr(hops, layer, r, phi, rng, mode):
    """Combined (MRC) Eve SNR for Eves at polar positions (r, phi), any shape."""
    k = np.array([h.k_factor for h in hops])
    g = sample_rician_power(k, rng, r.shape + (len(hops),))
    if mode == "common":
        return layer.snr_scale * g.sum(axis=-1) / r**layer.alpha
    tx = _tx_positions(hops)
    dx = (r * np.cos(phi))[..., None] - tx
    dy = (r * np.sin(phi))[..., None]
    dist2 = dx * dx + dy * dy
    return layer.snr_scale * np.sum(g / dist2 ** (0.5 * layer.alpha), axis=-1)


def truncation_radii(hops, layer, eps, config: McConfig):
    """Per-trial Eve window radius given each trial's legitimate SNR ``eps``."""
    if config.truncation_radius is not None and layer.id in config.truncation_radius:
        return np.full(eps.shape, config.truncation_radius[layer.id] * config.truncation_scale)
    n = len(hops)
    y_q = sum(rician_power_isf(config.fade_tail / n, h.k_factor) for h in hops)
    span = _tx_positions(hops)[-1] if config.mode == "exact" else 0.0
    floor = config.floor_factor * max(h.distance for h in hops)
    with np.errstate(divide="ignore"):
        reach = (layer.snr_scale * y_q / eps) ** (1.0 / layer.alpha)
    return np.maximum(floor, span + reach) * config.truncation_scale


def simulate_layer(hops, layer: Layer, n: int, rng, config: McConfig):
    """Boolean array: is the layer secure in each of ``n`` trials."""
    eps = _legit_min_snr(hops, layer, n, rng)
    secure = np.ones(n, dtype=bool)
    lam = layer.eve_density
    if lam == 0.0:
        return secure
    radius = truncation_radii(hops, layer, eps, config)
    gamma_max = lam * math.pi * radius * radius
    cum = np.zeros(n)
    active = np.arange(n)
    chunk = 16
    budget = 2_000_000
    while active.size:
        c = int(max(1, min(chunk, budget // (active.size * len(hops)))))
        arrivals = cum[active, None] + np.cumsum(rng.standard_exponential((active.size, c)), axis=1)
        inside = arrivals <= gamma_max[active, None]
        r = np.sqrt(arrivals / (lam * math.pi))
        phi = rng.uniform(0.0, 2.0 * math.pi, r.shape) if config.mode == "exact" else None
        snr = _eve_snr(hops, layer, r, phi, rng, config.mode)
        beaten = np.any(inside & (snr >= eps[active, None]), axis=1)
        secure[active[beaten]] = False
        done = beaten | ~inside[:, -1]
        cum[active] = arrivals[:, -1]
        active = active[~done]
        chunk = min(chunk * 2, 8192)
    return secure


def simulate_trials(scenario: Scenario, config: McConfig, rng, n: int):
    """Per-layer (n, L) and end-to-end (n,) security outcomes for n trials."""
    groups = scenario.groups()
    per_layer = np.empty((n, len(groups)), dtype=bool)
    for j, (layer, hops) in enumerate(groups):
        per_layer[:, j] = simulate_layer(hops, layer, n, rng, config)
    return per_layer, per_layer.all(axis=1)


def simulate_trial(scenario: Scenario, config: McConfig, rng):
    per_layer, e2e = simulate_trials(scenario, config, rng, 1)
    ids = [layer.id for layer, _ in scenario.groups()]
    return dict(zip(ids, per_layer[0].tolist())), bool(e2e[0])


def secure_against_eves(hops, layer: Layer, eves_xy, rng, mode="common") -> bool:
    """One trial against a fixed set of Eve positions (reference point at origin)."""
    eps = _legit_min_snr(hops, layer, 1, rng)[0]
    eves_xy = np.asarray(eves_xy, dtype=float).reshape(-1, 2)
    if eves_xy.shape[0] == 0:
        return True
    r = np.hypot(eves_xy[:, 0], eves_xy[:, 1])
    phi = np.arctan2(eves_xy[:, 1], eves_xy[:, 0])
    snr = _eve_snr(hops, layer, r, phi, rng, mode)
    return bool(np.all(snr < eps))


def block_rng(seed: int, block: int):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(block,))))


def _run_block(args):
    scenario, config, block, n = args
    per_layer, e2e = simulate_trials(scenario, config, block_rng(config.seed, block), n)
    return per_layer.sum(axis=0), int(e2e.sum())


def estimate_scp(scenario: Scenario, config: McConfig) -> McEstimate:
    """Empirical SCP over ``config.trials`` trials.

    Trials are split into fixed blocks, each with its own stream derived from
    (seed, block index), so the result does not depend on ``workers``.
    """
    bs = config.block_size
    sizes = [bs] * (config.trials // bs)
    if config.trials % bs:
        sizes.append(config.trials % bs)
    jobs = [(scenario, config, b, n) for b, n in enumerate(sizes)]
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_run_block, jobs))
    else:
        results = [_run_block(j) for j in jobs]
    layer_counts = sum(r[0] for r in results)
    secure = sum(r[1] for r in results)
    p = secure / config.trials
    ids = [layer.id for layer, _ in scenario.groups()]
    return McEstimate(
        scp_hat=p,
        half_width_95=1.96 * math.sqrt(p * (1.0 - p) / config.trials),
        per_layer_scp_hat={lid: int(c) / config.trials for lid, c in zip(ids, layer_counts)},
        trials=config.trials,
        secure=int(secure),
    )
