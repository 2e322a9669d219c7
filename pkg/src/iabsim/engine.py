"""Monte Carlo driver: realizations, coverage estimation, sweeps.

A realization is fully determined by (config, seed): every random
component draws from its own substream keyed by (seed, component id), so
changing one density re-rolls only that component and common-random-number
sweeps stay coupled. Realization seeds are master_seed + index; results
are reduced in index order, which keeps outputs bit-identical for any
worker count.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_MU_GRID, ScenarioConfig
from .errors import ConfigError, EmptyNetworkError, EstimationError
from .geometry import NodeSet, Region, WallSet, sample_segments
from .network import (
    AssociationMap,
    NetworkRealization,
    RateReport,
    access_interference_mw,
    access_link_matrices,
    allocate_bandwidth,
    associate_backhaul,
    associate_ues,
    backhaul_interference_mw,
    backhaul_link_matrices,
    backhaul_signal_dbm,
    compute_rates,
    count_loads,
    coverage_fraction,
    pick_targets,
)
from .propagation import sample_fading_power
from .terrain3d import Scene3D, generate_synthetic_city, load_buildings

# Substream ids; the draw order within a realization is part of the
# determinism contract.
_S_MBS, _S_SBS, _S_UE, _S_WALLS, _S_TREES, _S_FIBER = 0, 1, 2, 3, 4, 5
_S_FADING_ACCESS, _S_FADING_BACKHAUL, _S_BEAM, _S_BEAM_BACKHAUL, _S_CITY = 6, 7, 8, 9, 10
_S_FADING_ASSOC = 11

# Axes accepted by sweep(); values land on the config field of the same name.
SWEEPABLE_AXES = (
    "sbs_density",
    "wall_density",
    "wall_length",
    "rain_rate",
    "tree_length",
    "tree_density",
    "mu",
    "fiber_fraction",
    "sbs_height",
    "rate_threshold_bps",
)

_NORMAL_95 = 1.959963984540054

_footprint_scene_cache: dict[str, Scene3D] = {}


@dataclass
class Realization:
    """One sampled world plus every random draw the evaluation consumes."""

    seed: int
    net: NetworkRealization
    h_access: np.ndarray  # (n_ue, n_bs) unit-mean exponential
    h_backhaul: np.ndarray  # (n_sbs, n_mbs)
    beam_u: np.ndarray  # (n_bs,) uniforms picking each cell's beam target
    beam_backhaul_u: np.ndarray  # (n_mbs,) uniforms picking each donor's target child
    h_assoc: np.ndarray | None = None  # association-slot fading, if enabled


@dataclass
class RealizationResult:
    """Outcome of one realization; discarded ones carry only the flag."""

    seed: int
    discarded: bool
    n_ue: int
    coverage: float
    rates_bps: np.ndarray
    hop_lengths_m: np.ndarray
    assoc: AssociationMap | None = None
    report: RateReport | None = None


@dataclass
class CoverageResult:
    """Aggregated Monte Carlo estimate with a normal-approximation 95% CI."""

    coverage: float
    ci_halfwidth: float
    fractions: np.ndarray  # per non-discarded realization
    mean_hop_m: float | None
    mean_rate_bps: float
    discarded: int
    n_realizations: int


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream])


def _scene_for(cfg: ScenarioConfig, seed: int) -> Scene3D:
    if cfg.footprints_path:
        scene = _footprint_scene_cache.get(cfg.footprints_path)
        if scene is None:
            scene = Scene3D(load_buildings(cfg.footprints_path))
            _footprint_scene_cache[cfg.footprints_path] = scene
        return scene
    prisms = generate_synthetic_city(
        cfg.building_density,
        (cfg.building_size_min, cfg.building_size_max),
        (cfg.building_height_min, cfg.building_height_max),
        Region(cfg.radius_m),
        _rng(seed, _S_CITY),
    )
    return Scene3D(prisms)


def build_realization(cfg: ScenarioConfig, seed: int) -> Realization:
    """Sample the world and all channel randomness for one realization."""
    region = Region(cfg.radius_m)
    mbs = NodeSet.sample("MBS", cfg.mbs_density, cfg.mbs_height, region, _rng(seed, _S_MBS), cfg.n_mbs)
    sbs = NodeSet.sample("SBS", cfg.sbs_density, cfg.sbs_height, region, _rng(seed, _S_SBS), cfg.n_sbs)
    ues = NodeSet.sample("UE", cfg.ue_density, cfg.ue_height, region, _rng(seed, _S_UE), cfg.n_ue)
    scene = None
    if cfg.mode == "3d":
        # Blockage in 3d mode comes from prisms; the 2d wall process is unused.
        walls = WallSet.empty()
        scene = _scene_for(cfg, seed)
    else:
        walls = sample_segments(cfg.wall_density, cfg.wall_length, region, _rng(seed, _S_WALLS))
    trees = sample_segments(
        cfg.tree_density, cfg.tree_length, region, _rng(seed, _S_TREES),
        in_leaf_prob=cfg.in_leaf_prob,
    )
    n_fiber = int(math.floor(cfg.fiber_fraction * sbs.n + 0.5))
    fiber = np.zeros(sbs.n, dtype=bool)
    if n_fiber:
        fiber[_rng(seed, _S_FIBER).choice(sbs.n, n_fiber, replace=False)] = True
    net = NetworkRealization(mbs, sbs, ues, walls, trees, fiber, scene)
    h_access = sample_fading_power(_rng(seed, _S_FADING_ACCESS), (ues.n, mbs.n + sbs.n))
    if cfg.backhaul_fading:
        h_backhaul = sample_fading_power(_rng(seed, _S_FADING_BACKHAUL), (sbs.n, mbs.n))
    else:
        h_backhaul = np.ones((sbs.n, mbs.n))
    beam_u = _rng(seed, _S_BEAM).random(mbs.n + sbs.n)
    beam_backhaul_u = _rng(seed, _S_BEAM_BACKHAUL).random(mbs.n)
    h_assoc = None
    if cfg.association_fading:
        h_assoc = sample_fading_power(_rng(seed, _S_FADING_ASSOC), (ues.n, mbs.n + sbs.n))
    return Realization(seed, net, h_access, h_backhaul, beam_u, beam_backhaul_u, h_assoc)


def _discarded(real: Realization) -> RealizationResult:
    return RealizationResult(
        real.seed, True, real.net.n_ue, float("nan"), np.empty(0), np.empty(0)
    )


def evaluate_realization(
    cfg: ScenarioConfig, real: Realization, mus=None
) -> RealizationResult | list[RealizationResult]:
    """Run the pipeline on a built realization.

    With `mus` a sequence, evaluates the bandwidth split for each value on
    the shared world (association and interference do not depend on mu) and
    returns one result per value; otherwise uses cfg.mu and returns one.
    """
    single = mus is None
    mu_list = [cfg.mu] if single else list(mus)
    net = real.net
    if net.n_ue == 0:
        out = _discarded(real)
        return out if single else [out] * len(mu_list)
    try:
        links = access_link_matrices(net, cfg)
        ue_to_bs = associate_ues(links, cfg.association_rule, real.h_assoc)
        bh = backhaul_link_matrices(net, cfg)
        parents = associate_backhaul(bh, net.fiber_sbs)
    except EmptyNetworkError:
        out = _discarded(real)
        return out if single else [out] * len(mu_list)
    assoc = AssociationMap(ue_to_bs, parents, net.fiber_sbs)
    loads = count_loads(assoc, net.n_bs, net.n_mbs)
    targets = pick_targets(ue_to_bs, net.n_bs, real.beam_u)
    interference = access_interference_mw(net, cfg, links, ue_to_bs, loads, targets, real.h_access)
    sig_dbm = (
        np.take_along_axis(links.avg_rx_dbm, ue_to_bs[:, None], axis=1)[:, 0]
        + 10.0 * np.log10(np.take_along_axis(real.h_access, ue_to_bs[:, None], axis=1)[:, 0])
    )
    bh_sig = backhaul_signal_dbm(net, cfg, bh, parents, real.h_backhaul)
    mbs_targets = pick_targets(parents, net.n_mbs, real.beam_backhaul_u)
    if cfg.backhaul_interference:
        bh_interference = backhaul_interference_mw(
            net, cfg, bh, parents, mbs_targets, real.h_backhaul
        )
    else:
        bh_interference = np.zeros(net.n_sbs)
    attached = np.flatnonzero(parents >= 0)
    hops = bh.distance_m[attached, parents[attached]] if len(attached) else np.empty(0)
    results = []
    for mu in mu_list:
        plan = allocate_bandwidth(mu, cfg.bandwidth_hz, loads, assoc)
        report = compute_rates(
            plan, assoc, loads, sig_dbm, interference, bh_sig, bh_interference,
            cfg.noise_figure_db, cfg.backhaul_cap_model,
        )
        cov = coverage_fraction(report.ue_rate_bps, cfg.rate_threshold_bps)
        results.append(
            RealizationResult(
                real.seed, False, net.n_ue, cov, report.ue_rate_bps, hops, assoc, report
            )
        )
    return results[0] if single else results


def run_realization(cfg: ScenarioConfig, seed: int) -> RealizationResult:
    """Build and evaluate one realization; deterministic in (cfg, seed)."""
    return evaluate_realization(cfg, build_realization(cfg, seed))


def mean_hop_length(results) -> float | None:
    """Pooled mean SBS->parent distance across realizations; None if no hops."""
    total = 0.0
    count = 0
    for r in results:
        total += float(np.sum(r.hop_lengths_m))
        count += len(r.hop_lengths_m)
    return total / count if count else None


# Light per-realization rows shipped back from workers: one tuple per mu
# value: (coverage, n_ue, rate_sum, hop_sum, hop_count, discarded).
def _run_one(args):
    cfg, seed, mus = args
    if mus is None:
        mus = [cfg.mu]
    results = evaluate_realization(cfg, build_realization(cfg, seed), mus)
    return [
        (
            r.coverage,
            r.n_ue,
            float(np.sum(r.rates_bps)),
            float(np.sum(r.hop_lengths_m)),
            len(r.hop_lengths_m),
            r.discarded,
        )
        for r in results
    ]


def _collect(rows) -> CoverageResult:
    kept = [r for r in rows if not r[5]]
    n_total = len(rows)
    if not kept:
        raise EstimationError(f"all {n_total} realizations were discarded")
    fractions = np.array([r[0] for r in kept])
    rho = float(np.mean(fractions))
    if len(fractions) > 1:
        ci = _NORMAL_95 * float(np.std(fractions, ddof=1)) / math.sqrt(len(fractions))
    else:
        ci = 0.0
    ue_total = sum(r[1] for r in kept)
    rate_sum = sum(r[2] for r in kept)
    hop_sum = sum(r[3] for r in kept)
    hop_count = sum(r[4] for r in kept)
    return CoverageResult(
        coverage=rho,
        ci_halfwidth=ci,
        fractions=fractions,
        mean_hop_m=(hop_sum / hop_count) if hop_count else None,
        mean_rate_bps=rate_sum / ue_total if ue_total else float("nan"),
        discarded=n_total - len(kept),
        n_realizations=n_total,
    )


def _map_realizations(cfg: ScenarioConfig, mus, workers: int):
    tasks = [(cfg, cfg.master_seed + i, mus) for i in range(cfg.realizations)]
    if workers <= 1:
        return [_run_one(t) for t in tasks]
    with multiprocessing.Pool(workers) as pool:
        return pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (8 * workers)))


def run_monte_carlo(cfg: ScenarioConfig, workers: int = 1) -> CoverageResult:
    """Estimate coverage over cfg.realizations independent realizations."""
    per_real = _map_realizations(cfg, None, workers)
    return _collect([rows[0] for rows in per_real])


def sweep(
    cfg: ScenarioConfig,
    axis: str,
    values,
    common_random_numbers: bool = True,
    workers: int = 1,
) -> list[tuple[float, CoverageResult]]:
    """One CoverageResult per axis value.

    With common random numbers every value reuses the same realization
    seeds, so compared curves share their worlds. The mu axis additionally
    shares the sampled worlds outright (the split only affects the rate
    stage), which is exact, not an approximation.
    """
    if axis not in SWEEPABLE_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; choose from {SWEEPABLE_AXES}")
    values = list(values)
    if not values:
        return []
    if axis == "mu" and common_random_numbers:
        for v in values:
            if not 0 <= v <= 1:
                raise ConfigError(f"mu value {v} outside [0, 1]")
        per_real = _map_realizations(cfg, values, workers)
        out = []
        for idx, v in enumerate(values):
            out.append((v, _collect([rows[idx] for rows in per_real])))
        return out
    out = []
    for idx, v in enumerate(values):
        updates = {axis: v}
        if not common_random_numbers:
            updates["master_seed"] = cfg.master_seed + idx * cfg.realizations
        out.append((v, run_monte_carlo(cfg.with_updates(**updates), workers)))
    return out


def optimize_mu(
    cfg: ScenarioConfig, grid=None, workers: int = 1
) -> tuple[float, CoverageResult]:
    """Grid-search the bandwidth split with common random numbers.

    Returns the grid value maximizing estimated coverage; ties go to the
    smaller mu.
    """
    grid = list(DEFAULT_MU_GRID if grid is None else grid)
    if not grid:
        raise ConfigError("optimize_mu needs a non-empty grid")
    results = sweep(cfg, "mu", grid, common_random_numbers=True, workers=workers)
    best_mu, best = results[0]
    for mu, res in results[1:]:
        if res.coverage > best.coverage or (res.coverage == best.coverage and mu < best_mu):
            best_mu, best = mu, res
    return best_mu, best
