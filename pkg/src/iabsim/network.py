"""Logical network for one sampled world: association, allocation, rates.

Base stations are indexed with every MBS first, then every SBS, so ties in
the association rules resolve toward macros and lower indices. All heavy
quantities are (n_ue, n_bs) or (n_sbs, n_mbs) matrices; the per-link
scalar operations in `propagation` define the arithmetic these matrices
must reproduce.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import terrain3d
from .config import ScenarioConfig
from .errors import EmptyNetworkError, InvalidParameterError, UndefinedCoverageError
from .geometry import NodeSet, TreeLineSet, WallSet, los_mask, tree_crossing_counts
from .propagation import (
    ChannelParams,
    MIN_PATH_DISTANCE_M,
    foliage_loss_from_counts,
    path_loss_db,
    rain_coefficients,
    rain_loss_db,
)

THERMAL_NOISE_DBM_PER_HZ = -174.0


@dataclass
class NetworkRealization:
    """One sampled world: nodes, obstacles, and the fiber-connected subset."""

    mbs: NodeSet
    sbs: NodeSet
    ues: NodeSet
    walls: WallSet
    trees: TreeLineSet
    fiber_sbs: np.ndarray  # (n_sbs,) bool
    scene: terrain3d.Scene3D | None = None  # set in 3d mode

    @property
    def n_mbs(self) -> int:
        return self.mbs.n

    @property
    def n_sbs(self) -> int:
        return self.sbs.n

    @property
    def n_ue(self) -> int:
        return self.ues.n

    @property
    def n_bs(self) -> int:
        return self.n_mbs + self.n_sbs

    def bs_positions(self) -> np.ndarray:
        """(n_bs, 2): all MBS rows first, then all SBS rows."""
        return np.vstack([self.mbs.positions, self.sbs.positions])

    def bs_heights(self) -> np.ndarray:
        return np.concatenate([self.mbs.heights, self.sbs.heights])

    def bs_positions_3d(self) -> np.ndarray:
        return np.column_stack([self.bs_positions(), self.bs_heights()])

    def ue_positions_3d(self) -> np.ndarray:
        return np.column_stack([self.ues.positions, self.ues.heights])


@dataclass
class AssociationMap:
    """Serving cell per UE and parent donor per SBS (-1 for fiber SBSs)."""

    ue_to_bs: np.ndarray  # (n_ue,) int, index into the combined BS list
    sbs_to_mbs: np.ndarray  # (n_sbs,) int, MBS index or -1
    fiber_sbs: np.ndarray  # (n_sbs,) bool


@dataclass
class LoadTable:
    """UE counts per BS plus the summed IAB-child load per donor."""

    per_bs: np.ndarray  # (n_bs,) int
    donor_child_load: np.ndarray  # (n_mbs,) int, sum of non-fiber child SBS loads


@dataclass
class BandwidthPlan:
    mu: float
    total_hz: float
    backhaul_share_per_sbs: np.ndarray  # (n_sbs,) Hz, 0 for fiber SBSs
    access_share_per_ue: np.ndarray  # (n_ue,) Hz


@dataclass
class RateReport:
    ue_rate_bps: np.ndarray  # (n_ue,)
    sbs_backhaul_rate_bps: np.ndarray  # (n_sbs,) 0 where fiber/unloaded
    ue_sinr_db: np.ndarray  # (n_ue,)


@dataclass
class AccessLinks:
    """Per UE x BS link budget components at h=1 and boresight gains.

    avg_rx_dbm is the full fading-free budget (drives the signal term);
    assoc_metric_dbm leaves the transient weather terms (rain, foliage
    state) out: cell selection follows long-term signal statistics, i.e.
    distance and blockage, and does not re-home UEs when weather moves.
    With no rain and no trees the two are identical.
    """

    distance_m: np.ndarray
    los: np.ndarray
    pathloss_db: np.ndarray
    rain_db: np.ndarray
    foliage_db: np.ndarray
    avg_rx_dbm: np.ndarray
    assoc_metric_dbm: np.ndarray
    bs_tx_dbm: np.ndarray  # (n_bs,) transmit powers backing the metric


@dataclass
class BackhaulLinks:
    """Per SBS x MBS link components (gains excluded; see association rule)."""

    distance_m: np.ndarray
    los: np.ndarray
    pathloss_db: np.ndarray
    rain_db: np.ndarray
    foliage_db: np.ndarray


def _channel(cfg: ScenarioConfig) -> ChannelParams:
    return ChannelParams(cfg.carrier_ghz, cfg.alpha_los, cfg.alpha_nlos)


def _weather_db(cfg: ScenarioConfig, dist, a_xy, b_xy, trees: TreeLineSet):
    """Rain and foliage loss matrices for links a[i] -> b[j]."""
    if cfg.rain_rate > 0:
        rain = rain_loss_db(
            cfg.rain_rate, dist, rain_coefficients(cfg.carrier_ghz), cfg.rain_polarization
        )
    else:
        rain = np.zeros_like(dist)
    if trees.n:
        n_in, n_out = tree_crossing_counts(a_xy, b_xy, trees)
        fol = foliage_loss_from_counts(n_in, n_out, cfg.tree_depth, cfg.carrier_ghz * 1e3)
    else:
        fol = np.zeros_like(dist)
    return rain, fol


def _pair_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


def _bs_tx_dbm(real: NetworkRealization, cfg: ScenarioConfig) -> np.ndarray:
    return np.concatenate(
        [
            np.full(real.n_mbs, cfg.mbs_power_dbm),
            np.full(real.n_sbs, cfg.sbs_power_dbm),
        ]
    )


def access_link_matrices(real: NetworkRealization, cfg: ScenarioConfig) -> AccessLinks:
    """Distance, blockage, losses and average received power, UE x BS."""
    ue_xy = real.ues.positions
    bs_xy = real.bs_positions()
    if cfg.mode == "3d":
        dist = _pair_distances(real.ue_positions_3d(), real.bs_positions_3d())
        los = terrain3d.scene_los_mask(real.ue_positions_3d(), real.bs_positions_3d(), real.scene)
    else:
        dist = _pair_distances(ue_xy, bs_xy)
        los = los_mask(ue_xy, bs_xy, real.walls)
    pl = path_loss_db(np.maximum(dist, MIN_PATH_DISTANCE_M), los, _channel(cfg))
    rain, fol = _weather_db(cfg, dist, ue_xy, bs_xy, real.trees)
    tx = _bs_tx_dbm(real, cfg)
    metric = tx[None, :] + cfg.bs_main_gain_dbi + cfg.ue_gain_dbi - pl
    return AccessLinks(dist, los, pl, rain, fol, metric - rain - fol, metric, tx)


def backhaul_link_matrices(real: NetworkRealization, cfg: ScenarioConfig) -> BackhaulLinks:
    """Distance, blockage and losses, SBS x MBS."""
    sbs_xy = real.sbs.positions
    mbs_xy = real.mbs.positions
    if cfg.mode == "3d":
        sbs3 = np.column_stack([sbs_xy, real.sbs.heights])
        mbs3 = np.column_stack([mbs_xy, real.mbs.heights])
        dist = _pair_distances(sbs3, mbs3)
        los = terrain3d.scene_los_mask(sbs3, mbs3, real.scene)
    else:
        dist = _pair_distances(sbs_xy, mbs_xy)
        los = los_mask(sbs_xy, mbs_xy, real.walls)
    pl = path_loss_db(np.maximum(dist, MIN_PATH_DISTANCE_M), los, _channel(cfg))
    rain, fol = _weather_db(cfg, dist, sbs_xy, mbs_xy, real.trees)
    return BackhaulLinks(dist, los, pl, rain, fol)


def associate_ues(
    links: AccessLinks, rule: str = "max_power", slot_fading: np.ndarray | None = None
) -> np.ndarray:
    """Serving BS per UE, ties to the lower BS index.

    'max_power' maximizes average received power (boresight gains, rain and
    blockage in, foliage state out); 'max_power_over_r' divides the
    candidate powers by one extra distance factor; 'min_pathloss' drops the
    transmit-power term, so the power gap between node classes stops
    steering cell selection. With slot_fading given, selection happens on
    that slot's instantaneous powers instead of the averages.
    """
    if links.assoc_metric_dbm.shape[1] == 0:
        raise EmptyNetworkError("cannot associate UEs: no base stations")
    metric = links.assoc_metric_dbm
    if rule == "min_pathloss":
        metric = metric - links.bs_tx_dbm[None, :]
    elif rule == "max_power_over_r":
        metric = metric - 10.0 * np.log10(np.maximum(links.distance_m, MIN_PATH_DISTANCE_M))
    elif rule != "max_power":
        raise InvalidParameterError(f"unknown association rule {rule!r}")
    if slot_fading is not None:
        metric = metric + 10.0 * np.log10(slot_fading)
    return np.argmax(metric, axis=1)


def associate_backhaul(bh: BackhaulLinks, fiber_sbs: np.ndarray) -> np.ndarray:
    """Parent MBS per SBS: minimum path loss; fiber SBSs get -1."""
    n_sbs, n_mbs = bh.pathloss_db.shape
    if n_sbs == 0:
        return np.empty(0, dtype=np.int64)
    if n_mbs == 0:
        if not np.all(fiber_sbs):
            raise EmptyNetworkError("cannot associate backhaul: no MBS donors")
        return np.full(n_sbs, -1, dtype=np.int64)
    parents = np.argmin(bh.pathloss_db, axis=1)
    parents[fiber_sbs] = -1
    return parents


def count_loads(assoc: AssociationMap, n_bs: int, n_mbs: int) -> LoadTable:
    per_bs = np.bincount(assoc.ue_to_bs, minlength=n_bs).astype(np.int64)
    donor = np.zeros(n_mbs, dtype=np.int64)
    sbs_loads = per_bs[n_mbs:]
    attached = ~assoc.fiber_sbs & (assoc.sbs_to_mbs >= 0)
    np.add.at(donor, assoc.sbs_to_mbs[attached], sbs_loads[attached])
    return LoadTable(per_bs, donor)


def allocate_bandwidth(
    mu: float, total_hz: float, loads: LoadTable, assoc: AssociationMap
) -> BandwidthPlan:
    """Split spectrum: mu*W to backhaul (load-proportional per donor),
    (1-mu)*W shared equally among each cell's UEs."""
    if not 0 <= mu <= 1:
        raise InvalidParameterError(f"mu must be in [0, 1], got {mu}")
    if not total_hz > 0:
        raise InvalidParameterError(f"bandwidth must be > 0, got {total_hz}")
    n_mbs = len(loads.donor_child_load)
    sbs_loads = loads.per_bs[n_mbs:]
    backhaul = np.zeros(len(assoc.sbs_to_mbs))
    attached = np.flatnonzero(~assoc.fiber_sbs & (assoc.sbs_to_mbs >= 0))
    if len(attached):
        denom = loads.donor_child_load[assoc.sbs_to_mbs[attached]]
        ok = attached[denom > 0]
        backhaul[ok] = mu * total_hz * sbs_loads[ok] / denom[denom > 0]
    serving_load = loads.per_bs[assoc.ue_to_bs]
    access = np.zeros(len(assoc.ue_to_bs))
    np.divide((1.0 - mu) * total_hz, serving_load, out=access, where=serving_load > 0)
    return BandwidthPlan(mu, total_hz, backhaul, access)


def pick_targets(group_of: np.ndarray, n_groups: int, uniforms: np.ndarray) -> np.ndarray:
    """Per group, pick one member uniformly: the floor(u*count)-th lowest index.

    group_of[i] is the group of member i (or -1 for none); returns (n_groups,)
    member indices, -1 for empty groups. Used for per-slot beam targets.
    """
    targets = np.full(n_groups, -1, dtype=np.int64)
    valid = np.flatnonzero(group_of >= 0)
    if len(valid) == 0:
        return targets
    order = valid[np.argsort(group_of[valid], kind="stable")]
    groups = group_of[order]
    starts = np.searchsorted(groups, np.arange(n_groups), side="left")
    ends = np.searchsorted(groups, np.arange(n_groups), side="right")
    counts = ends - starts
    nonempty = counts > 0
    pick = starts[nonempty] + np.minimum(
        (uniforms[nonempty] * counts[nonempty]).astype(np.int64), counts[nonempty] - 1
    )
    targets[nonempty] = order[pick]
    return targets


def _bearing_deg(from_xy: np.ndarray, to_xy: np.ndarray) -> np.ndarray:
    """Azimuth (degrees) of to[j] seen from from[i], shape (n_from, n_to)."""
    d = to_xy[None, :, :] - from_xy[:, None, :]
    return np.degrees(np.arctan2(d[..., 1], d[..., 0]))


def _elevation_deg(from_3d: np.ndarray, to_3d: np.ndarray) -> np.ndarray:
    d = to_3d[None, :, :] - from_3d[:, None, :]
    horiz = np.hypot(d[..., 0], d[..., 1])
    return np.degrees(np.arctan2(d[..., 2], horiz))


def _wrap_deg(x: np.ndarray) -> np.ndarray:
    return (x + 180.0) % 360.0 - 180.0


def _sectored_gain_matrix(cfg, az_offset, el_offset, main_dbi, side_dbi):
    main = np.abs(_wrap_deg(az_offset)) <= cfg.hpbw_az_deg / 2.0
    if el_offset is not None:
        main &= np.abs(el_offset) <= cfg.hpbw_el_deg / 2.0
    return np.where(main, main_dbi, side_dbi)


def interferer_gain_matrix(
    real: NetworkRealization, cfg: ScenarioConfig, targets: np.ndarray
) -> np.ndarray:
    """Transmit gain of BS j toward UE u, (n_ue, n_bs).

    Under the 'sidelobe' model interfering beams never illuminate a victim
    with the main lobe, so every entry is the side gain. Under 'beamtarget'
    BS j beams at its target UE and the geometric pattern offset decides;
    columns of silent BSs must be zeroed by the caller via the load mask.
    """
    if cfg.interference_gain_model == "sidelobe":
        return np.full((real.n_ue, real.n_bs), cfg.bs_side_gain_dbi)
    bs_xy = real.bs_positions()
    ue_xy = real.ues.positions
    az_bs_ue = _bearing_deg(bs_xy, ue_xy)  # (n_bs, n_ue)
    safe = np.where(targets >= 0, targets, 0)
    tgt_xy = ue_xy[safe]
    d = tgt_xy - bs_xy
    az_tgt = np.degrees(np.arctan2(d[:, 1], d[:, 0]))  # (n_bs,)
    az_off = az_bs_ue - az_tgt[:, None]
    el_off = None
    if cfg.mode == "3d":
        bs3 = real.bs_positions_3d()
        ue3 = real.ue_positions_3d()
        el_bs_ue = _elevation_deg(bs3, ue3)
        dz = ue3[safe, 2] - bs3[:, 2]
        horiz = np.hypot(d[:, 0], d[:, 1])
        el_tgt = np.degrees(np.arctan2(dz, horiz))
        el_off = el_bs_ue - el_tgt[:, None]
    gain = _sectored_gain_matrix(cfg, az_off, el_off, cfg.bs_main_gain_dbi, cfg.bs_side_gain_dbi)
    return gain.T  # (n_ue, n_bs)


def access_interference_mw(
    real: NetworkRealization,
    cfg: ScenarioConfig,
    links: AccessLinks,
    ue_to_bs: np.ndarray,
    loads: LoadTable,
    targets: np.ndarray,
    fading: np.ndarray,
) -> np.ndarray:
    """Aggregate access-band interference per UE, in linear mW.

    Sums every BS except the serving cell; a BS with no associated UEs is
    silent; each interferer beams at its own target UE for this slot.
    """
    if real.n_bs == 0 or real.n_ue == 0:
        return np.zeros(real.n_ue)
    gain = interferer_gain_matrix(real, cfg, targets)
    p_dbm = (
        _bs_tx_dbm(real, cfg)[None, :]
        + gain
        + cfg.ue_gain_dbi
        - links.pathloss_db
        - links.rain_db
        - links.foliage_db
        + 10.0 * np.log10(fading)
    )
    p_mw = 10.0 ** (p_dbm / 10.0)
    p_mw[:, loads.per_bs == 0] = 0.0
    total = p_mw.sum(axis=1)
    own = np.take_along_axis(p_mw, ue_to_bs[:, None], axis=1)[:, 0]
    return total - own


def aggregate_interference(
    ue: int,
    real: NetworkRealization,
    cfg: ScenarioConfig,
    links: AccessLinks,
    ue_to_bs: np.ndarray,
    loads: LoadTable,
    targets: np.ndarray,
    fading: np.ndarray,
) -> float:
    """Interference seen by one UE; single-row view of the aggregate sum."""
    return float(
        access_interference_mw(real, cfg, links, ue_to_bs, loads, targets, fading)[ue]
    )


def backhaul_signal_dbm(
    real: NetworkRealization,
    cfg: ScenarioConfig,
    bh: BackhaulLinks,
    parents: np.ndarray,
    fading: np.ndarray,
) -> np.ndarray:
    """Received backhaul power per SBS from its parent (NaN for fiber SBSs)."""
    n_sbs = real.n_sbs
    out = np.full(n_sbs, np.nan)
    att = np.flatnonzero(parents >= 0)
    if len(att) == 0:
        return out
    p = parents[att]
    out[att] = (
        cfg.mbs_power_dbm
        + 2.0 * cfg.bs_main_gain_dbi
        - bh.pathloss_db[att, p]
        - bh.rain_db[att, p]
        - bh.foliage_db[att, p]
        + 10.0 * np.log10(fading[att, p])
    )
    return out


def backhaul_interference_mw(
    real: NetworkRealization,
    cfg: ScenarioConfig,
    bh: BackhaulLinks,
    parents: np.ndarray,
    mbs_targets: np.ndarray,
    fading: np.ndarray,
) -> np.ndarray:
    """Backhaul-band interference per SBS from non-parent donors.

    Only runs when the backhaul-interference flag is set. Under the
    'sidelobe' model a non-parent donor is never beam-aligned with the
    victim at either end, so both gains are side-lobe; under 'beamtarget'
    donors beam at one of their own IAB children and victims keep their
    sectored boresight on their parent, with geometric offsets deciding
    both gains. Donors with no attached child are quiet in this band.
    """
    n_sbs, n_mbs = bh.pathloss_db.shape
    out = np.zeros(n_sbs)
    att = np.flatnonzero(parents >= 0)
    if len(att) == 0 or n_mbs == 0:
        return out
    if cfg.interference_gain_model == "sidelobe":
        p_dbm = (
            cfg.mbs_power_dbm
            + 2.0 * cfg.bs_side_gain_dbi
            - bh.pathloss_db
            - bh.rain_db
            - bh.foliage_db
            + 10.0 * np.log10(fading)
        )
        p_mw = 10.0 ** (p_dbm / 10.0)
        p_mw[:, mbs_targets < 0] = 0.0
        cols = np.arange(n_mbs)[None, :]
        p_mw[att] = np.where(cols == parents[att, None], 0.0, p_mw[att])
        out[att] = p_mw[att].sum(axis=1)
        return out
    sbs_xy = real.sbs.positions
    mbs_xy = real.mbs.positions
    if cfg.mode == "3d":
        sbs_pos = np.column_stack([sbs_xy, real.sbs.heights])
        mbs_pos = np.column_stack([mbs_xy, real.mbs.heights])
    else:
        sbs_pos = sbs_xy
        mbs_pos = mbs_xy
    az_s_m = _bearing_deg(sbs_xy, mbs_xy)  # (n_sbs, n_mbs)
    parent_safe = np.where(parents >= 0, parents, 0)
    rx_boresight = np.take_along_axis(az_s_m, parent_safe[:, None], axis=1)[:, 0]
    el_s_m = el_rx_off = None
    if cfg.mode == "3d":
        el_s_m = _elevation_deg(sbs_pos, mbs_pos)
        el_rx_bore = np.take_along_axis(el_s_m, parent_safe[:, None], axis=1)[:, 0]
        el_rx_off = el_s_m - el_rx_bore[:, None]
    rx_gain = _sectored_gain_matrix(
        cfg, az_s_m - rx_boresight[:, None], el_rx_off,
        cfg.bs_main_gain_dbi, cfg.bs_side_gain_dbi,
    )
    if cfg.interference_gain_model == "sidelobe":
        tx_gain = np.full((n_sbs, n_mbs), cfg.bs_side_gain_dbi)
    else:
        az_m_s = _bearing_deg(mbs_xy, sbs_xy)  # (n_mbs, n_sbs)
        tgt_safe = np.where(mbs_targets >= 0, mbs_targets, 0)
        tx_boresight = np.take_along_axis(az_m_s, tgt_safe[:, None], axis=1)[:, 0]
        el_tx_off = None
        if cfg.mode == "3d":
            el_m_s = _elevation_deg(mbs_pos, sbs_pos)
            el_tx_bore = np.take_along_axis(el_m_s, tgt_safe[:, None], axis=1)[:, 0]
            el_tx_off = (el_m_s - el_tx_bore[:, None]).T
        tx_gain = _sectored_gain_matrix(
            cfg, (az_m_s - tx_boresight[:, None]).T, el_tx_off,
            cfg.bs_main_gain_dbi, cfg.bs_side_gain_dbi,
        )
    p_dbm = (
        cfg.mbs_power_dbm
        + tx_gain
        + rx_gain
        - bh.pathloss_db
        - bh.rain_db
        - bh.foliage_db
        + 10.0 * np.log10(fading)
    )
    p_mw = 10.0 ** (p_dbm / 10.0)
    p_mw[:, mbs_targets < 0] = 0.0  # donors with no IAB child stay quiet
    cols = np.arange(n_mbs)[None, :]
    p_mw[att] = np.where(cols == parents[att, None], 0.0, p_mw[att])
    out[att] = p_mw[att].sum(axis=1)
    return out


def noise_mw(bandwidth_hz, noise_figure_db: float):
    """Thermal noise power over an allocated bandwidth; zero Hz gives zero mW."""
    bw = np.asarray(bandwidth_hz, dtype=float)
    with np.errstate(divide="ignore"):
        dbm = THERMAL_NOISE_DBM_PER_HZ + 10.0 * np.log10(bw) + noise_figure_db
    out = np.where(bw > 0, 10.0 ** (dbm / 10.0), 0.0)
    return float(out) if np.isscalar(bandwidth_hz) else out


def shannon_rate_bps(bandwidth_hz, sinr_linear):
    """Capacity W*log2(1+SINR); zero bandwidth yields zero rate."""
    bw = np.asarray(bandwidth_hz, dtype=float)
    out = np.where(bw > 0, bw * np.log2(1.0 + np.where(bw > 0, sinr_linear, 0.0)), 0.0)
    return float(out) if np.isscalar(bandwidth_hz) else out


def compute_rates(
    plan: BandwidthPlan,
    assoc: AssociationMap,
    loads: LoadTable,
    access_signal_dbm: np.ndarray,
    access_interference_mw: np.ndarray,
    bh_signal_dbm: np.ndarray,
    bh_interference_mw: np.ndarray,
    noise_figure_db: float,
    backhaul_cap_model: str = "per_ue_share",
) -> RateReport:
    """Per-UE rates and per-SBS backhaul rates.

    UEs on MBSs or fiber SBSs get their Shannon access rate; UEs on IAB
    SBSs are capped by their cell's backhaul rate (shared across the
    cell's UEs or taken whole, per backhaul_cap_model). Stations radiate a
    constant power spectral density across the full band, so signal,
    interference and thermal noise all scale with the allocated share and
    SINR reduces to the full-band power ratio (noise over W); only the
    Shannon prefactor sees the share itself.
    """
    n_mbs = len(loads.donor_child_load)
    n0 = noise_mw(plan.total_hz, noise_figure_db)
    with np.errstate(divide="ignore", invalid="ignore"):
        sig_mw = 10.0 ** (access_signal_dbm / 10.0)
        sinr = sig_mw / (access_interference_mw + n0)
        access_rate = shannon_rate_bps(plan.access_share_per_ue, sinr)

        bh_sig_mw = 10.0 ** (np.nan_to_num(bh_signal_dbm, nan=-np.inf) / 10.0)
        bh_sinr = bh_sig_mw / (bh_interference_mw + n0)
        backhaul_rate = shannon_rate_bps(plan.backhaul_share_per_sbs, bh_sinr)
        sinr_db = 10.0 * np.log10(sinr)

    ue_rate = access_rate.copy()
    serving = assoc.ue_to_bs
    on_sbs = serving >= n_mbs
    if np.any(on_sbs):
        sidx = serving[on_sbs] - n_mbs
        iab = ~assoc.fiber_sbs[sidx]
        capped = np.flatnonzero(on_sbs)[iab]
        cap = backhaul_rate[sidx[iab]]
        if backhaul_cap_model == "per_ue_share":
            cap = cap / loads.per_bs[serving[capped]]
        elif backhaul_cap_model != "total_rate":
            raise InvalidParameterError(
                f"unknown backhaul cap model {backhaul_cap_model!r}"
            )
        ue_rate[capped] = np.minimum(access_rate[capped], cap)
    return RateReport(ue_rate, backhaul_rate, sinr_db)


def coverage_fraction(rates_bps: np.ndarray, rate_threshold_bps: float) -> float:
    """Fraction of UEs whose instantaneous rate meets the threshold."""
    rates = np.asarray(rates_bps, dtype=float)
    if rates.size == 0:
        raise UndefinedCoverageError("coverage undefined: realization has no UEs")
    return float(np.mean(rates >= rate_threshold_bps))
