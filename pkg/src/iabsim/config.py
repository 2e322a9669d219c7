"""Scenario configuration: every knob of one experiment, with validation.

Units are fixed per field: densities in nodes (or obstacles) per km^2,
powers in dBm, gains in dBi, lengths/heights/radii in meters, bandwidth in
Hz, rates in bits/s, rain in mm/hr, carrier in GHz.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .errors import ConfigError
from .propagation import RAIN_COEFFICIENTS

MODES = ("2d", "3d")
POLARIZATIONS = ("horizontal", "vertical")
INTERFERENCE_MODELS = ("sidelobe", "beamtarget")
ASSOCIATION_RULES = ("min_pathloss", "max_power", "max_power_over_r")
BACKHAUL_CAP_MODELS = ("per_ue_share", "total_rate")

# Default bandwidth-split grid used when a scenario asks to optimize mu.
DEFAULT_MU_GRID = tuple(round(0.05 * i, 2) for i in range(21))


@dataclass(frozen=True)
class ScenarioConfig:
    # Region
    radius_m: float = 1000.0
    # Node densities (per km^2) and optional fixed counts overriding them
    mbs_density: float = 8.0
    sbs_density: float = 100.0
    ue_density: float = 500.0
    n_mbs: int | None = None
    n_sbs: int | None = None
    n_ue: int | None = None
    # Blocking walls
    wall_density: float = 500.0
    wall_length: float = 5.0
    # Tree lines
    tree_density: float = 0.0
    tree_length: float = 15.0
    in_leaf_prob: float = 0.2
    tree_depth: float = 5.0
    # Transmit powers
    mbs_power_dbm: float = 40.0
    sbs_power_dbm: float = 24.0
    ue_power_dbm: float = 0.0
    # Channel
    carrier_ghz: float = 28.0
    alpha_los: float = 2.0
    alpha_nlos: float = 3.0
    # Antennas
    bs_main_gain_dbi: float = 24.0
    bs_side_gain_dbi: float = -2.0
    ue_gain_dbi: float = 0.0
    hpbw_az_deg: float = 60.0
    hpbw_el_deg: float = 25.0
    # Noise figure (dB over thermal)
    noise_figure_db: float = 5.0
    # Weather
    rain_rate: float = 0.0
    rain_polarization: str = "horizontal"
    # Spectrum partition and service
    mu: float = 0.5
    mu_optimize: bool = False
    bandwidth_hz: float = 1e9
    rate_threshold_bps: float = 100e6
    fiber_fraction: float = 0.0
    backhaul_interference: bool = False
    # Transmit gain of interfering stations toward victims: 'sidelobe'
    # treats interfering beams as never aligned with a victim (high
    # beamforming capability); 'beamtarget' points each interferer at one
    # of its own served nodes and applies the geometric pattern offset.
    interference_gain_model: str = "sidelobe"
    # UE cell selection: 'max_power' weighs candidates by their full
    # received power; 'min_pathloss' ignores the transmit-power gap between
    # node classes (all candidates beamform, same gains);
    # 'max_power_over_r' additionally divides by one distance factor.
    association_rule: str = "max_power"
    # Cell selection on one slot's fading (transmission sees fresh fading).
    association_fading: bool = False
    # How an IAB cell's backhaul rate caps its UEs: 'total_rate' caps each
    # UE by the whole pipe; 'per_ue_share' splits the pipe equally across
    # the cell's UEs.
    backhaul_cap_model: str = "total_rate"
    # Small-scale fading on donor->SBS links. Off by default: both ends
    # beamform with large arrays, leaving a stable point-to-point channel.
    backhaul_fading: bool = False
    # Terrain mode
    mode: str = "2d"
    mbs_height: float = 25.0
    sbs_height: float = 10.0
    ue_height: float = 1.0
    # Synthetic city (3d mode without a footprint file)
    building_density: float = 200.0
    building_size_min: float = 15.0
    building_size_max: float = 40.0
    building_height_min: float = 4.0
    building_height_max: float = 22.0
    footprints_path: str | None = None
    # Monte Carlo controls
    realizations: int = 1000
    master_seed: int = 1

    def __post_init__(self):
        self._require(self.radius_m > 0, "radius_m must be > 0")
        for name in ("mbs_density", "sbs_density", "ue_density", "wall_density", "tree_density"):
            self._require(getattr(self, name) >= 0, f"{name} must be >= 0")
        for name in ("n_mbs", "n_sbs", "n_ue"):
            v = getattr(self, name)
            self._require(v is None or v >= 0, f"{name} must be >= 0 when set")
        self._require(
            self.wall_density == 0 or self.wall_length > 0,
            "wall_length must be > 0 when walls are present",
        )
        self._require(self.tree_length >= 0, "tree_length must be >= 0")
        self._require(0 <= self.in_leaf_prob <= 1, "in_leaf_prob must be in [0, 1]")
        self._require(self.tree_depth >= 0, "tree_depth must be >= 0")
        self._require(self.carrier_ghz > 0, "carrier_ghz must be > 0")
        self._require(
            1 <= self.alpha_los <= self.alpha_nlos,
            "need 1 <= alpha_los <= alpha_nlos",
        )
        self._require(
            self.bs_main_gain_dbi > self.bs_side_gain_dbi,
            "bs_main_gain_dbi must exceed bs_side_gain_dbi",
        )
        for name in ("hpbw_az_deg", "hpbw_el_deg"):
            self._require(0 < getattr(self, name) < 360, f"{name} must be in (0, 360)")
        self._require(self.rain_rate >= 0, "rain_rate must be >= 0")
        self._require(
            self.rain_polarization in POLARIZATIONS,
            f"rain_polarization must be one of {POLARIZATIONS}",
        )
        self._require(
            self.rain_rate == 0 or float(self.carrier_ghz) in RAIN_COEFFICIENTS,
            f"no rain coefficients for {self.carrier_ghz} GHz "
            f"(available: {sorted(RAIN_COEFFICIENTS)})",
        )
        self._require(0 <= self.mu <= 1, "mu must be in [0, 1]")
        self._require(self.bandwidth_hz > 0, "bandwidth_hz must be > 0")
        self._require(self.rate_threshold_bps >= 0, "rate_threshold_bps must be >= 0")
        self._require(0 <= self.fiber_fraction <= 1, "fiber_fraction must be in [0, 1]")
        self._require(
            self.interference_gain_model in INTERFERENCE_MODELS,
            f"interference_gain_model must be one of {INTERFERENCE_MODELS}",
        )
        self._require(
            self.association_rule in ASSOCIATION_RULES,
            f"association_rule must be one of {ASSOCIATION_RULES}",
        )
        self._require(
            self.backhaul_cap_model in BACKHAUL_CAP_MODELS,
            f"backhaul_cap_model must be one of {BACKHAUL_CAP_MODELS}",
        )
        self._require(self.mode in MODES, f"mode must be one of {MODES}")
        for name in ("mbs_height", "sbs_height"):
            self._require(getattr(self, name) > 0, f"{name} must be > 0")
        self._require(self.ue_height >= 0, "ue_height must be >= 0")
        self._require(self.building_density >= 0, "building_density must be >= 0")
        self._require(
            0 < self.building_size_min <= self.building_size_max,
            "need 0 < building_size_min <= building_size_max",
        )
        self._require(
            0 < self.building_height_min <= self.building_height_max,
            "need 0 < building_height_min <= building_height_max",
        )
        self._require(self.realizations >= 1, "realizations must be >= 1")

    @staticmethod
    def _require(cond: bool, message: str):
        if not cond:
            raise ConfigError(message)

    def with_updates(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **kwargs)


SCENARIO_FIELDS = tuple(f.name for f in fields(ScenarioConfig))
