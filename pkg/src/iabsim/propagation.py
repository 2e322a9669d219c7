"""Per-link radio budgets: path loss, antenna gain, weather losses, fading.

Path loss follows the close-in model referenced at 1 m with LOS/NLOS
exponents; antennas are sectored (flat main lobe inside the half-power
beamwidth, flat side lobe outside); rain uses the ITU-R power-law
coefficients and foliage the FITU-R in-leaf/out-of-leaf fits. Everything
here is a pure function of its inputs; callers own the random streams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

# Close-in reference loss at 1 m, dB (with frequency in GHz).
CLOSE_IN_REF_DB = 32.4
MIN_PATH_DISTANCE_M = 1.0


@dataclass(frozen=True)
class ChannelParams:
    carrier_ghz: float = 28.0
    alpha_los: float = 2.0
    alpha_nlos: float = 3.0

    def __post_init__(self):
        if not self.carrier_ghz > 0:
            raise InvalidParameterError(f"carrier must be > 0 GHz, got {self.carrier_ghz}")
        if not 1.0 <= self.alpha_los <= self.alpha_nlos:
            raise InvalidParameterError(
                f"need 1 <= alpha_los <= alpha_nlos, got "
                f"({self.alpha_los}, {self.alpha_nlos})"
            )


def path_loss_db(r_m, los, params: ChannelParams):
    """Close-in path loss in dB; accepts scalars or arrays.

    Distances below 1 m clamp to the 1 m reference instead of erroring;
    non-positive distances are rejected.
    """
    r = np.asarray(r_m, dtype=float)
    if np.any(r <= 0):
        raise InvalidParameterError("link distance must be > 0 m")
    r = np.maximum(r, MIN_PATH_DISTANCE_M)
    alpha = np.where(los, params.alpha_los, params.alpha_nlos)
    out = (
        CLOSE_IN_REF_DB
        + 10.0 * alpha * np.log10(r)
        + 20.0 * np.log10(params.carrier_ghz)
    )
    return float(out) if np.isscalar(r_m) else out


@dataclass(frozen=True)
class AntennaPattern:
    """Sectored beam: max gain inside the HPBW, flat side gain outside."""

    max_gain_dbi: float
    side_gain_dbi: float
    hpbw_az_deg: float
    hpbw_el_deg: float = 25.0

    def __post_init__(self):
        if not self.max_gain_dbi > self.side_gain_dbi:
            raise InvalidParameterError("main-lobe gain must exceed side-lobe gain")
        for w in (self.hpbw_az_deg, self.hpbw_el_deg):
            if not 0 < w < 360:
                raise InvalidParameterError(f"HPBW must be in (0, 360), got {w}")


OMNI_UE_PATTERN_GAIN_DBI = 0.0


def normalize_angle_deg(phi):
    """Wrap an angle (degrees) into [-180, 180)."""
    return (np.asarray(phi, dtype=float) + 180.0) % 360.0 - 180.0


def antenna_gain_dbi(offset_deg, pattern: AntennaPattern):
    """Sectored azimuthal gain for a boresight offset in degrees."""
    phi = np.abs(normalize_angle_deg(offset_deg))
    out = np.where(phi <= pattern.hpbw_az_deg / 2.0, pattern.max_gain_dbi, pattern.side_gain_dbi)
    return float(out) if np.isscalar(offset_deg) else out


def antenna_gain_3d_dbi(az_offset_deg, el_offset_deg, pattern: AntennaPattern):
    """Sectored gain with an elevation cut: main lobe needs both offsets inside."""
    az = np.abs(normalize_angle_deg(az_offset_deg))
    el = np.abs(np.asarray(el_offset_deg, dtype=float))
    main = (az <= pattern.hpbw_az_deg / 2.0) & (el <= pattern.hpbw_el_deg / 2.0)
    out = np.where(main, pattern.max_gain_dbi, pattern.side_gain_dbi)
    return float(out) if np.isscalar(az_offset_deg) else out


@dataclass(frozen=True)
class RainCoefficients:
    """Power-law rain attenuation coefficients for one carrier frequency."""

    k_h: float
    beta_h: float
    k_v: float
    beta_v: float

    def __post_init__(self):
        for v in (self.k_h, self.beta_h, self.k_v, self.beta_v):
            if not v > 0:
                raise InvalidParameterError("rain coefficients must be > 0")

    def select(self, polarization: str) -> tuple[float, float]:
        if polarization == "horizontal":
            return self.k_h, self.beta_h
        if polarization == "vertical":
            return self.k_v, self.beta_v
        raise InvalidParameterError(
            f"polarization must be 'horizontal' or 'vertical', got {polarization!r}"
        )


# Built-in coefficient rows keyed by carrier frequency in GHz. The simulator
# concentrates on 28 GHz; add rows here to enable rain at other carriers.
RAIN_COEFFICIENTS = {
    28.0: RainCoefficients(k_h=0.2051, beta_h=0.9679, k_v=0.1964, beta_v=0.9277),
}


def rain_coefficients(carrier_ghz: float) -> RainCoefficients:
    try:
        return RAIN_COEFFICIENTS[float(carrier_ghz)]
    except KeyError:
        raise InvalidParameterError(
            f"no rain coefficients for {carrier_ghz} GHz; "
            f"available: {sorted(RAIN_COEFFICIENTS)}"
        ) from None


def rain_loss_db(rate_mm_hr: float, r_m, coeffs: RainCoefficients, polarization: str = "horizontal"):
    """Rain attenuation over a path: specific loss k*R^beta dB/km times km."""
    if rate_mm_hr < 0:
        raise InvalidParameterError(f"rain rate must be >= 0, got {rate_mm_hr}")
    if rate_mm_hr == 0:
        return 0.0 if np.isscalar(r_m) else np.zeros_like(np.asarray(r_m, dtype=float))
    k, beta = coeffs.select(polarization)
    out = k * rate_mm_hr**beta * (np.asarray(r_m, dtype=float) / 1000.0)
    return float(out) if np.isscalar(r_m) else out


# FITU-R per-crossing loss, dB; carrier in MHz, vegetation depth in meters.
def foliage_loss_per_crossing_db(in_leaf: bool, depth_m: float, carrier_mhz: float) -> float:
    if depth_m < 0:
        raise InvalidParameterError(f"vegetation depth must be >= 0, got {depth_m}")
    if in_leaf:
        return 0.39 * carrier_mhz**0.39 * depth_m**0.25
    return 0.37 * carrier_mhz**0.18 * depth_m**0.59


def foliage_loss_db(crossings, depth_m: float, carrier_mhz: float) -> float:
    """Total foliage loss for a link given its crossed tree lines' states."""
    return sum(
        foliage_loss_per_crossing_db(bool(f), depth_m, carrier_mhz) for f in crossings
    )


def foliage_loss_from_counts(n_in_leaf, n_out_leaf, depth_m: float, carrier_mhz: float):
    """Vectorized foliage loss from per-link crossing counts."""
    loss_in = foliage_loss_per_crossing_db(True, depth_m, carrier_mhz)
    loss_out = foliage_loss_per_crossing_db(False, depth_m, carrier_mhz)
    return np.asarray(n_in_leaf) * loss_in + np.asarray(n_out_leaf) * loss_out


def sample_fading_power(rng: np.random.Generator, size=None):
    """Squared-magnitude Rayleigh fading: unit-mean exponential draws."""
    return rng.exponential(1.0, size)


@dataclass(frozen=True)
class LinkBudget:
    """One link's budget; received power is the composition of the parts."""

    tx_power_dbm: float
    distance_m: float
    los: bool
    pathloss_db: float
    tx_gain_dbi: float
    rx_gain_dbi: float
    rain_db: float
    foliage_db: float
    fading_power: float
    received_dbm: float

    def recompute_received_dbm(self) -> float:
        """Re-derive received power from the stored components."""
        return (
            self.tx_power_dbm
            + self.tx_gain_dbi
            + self.rx_gain_dbi
            - self.pathloss_db
            - self.rain_db
            - self.foliage_db
            + 10.0 * np.log10(self.fading_power)
        )


def received_power_dbm(
    tx_power_dbm: float,
    distance_m: float,
    los: bool,
    channel: ChannelParams,
    tx_gain_dbi: float = 0.0,
    rx_gain_dbi: float = 0.0,
    rain_db: float = 0.0,
    foliage_db: float = 0.0,
    fading_power: float = 1.0,
) -> LinkBudget:
    """Assemble a LinkBudget; fading_power=1 gives the average (fading-free) power."""
    pl = path_loss_db(distance_m, los, channel)
    rx = (
        tx_power_dbm
        + tx_gain_dbi
        + rx_gain_dbi
        - pl
        - rain_db
        - foliage_db
        + 10.0 * np.log10(fading_power)
    )
    return LinkBudget(
        tx_power_dbm=tx_power_dbm,
        distance_m=distance_m,
        los=bool(los),
        pathloss_db=pl,
        tx_gain_dbi=tx_gain_dbi,
        rx_gain_dbi=rx_gain_dbi,
        rain_db=rain_db,
        foliage_db=foliage_db,
        fading_power=fading_power,
        received_dbm=rx,
    )
