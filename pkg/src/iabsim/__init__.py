"""Monte Carlo stochastic-geometry simulator for two-hop IAB mmWave networks.

Estimates the service coverage probability of networks where macro base
stations feed small base stations over in-band wireless backhaul, on a
finite disk with germ-grain blockage, rain, tree foliage and sectored
beamforming.
"""

__version__ = "0.1.0"

from .config import ScenarioConfig
from .engine import (
    CoverageResult,
    Realization,
    RealizationResult,
    build_realization,
    evaluate_realization,
    mean_hop_length,
    optimize_mu,
    run_monte_carlo,
    run_realization,
    sweep,
)
from .errors import (
    ConfigError,
    DegenerateLinkError,
    EmptyNetworkError,
    EstimationError,
    FootprintError,
    IabSimError,
    InvalidParameterError,
    UndefinedCoverageError,
)
from .geometry import (
    NodeSet,
    Region,
    TreeLineSet,
    WallSet,
    foliage_crossings,
    link_is_los,
    sample_fhppp,
    sample_segments,
    segments_intersect,
)
from .network import (
    AssociationMap,
    BandwidthPlan,
    LoadTable,
    NetworkRealization,
    RateReport,
    allocate_bandwidth,
    coverage_fraction,
)
from .propagation import (
    AntennaPattern,
    ChannelParams,
    LinkBudget,
    RainCoefficients,
    antenna_gain_dbi,
    foliage_loss_db,
    path_loss_db,
    rain_coefficients,
    rain_loss_db,
    received_power_dbm,
    sample_fading_power,
)
from .terrain3d import (
    BuildingPrism,
    Scene3D,
    generate_synthetic_city,
    load_buildings,
    los_3d,
)

__all__ = [name for name in dir() if not name.startswith("_")]
