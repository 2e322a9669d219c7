"""Optional 3D terrain: extruded building prisms blocking line of sight.

Prisms come from a GeoJSON-subset footprint file (WGS84 polygons with a
"height" property, projected to local meters) or from a synthetic city of
axis-aligned rectangular blocks. A link is blocked iff some point of its
3D segment lies inside a prism; since altitude is linear along the link,
it is enough to check the lowest altitude attained over the footprint.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DegenerateLinkError, FootprintError, InvalidParameterError
from .geometry import Region, sample_fhppp, segments_intersect

EARTH_RADIUS_M = 6_371_000.0


def _polygon_is_simple(vertices: np.ndarray) -> bool:
    """True iff no two non-adjacent edges intersect (closed polygon)."""
    n = len(vertices)
    edges = [(tuple(vertices[i]), tuple(vertices[(i + 1) % n])) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue  # adjacent edges share a vertex by construction
            if segments_intersect(edges[i], edges[j]):
                return False
    return True


@dataclass(frozen=True)
class BuildingPrism:
    """A building: simple polygon footprint (meters) extruded from z=0."""

    footprint: np.ndarray  # (k, 2), k >= 3, not closed (no repeated last vertex)
    height: float

    def __post_init__(self):
        fp = np.asarray(self.footprint, dtype=float)
        if fp.ndim != 2 or fp.shape[1] != 2 or fp.shape[0] < 3:
            raise InvalidParameterError("footprint needs at least 3 vertices of shape (k, 2)")
        if not self.height > 0:
            raise InvalidParameterError(f"prism height must be > 0, got {self.height}")
        if not _polygon_is_simple(fp):
            raise InvalidParameterError("footprint polygon is self-intersecting")

    def bounds(self) -> tuple[float, float, float, float]:
        fp = self.footprint
        return fp[:, 0].min(), fp[:, 1].min(), fp[:, 0].max(), fp[:, 1].max()

    def is_axis_aligned_rect(self) -> bool:
        fp = self.footprint
        if fp.shape[0] != 4:
            return False
        xs = np.unique(fp[:, 0])
        ys = np.unique(fp[:, 1])
        return len(xs) == 2 and len(ys) == 2


@dataclass
class Scene3D:
    """Immutable-after-load collection of prisms with packed fast-path arrays."""

    prisms: list[BuildingPrism]
    _rect_bounds: np.ndarray | None = field(default=None, repr=False)
    _rect_heights: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.prisms and all(p.is_axis_aligned_rect() for p in self.prisms):
            self._rect_bounds = np.array([p.bounds() for p in self.prisms])
            self._rect_heights = np.array([p.height for p in self.prisms])

    @property
    def n(self) -> int:
        return len(self.prisms)

    @classmethod
    def empty(cls) -> "Scene3D":
        return cls([])


def load_buildings(path: str) -> list[BuildingPrism]:
    """Read a GeoJSON-subset FeatureCollection of building footprints.

    Expected shape: Polygon features (single outer ring, WGS84 lon/lat
    degrees) each carrying a numeric "height" property in meters. An
    optional top-level "origin": [lon, lat] fixes the projection center;
    otherwise the mean vertex is used. Coordinates map to local meters by
    an equirectangular projection about that origin.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FootprintError(f"cannot read footprint file {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise FootprintError(f"{path}: expected a GeoJSON FeatureCollection")
    features = doc.get("features", [])
    rings = []
    heights = []
    for idx, feat in enumerate(features):
        geom = feat.get("geometry") or {}
        if geom.get("type") != "Polygon":
            raise FootprintError(f"feature {idx}: only Polygon geometries are supported")
        coords = geom.get("coordinates") or []
        if len(coords) != 1:
            raise FootprintError(
                f"feature {idx}: expected a single outer ring, got {len(coords)} rings"
            )
        ring = coords[0]
        if len(ring) < 4:
            raise FootprintError(f"feature {idx}: ring has fewer than 4 positions")
        height = (feat.get("properties") or {}).get("height")
        if not isinstance(height, (int, float)) or not height > 0:
            raise FootprintError(f"feature {idx}: missing or non-positive 'height' property")
        rings.append(np.asarray(ring, dtype=float))
        heights.append(float(height))
    if not rings:
        return []
    if "origin" in doc:
        lon0, lat0 = (float(v) for v in doc["origin"])
    else:
        allv = np.vstack(rings)
        lon0, lat0 = allv[:, 0].mean(), allv[:, 1].mean()
    coslat = math.cos(math.radians(lat0))
    prisms = []
    for idx, (ring, height) in enumerate(zip(rings, heights)):
        if not np.allclose(ring[0], ring[-1]):
            raise FootprintError(f"feature {idx}: ring is not closed")
        ring = ring[:-1]
        x = EARTH_RADIUS_M * np.radians(ring[:, 0] - lon0) * coslat
        y = EARTH_RADIUS_M * np.radians(ring[:, 1] - lat0)
        try:
            prisms.append(BuildingPrism(np.column_stack([x, y]), height))
        except InvalidParameterError as exc:
            raise FootprintError(f"feature {idx}: {exc}") from exc
    return prisms


def generate_synthetic_city(
    density_per_km2: float,
    size_range: tuple[float, float],
    height_range: tuple[float, float],
    region: Region,
    rng: np.random.Generator,
) -> list[BuildingPrism]:
    """Random city of axis-aligned blocks: FHPPP centers, uniform sizes/heights."""
    lo_s, hi_s = size_range
    lo_h, hi_h = height_range
    if not (0 < lo_s <= hi_s and 0 < lo_h <= hi_h):
        raise InvalidParameterError("size and height ranges must be positive and ordered")
    centers = sample_fhppp(density_per_km2, region, rng)
    n = centers.shape[0]
    wx = rng.uniform(lo_s, hi_s, n)
    wy = rng.uniform(lo_s, hi_s, n)
    hz = rng.uniform(lo_h, hi_h, n)
    prisms = []
    for i in range(n):
        cx, cy = centers[i]
        fp = np.array(
            [
                [cx - wx[i] / 2, cy - wy[i] / 2],
                [cx + wx[i] / 2, cy - wy[i] / 2],
                [cx + wx[i] / 2, cy + wy[i] / 2],
                [cx - wx[i] / 2, cy + wy[i] / 2],
            ]
        )
        prisms.append(BuildingPrism(fp, float(hz[i])))
    return prisms


def _point_in_polygon(x: float, y: float, fp: np.ndarray) -> bool:
    """Even-odd rule; boundary points count as inside via the crossing tests."""
    n = len(fp)
    inside = False
    for i in range(n):
        x1, y1 = fp[i]
        x2, y2 = fp[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xint:
                inside = not inside
            elif x == xint:
                return True
    return inside


def _segment_blocked_by_prism(a: np.ndarray, b: np.ndarray, prism: BuildingPrism) -> bool:
    """True iff segment a->b (3D) enters the closed prism volume.

    Candidate parameters are the 2D boundary crossings plus any endpoint
    whose ground projection sits inside the footprint; the prism blocks iff
    the lowest candidate altitude is at or below the roof.
    """
    fp = prism.footprint
    ax, ay, az = a
    bx, by, bz = b
    dx, dy, dz = bx - ax, by - ay, bz - az
    ts = []
    n = len(fp)
    for i in range(n):
        x1, y1 = fp[i]
        x2, y2 = fp[(i + 1) % n]
        ex, ey = x2 - x1, y2 - y1
        denom = dx * ey - dy * ex
        if denom == 0.0:
            # parallel; collinear overlap is caught by endpoint-inside tests
            continue
        t = ((x1 - ax) * ey - (y1 - ay) * ex) / denom
        u = ((x1 - ax) * dy - (y1 - ay) * dx) / denom
        if 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0:
            ts.append(t)
    if _point_in_polygon(ax, ay, fp):
        ts.append(0.0)
    if _point_in_polygon(bx, by, fp):
        ts.append(1.0)
    if not ts:
        return False
    zmin = min(az + t * dz for t in ts)
    return zmin <= prism.height


def los_3d(tx, rx, prisms) -> bool:
    """True iff the 3D segment tx->rx crosses no prism (may pass over roofs)."""
    a = np.asarray(tx, dtype=float)
    b = np.asarray(rx, dtype=float)
    if np.array_equal(a, b):
        raise DegenerateLinkError(f"tx and rx coincide at {tuple(a)}")
    items = prisms.prisms if isinstance(prisms, Scene3D) else prisms
    for prism in items:
        if _segment_blocked_by_prism(a, b, prism):
            return False
    return True


def scene_los_mask(a_points: np.ndarray, b_points: np.ndarray, scene: Scene3D | None) -> np.ndarray:
    """All-pairs 3D LOS mask; uses the rectangle kernel when the scene allows."""
    a = np.ascontiguousarray(a_points, dtype=np.float64).reshape(-1, 3)
    b = np.ascontiguousarray(b_points, dtype=np.float64).reshape(-1, 3)
    if scene is None or scene.n == 0:
        return np.ones((a.shape[0], b.shape[0]), dtype=bool)
    if scene._rect_bounds is not None:
        if a.shape[0] <= b.shape[0]:
            blocked = _kernels.rect_prisms_blocked_mask(a, b, scene._rect_bounds, scene._rect_heights)
        else:
            blocked = _kernels.rect_prisms_blocked_mask(b, a, scene._rect_bounds, scene._rect_heights).T
        return ~blocked
    out = np.empty((a.shape[0], b.shape[0]), dtype=bool)
    for i in range(a.shape[0]):
        for j in range(b.shape[0]):
            out[i, j] = not any(
                _segment_blocked_by_prism(a[i], b[j], p) for p in scene.prisms
            )
    return out
