"""Spatial sampling and 2D visibility on a finite disk.

Node positions follow finite homogeneous Poisson point processes (Poisson
count over the disk area, points uniform on the disk). Obstacles are random
segments: blocking walls, and tree lines carrying an in-leaf/out-of-leaf
state. Visibility queries are exact closed-segment intersection tests;
batched all-pairs variants delegate to the numba kernels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DegenerateLinkError, InvalidParameterError

M2_PER_KM2 = 1e6

Point = tuple[float, float]
Segment = tuple[Point, Point]


@dataclass(frozen=True)
class Region:
    """Circular deployment region; radius and coordinates in meters."""

    radius: float
    center: Point = (0.0, 0.0)

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidParameterError(f"region radius must be > 0, got {self.radius}")

    @property
    def area_km2(self) -> float:
        return np.pi * self.radius**2 / M2_PER_KM2

    def contains(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """Boolean mask: which points lie inside the disk (inclusive)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d = np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1])
        return d <= self.radius + tol


def sample_fhppp(
    density_per_km2: float, region: Region, rng: np.random.Generator
) -> np.ndarray:
    """Draw one FHPPP realization: an (n, 2) array of points on the disk.

    The count is Poisson with mean density * disk area; positions are
    uniform via the radius = R*sqrt(u) inversion (no rejection loop).
    """
    if density_per_km2 < 0:
        raise InvalidParameterError(f"density must be >= 0, got {density_per_km2}")
    n = rng.poisson(density_per_km2 * region.area_km2)
    r = region.radius * np.sqrt(rng.random(n))
    theta = 2.0 * np.pi * rng.random(n)
    pts = np.empty((n, 2))
    pts[:, 0] = region.center[0] + r * np.cos(theta)
    pts[:, 1] = region.center[1] + r * np.sin(theta)
    return pts


@dataclass(frozen=True)
class NodeSet:
    """Positions and antenna heights of one class of nodes."""

    kind: str  # 'MBS' | 'SBS' | 'UE'
    positions: np.ndarray  # (n, 2) meters
    heights: np.ndarray  # (n,) meters

    def __post_init__(self):
        if self.kind not in ("MBS", "SBS", "UE"):
            raise InvalidParameterError(f"unknown node kind {self.kind!r}")
        if self.positions.shape != (len(self.heights), 2):
            raise InvalidParameterError("positions and heights disagree in length")
        if self.kind == "UE":
            if np.any(self.heights < 0):
                raise InvalidParameterError("UE heights must be >= 0")
        elif self.n and not np.all(self.heights > 0):
            raise InvalidParameterError(f"{self.kind} heights must be > 0")

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @classmethod
    def sample(
        cls,
        kind: str,
        density_per_km2: float,
        height: float,
        region: Region,
        rng: np.random.Generator,
        count: int | None = None,
    ) -> "NodeSet":
        """FHPPP draw; `count` pins the number of nodes (positions stay uniform)."""
        if count is None:
            pts = sample_fhppp(density_per_km2, region, rng)
        else:
            if count < 0:
                raise InvalidParameterError(f"node count must be >= 0, got {count}")
            r = region.radius * np.sqrt(rng.random(count))
            theta = 2.0 * np.pi * rng.random(count)
            pts = np.column_stack(
                (region.center[0] + r * np.cos(theta), region.center[1] + r * np.sin(theta))
            )
        return cls(kind, pts, np.full(pts.shape[0], float(height)))


def _segment_endpoints(midpoints, lengths, orientations):
    half = 0.5 * np.asarray(lengths)[:, None]
    d = np.column_stack((np.cos(orientations), np.sin(orientations))) * half
    return midpoints - d, midpoints + d


@dataclass(frozen=True)
class WallSet:
    """Blocking walls: Poisson germs with IID uniform orientations."""

    midpoints: np.ndarray  # (n, 2)
    lengths: np.ndarray  # (n,)
    orientations: np.ndarray  # (n,) radians in [0, 2*pi)

    def __post_init__(self):
        if self.n and not np.all(self.lengths > 0):
            raise InvalidParameterError("wall lengths must be > 0")
        self._check_orientations()

    def _check_orientations(self):
        if self.n and (
            np.any(self.orientations < 0) or np.any(self.orientations >= 2 * np.pi)
        ):
            raise InvalidParameterError("orientations must lie in [0, 2*pi)")

    @property
    def n(self) -> int:
        return self.midpoints.shape[0]

    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        """(p1, p2) arrays of segment endpoints, each (n, 2)."""
        return _segment_endpoints(self.midpoints, self.lengths, self.orientations)

    @classmethod
    def empty(cls) -> "WallSet":
        return cls(np.empty((0, 2)), np.empty(0), np.empty(0))


@dataclass(frozen=True)
class TreeLineSet(WallSet):
    """Tree lines: same germ-grain geometry plus a per-line foliage state."""

    in_leaf: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=bool))

    def __post_init__(self):
        if self.n and np.any(self.lengths < 0):
            raise InvalidParameterError("tree line lengths must be >= 0")
        self._check_orientations()
        if self.in_leaf.shape != (self.n,):
            raise InvalidParameterError("in_leaf must have one flag per tree line")

    @classmethod
    def empty(cls) -> "TreeLineSet":
        return cls(np.empty((0, 2)), np.empty(0), np.empty(0), np.empty(0, dtype=bool))


def sample_segments(
    density_per_km2: float,
    length: float,
    region: Region,
    rng: np.random.Generator,
    *,
    in_leaf_prob: float | None = None,
):
    """Sample a germ-grain segment set: FHPPP midpoints, uniform orientations.

    Returns a WallSet, or a TreeLineSet (with IID Bernoulli in-leaf states)
    when in_leaf_prob is given. Draw order is fixed: midpoints, then
    orientations, then leaf states, so equal seeds give identical sets.
    """
    if length < 0:
        raise InvalidParameterError(f"segment length must be >= 0, got {length}")
    midpoints = sample_fhppp(density_per_km2, region, rng)
    n = midpoints.shape[0]
    orientations = rng.uniform(0.0, 2.0 * np.pi, n)
    lengths = np.full(n, float(length))
    if in_leaf_prob is None:
        return WallSet(midpoints, lengths, orientations)
    if not 0.0 <= in_leaf_prob <= 1.0:
        raise InvalidParameterError(f"in_leaf_prob must be in [0, 1], got {in_leaf_prob}")
    in_leaf = rng.random(n) < in_leaf_prob
    return TreeLineSet(midpoints, lengths, orientations, in_leaf)


def segments_intersect(a: Segment, b: Segment) -> bool:
    """True iff the closed segments a and b share at least one point."""
    (ax, ay), (bx, by) = a
    (cx, cy), (dx, dy) = b
    d1x = bx - ax
    d1y = by - ay
    d3 = d1x * (cy - ay) - d1y * (cx - ax)
    d4 = d1x * (dy - ay) - d1y * (dx - ax)
    if (d3 > 0 and d4 > 0) or (d3 < 0 and d4 < 0):
        return False
    d2x = dx - cx
    d2y = dy - cy
    d1 = d2x * (ay - cy) - d2y * (ax - cx)
    d2 = d2x * (by - cy) - d2y * (bx - cx)
    if (d1 > 0 and d2 > 0) or (d1 < 0 and d2 < 0):
        return False
    if d1 != 0 or d2 != 0 or d3 != 0 or d4 != 0:
        return True
    # Collinear: overlap of both axis projections.
    if min(ax, bx) > max(cx, dx) or min(cx, dx) > max(ax, bx):
        return False
    if min(ay, by) > max(cy, dy) or min(cy, dy) > max(ay, by):
        return False
    return True


def _check_link(tx, rx):
    if tuple(tx) == tuple(rx):
        raise DegenerateLinkError(f"tx and rx coincide at {tuple(tx)}")


def link_is_los(tx: Point, rx: Point, walls: WallSet) -> bool:
    """True iff the tx-rx segment crosses no wall."""
    _check_link(tx, rx)
    if walls.n == 0:
        return True
    p1, p2 = walls.endpoints()
    link = (tuple(tx), tuple(rx))
    for i in range(walls.n):
        if segments_intersect(link, (tuple(p1[i]), tuple(p2[i]))):
            return False
    return True


def foliage_crossings(tx: Point, rx: Point, trees: TreeLineSet) -> list[bool]:
    """In-leaf flags of every tree line the tx-rx segment crosses."""
    _check_link(tx, rx)
    if trees.n == 0:
        return []
    p1, p2 = trees.endpoints()
    link = (tuple(tx), tuple(rx))
    return [
        bool(trees.in_leaf[i])
        for i in range(trees.n)
        if segments_intersect(link, (tuple(p1[i]), tuple(p2[i])))
    ]


def los_mask(
    a_points: np.ndarray, b_points: np.ndarray, walls: WallSet
) -> np.ndarray:
    """All-pairs LOS: True at [i, j] iff a[i]->b[j] crosses no wall.

    Equivalent to looping link_is_los over every pair; the kernel runs with
    the smaller point set on its outer axis since its cost is outer * walls.
    """
    a = np.ascontiguousarray(a_points, dtype=np.float64).reshape(-1, 2)
    b = np.ascontiguousarray(b_points, dtype=np.float64).reshape(-1, 2)
    if walls.n == 0:
        return np.ones((a.shape[0], b.shape[0]), dtype=bool)
    p1, p2 = walls.endpoints()
    if a.shape[0] <= b.shape[0]:
        blocked = _kernels.blocked_mask(a, b, p1, p2)
    else:
        blocked = _kernels.blocked_mask(b, a, p1, p2).T
    return ~blocked


def tree_crossing_counts(
    a_points: np.ndarray, b_points: np.ndarray, trees: TreeLineSet
) -> tuple[np.ndarray, np.ndarray]:
    """All-pairs counts of crossed (in-leaf, out-of-leaf) tree lines."""
    a = np.ascontiguousarray(a_points, dtype=np.float64).reshape(-1, 2)
    b = np.ascontiguousarray(b_points, dtype=np.float64).reshape(-1, 2)
    shape = (a.shape[0], b.shape[0])
    if trees.n == 0:
        z = np.zeros(shape, dtype=np.int32)
        return z, z.copy()
    p1, p2 = trees.endpoints()
    flags = np.ascontiguousarray(trees.in_leaf)
    if a.shape[0] <= b.shape[0]:
        cin, cout = _kernels.crossing_counts(a, b, p1, p2, flags)
        return cin, cout
    cin, cout = _kernels.crossing_counts(b, a, p1, p2, flags)
    return cin.T.copy(), cout.T.copy()
