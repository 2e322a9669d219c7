import json
import math

import numpy as np
import pytest

from iabsim import (
    BuildingPrism,
    DegenerateLinkError,
    FootprintError,
    InvalidParameterError,
    Region,
    Scene3D,
    WallSet,
    generate_synthetic_city,
    link_is_los,
    load_buildings,
    los_3d,
)
from iabsim.terrain3d import EARTH_RADIUS_M, scene_los_mask

SQUARE = np.array([[0.0, 0.0], [20.0, 0.0], [20.0, 20.0], [0.0, 20.0]])


def _rect(cx, cy, wx, wy):
    return np.array(
        [
            [cx - wx / 2, cy - wy / 2],
            [cx + wx / 2, cy - wy / 2],
            [cx + wx / 2, cy + wy / 2],
            [cx - wx / 2, cy + wy / 2],
        ]
    )


# Independent brute-force oracle: segment against every prism face, plus the
# endpoint-inside case (a segment fully interior to a prism meets no face).
def _seg_triangle(p, q, a, b, c, eps=1e-12):
    d = q - p
    e1 = b - a
    e2 = c - a
    h = np.cross(d, e2)
    det = np.dot(e1, h)
    if abs(det) < eps:
        return False
    s = (p - a) / det
    u = np.dot(s * det, h) / det
    u = np.dot(p - a, h) / det
    if u < -eps or u > 1 + eps:
        return False
    qv = np.cross(p - a, e1)
    v = np.dot(d, qv) / det
    if v < -eps or u + v > 1 + eps:
        return False
    t = np.dot(e2, qv) / det
    return -eps <= t <= 1 + eps


def _point_inside_prism(pt, prism):
    x, y, z = pt
    if z > prism.height + 1e-12 or z < -1e-12:
        return False
    fp = prism.footprint
    inside = False
    n = len(fp)
    for i in range(n):
        x1, y1 = fp[i]
        x2, y2 = fp[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xi:
                inside = not inside
    return inside


def _blocked_by_faces(p, q, prism):
    if _point_inside_prism(p, prism) or _point_inside_prism(q, prism):
        return True
    fp = prism.footprint
    h = prism.height
    n = len(fp)
    faces = []
    for i in range(n):
        a = np.array([*fp[i], 0.0])
        b = np.array([*fp[(i + 1) % n], 0.0])
        a_top = np.array([*fp[i], h])
        b_top = np.array([*fp[(i + 1) % n], h])
        faces.append((a, b, b_top))
        faces.append((a, b_top, a_top))
    # roof and floor fans
    c0 = np.array([*fp.mean(axis=0), 0.0])
    ct = np.array([*fp.mean(axis=0), h])
    for i in range(n):
        a = np.array([*fp[i], 0.0])
        b = np.array([*fp[(i + 1) % n], 0.0])
        faces.append((a, b, c0))
        faces.append((a + [0, 0, h], b + [0, 0, h], ct))
    return any(_seg_triangle(np.asarray(p, float), np.asarray(q, float), *f) for f in faces)


class TestBuildingPrism:
    def test_needs_three_vertices(self):
        with pytest.raises(InvalidParameterError):
            BuildingPrism(np.array([[0, 0], [1, 1]]), 5.0)

    def test_rejects_self_intersection(self):
        bowtie = np.array([[0, 0], [2, 2], [2, 0], [0, 2]], dtype=float)
        with pytest.raises(InvalidParameterError):
            BuildingPrism(bowtie, 5.0)

    def test_rejects_nonpositive_height(self):
        with pytest.raises(InvalidParameterError):
            BuildingPrism(SQUARE, 0.0)

    def test_rect_detection(self):
        assert BuildingPrism(SQUARE, 5.0).is_axis_aligned_rect()
        tri = BuildingPrism(np.array([[0, 0], [10, 0], [5, 8]], float), 5.0)
        assert not tri.is_axis_aligned_rect()


class TestLoadBuildings(object):
    def _write(self, tmp_path, doc):
        path = tmp_path / "footprints.geojson"
        path.write_text(json.dumps(doc))
        return str(path)

    def _feature(self, ring, height=10.0):
        return {
            "type": "Feature",
            "properties": {"height": height},
            "geometry": {"type": "Polygon", "coordinates": [ring]},
        }

    def _square_ring(self, size_m=20.0, lon0=0.0, lat0=0.0):
        dlon = math.degrees(size_m / EARTH_RADIUS_M)
        dlat = math.degrees(size_m / EARTH_RADIUS_M)
        return [
            [lon0, lat0],
            [lon0 + dlon, lat0],
            [lon0 + dlon, lat0 + dlat],
            [lon0, lat0 + dlat],
            [lon0, lat0],
        ]

    def test_empty_collection(self, tmp_path):
        path = self._write(tmp_path, {"type": "FeatureCollection", "features": []})
        assert load_buildings(path) == []

    def test_square_footprint(self, tmp_path):
        doc = {
            "type": "FeatureCollection",
            "origin": [0.0, 0.0],
            "features": [self._feature(self._square_ring(20.0))],
        }
        prisms = load_buildings(self._write(tmp_path, doc))
        assert len(prisms) == 1
        assert prisms[0].footprint.shape == (4, 2)
        assert prisms[0].height == 10.0
        w = prisms[0].footprint[:, 0].max() - prisms[0].footprint[:, 0].min()
        assert w == pytest.approx(20.0, rel=1e-6)

    def test_self_intersecting_polygon_rejected(self, tmp_path):
        d = math.degrees(20.0 / EARTH_RADIUS_M)
        bowtie = [[0, 0], [d, d], [d, 0], [0, d], [0, 0]]
        doc = {"type": "FeatureCollection", "features": [self._feature(bowtie)]}
        with pytest.raises(FootprintError, match="feature 0"):
            load_buildings(self._write(tmp_path, doc))

    def test_missing_height_rejected(self, tmp_path):
        feat = self._feature(self._square_ring())
        del feat["properties"]["height"]
        doc = {"type": "FeatureCollection", "features": [feat]}
        with pytest.raises(FootprintError, match="height"):
            load_buildings(self._write(tmp_path, doc))

    def test_unclosed_ring_rejected(self, tmp_path):
        ring = self._square_ring()[:-1]
        ring.append(ring[0][:])
        ring[-1][0] += 1e-3  # breaks closure
        doc = {"type": "FeatureCollection", "features": [self._feature(ring)]}
        with pytest.raises(FootprintError, match="not closed"):
            load_buildings(self._write(tmp_path, doc))

    def test_non_polygon_rejected(self, tmp_path):
        doc = {
            "type": "FeatureCollection",
            "features": [{"type": "Feature", "properties": {"height": 3},
                          "geometry": {"type": "Point", "coordinates": [0, 0]}}],
        }
        with pytest.raises(FootprintError, match="feature 0"):
            load_buildings(self._write(tmp_path, doc))

    def test_missing_file(self):
        with pytest.raises(FootprintError):
            load_buildings("/nonexistent/footprints.geojson")


class TestSyntheticCity:
    def test_zero_density(self, unit_region, rng):
        assert generate_synthetic_city(0.0, (10, 20), (5, 10), unit_region, rng) == []

    def test_poisson_count(self, unit_region):
        rng = np.random.default_rng(13)
        counts = [
            len(generate_synthetic_city(30.0, (10, 20), (5, 10), unit_region, rng))
            for _ in range(400)
        ]
        expected = 30.0 * unit_region.area_km2
        se = math.sqrt(expected / len(counts))
        assert abs(np.mean(counts) - expected) < 4 * se

    def test_prisms_inside_region_and_ranges(self, unit_region):
        rng = np.random.default_rng(3)
        prisms = generate_synthetic_city(40.0, (10, 30), (5, 12), unit_region, rng)
        for p in prisms:
            assert p.is_axis_aligned_rect()
            assert 5 <= p.height <= 12
            xmin, ymin, xmax, ymax = p.bounds()
            assert 10 - 1e-9 <= xmax - xmin <= 30 + 1e-9
            assert unit_region.contains(np.array([[(xmin + xmax) / 2, (ymin + ymax) / 2]]))[0]

    def test_bad_ranges(self, unit_region, rng):
        with pytest.raises(InvalidParameterError):
            generate_synthetic_city(10.0, (20, 10), (5, 10), unit_region, rng)


class TestLos3d:
    def test_clears_roof(self):
        prism = BuildingPrism(_rect(50, 0, 20, 20), 10.0)
        assert los_3d((0, 0, 25.0), (100, 0, 25.0), [prism])

    def test_blocked_through_footprint(self):
        prism = BuildingPrism(_rect(50, 0, 20, 20), 10.0)
        assert not los_3d((0, 0, 1.0), (100, 0, 1.0), [prism])

    def test_descending_link_blocked_late(self):
        # from above the roof down to street level behind the building
        prism = BuildingPrism(_rect(90, 0, 20, 20), 10.0)
        assert not los_3d((0, 0, 25.0), (100, 0, 1.0), [prism])

    def test_degenerate_link(self):
        with pytest.raises(DegenerateLinkError):
            los_3d((1, 2, 3), (1, 2, 3), [])

    def test_endpoint_inside_prism_blocked(self):
        prism = BuildingPrism(_rect(0, 0, 40, 40), 30.0)
        assert not los_3d((0, 0, 1.0), (100, 0, 50.0), [prism])

    def test_matches_face_oracle(self):
        rng = np.random.default_rng(77)
        prisms = []
        for _ in range(12):
            cx, cy = rng.uniform(-80, 80, 2)
            if rng.random() < 0.5:
                fp = _rect(cx, cy, rng.uniform(5, 30), rng.uniform(5, 30))
            else:
                ang = np.sort(rng.uniform(0, 2 * np.pi, 5))
                rad = rng.uniform(4, 15)
                fp = np.column_stack([cx + rad * np.cos(ang), cy + rad * np.sin(ang)])
            prisms.append(BuildingPrism(fp, rng.uniform(3, 25)))
        for _ in range(100):
            a = np.array([*rng.uniform(-100, 100, 2), rng.uniform(0.5, 30)])
            b = np.array([*rng.uniform(-100, 100, 2), rng.uniform(0.5, 30)])
            expected = not any(_blocked_by_faces(a, b, p) for p in prisms)
            assert los_3d(a, b, prisms) == expected

    def test_height_monotonicity(self):
        rng = np.random.default_rng(55)
        prisms = [
            BuildingPrism(_rect(*rng.uniform(-60, 60, 2), rng.uniform(5, 25), rng.uniform(5, 25)),
                          rng.uniform(3, 20))
            for _ in range(10)
        ]
        for _ in range(150):
            a = np.array([*rng.uniform(-80, 80, 2), rng.uniform(0.5, 15)])
            b = np.array([*rng.uniform(-80, 80, 2), rng.uniform(0.5, 15)])
            if los_3d(a, b, prisms):
                lift = rng.uniform(0, 20)
                assert los_3d(a + [0, 0, lift], b + [0, 0, lift], prisms)

    def test_2d_consistency_with_walls(self):
        # tall thin prisms standing in for walls, endpoints at ground level
        rng = np.random.default_rng(66)
        n = 15
        mids = rng.uniform(-50, 50, (n, 2))
        angs = rng.uniform(0, 2 * np.pi, n)
        length = 12.0
        walls = WallSet(mids, np.full(n, length), angs)
        p1, p2 = walls.endpoints()
        prisms = []
        for i in range(n):
            d = p2[i] - p1[i]
            normal = np.array([-d[1], d[0]]) / np.hypot(*d) * 1e-6
            fp = np.array([p1[i] - normal, p2[i] - normal, p2[i] + normal, p1[i] + normal])
            prisms.append(BuildingPrism(fp, 1000.0))
        for _ in range(60):
            a, b = rng.uniform(-50, 50, (2, 2))
            assert los_3d((*a, 0.0), (*b, 0.0), prisms) == link_is_los(a, b, walls)


class TestSceneMask:
    def test_rect_kernel_matches_scalar(self):
        rng = np.random.default_rng(88)
        prisms = [
            BuildingPrism(_rect(*rng.uniform(-80, 80, 2), rng.uniform(5, 30), rng.uniform(5, 30)),
                          rng.uniform(3, 25))
            for _ in range(20)
        ]
        scene = Scene3D(prisms)
        assert scene._rect_bounds is not None
        a = np.column_stack([rng.uniform(-100, 100, (7, 2)), rng.uniform(0.5, 30, 7)])
        b = np.column_stack([rng.uniform(-100, 100, (11, 2)), rng.uniform(0.5, 30, 11)])
        mask = scene_los_mask(a, b, scene)
        for i in range(7):
            for j in range(11):
                assert mask[i, j] == los_3d(a[i], b[j], prisms)

    def test_general_scene_fallback(self):
        rng = np.random.default_rng(99)
        tri = BuildingPrism(np.array([[0, 0], [30, 0], [15, 25]], float), 12.0)
        scene = Scene3D([tri])
        assert scene._rect_bounds is None
        a = np.column_stack([rng.uniform(-50, 50, (4, 2)), rng.uniform(0.5, 20, 4)])
        b = np.column_stack([rng.uniform(-50, 50, (5, 2)), rng.uniform(0.5, 20, 5)])
        mask = scene_los_mask(a, b, scene)
        for i in range(4):
            for j in range(5):
                assert mask[i, j] == los_3d(a[i], b[j], [tri])

    def test_empty_scene_all_los(self):
        a = np.zeros((2, 3))
        a[:, 2] = 1.0
        assert scene_los_mask(a, a + 1.0, Scene3D.empty()).all()
