"""Numba kernels for the all-pairs visibility queries.

These are the hot loops of a realization: every UE-BS and SBS-MBS pair
needs a blockage test against every wall (and tree line). A brute-force
scan is exact but quadratic with a large constant, so the batched kernels
prune with an angular sweep: seen from a fixed source point, a segment
that does not contain the source subtends an arc strictly smaller than
half a turn, so only destinations whose bearing falls inside that arc can
be cut by it. Bearings use a monotone "diamond angle" surrogate (no
trigonometry); the arc bounds are padded by an epsilon so candidates on
the boundary still reach the exact intersection test, which has the final
word. The kernels therefore return exactly what a pairwise scan returns.
"""

import numpy as np
from numba import njit

__all__ = ["blocked_mask", "crossing_counts", "rect_prisms_blocked_mask"]

# Padding (in pseudo-angle units, range [-1, 3)) around each arc so that
# floating-point jitter in the bearing computation cannot hide a true hit.
_ARC_EPS = 1e-9


@njit(cache=True, inline="always")
def _pseudo_angle(dx, dy):
    # Monotone surrogate for atan2(dy, dx): range [-1, 3), antipode at +2
    # (mod 4). Preserves the "arc shorter than pi" property exactly.
    s = abs(dx) + abs(dy)
    if s == 0.0:
        return 0.0
    t = dy / s
    if dx >= 0.0:
        return t
    return 2.0 - t


@njit(cache=True, inline="always")
def _segs_cross(ax, ay, bx, by, cx, cy, dx, dy):
    # Closed-segment intersection via orientation signs; collinear overlap
    # resolved by 1D projection. Mirrors geometry.segments_intersect.
    d1x = bx - ax
    d1y = by - ay
    d3 = d1x * (cy - ay) - d1y * (cx - ax)
    d4 = d1x * (dy - ay) - d1y * (dx - ax)
    if (d3 > 0.0 and d4 > 0.0) or (d3 < 0.0 and d4 < 0.0):
        return False
    d2x = dx - cx
    d2y = dy - cy
    d1 = d2x * (ay - cy) - d2y * (ax - cx)
    d2 = d2x * (by - cy) - d2y * (bx - cx)
    if (d1 > 0.0 and d2 > 0.0) or (d1 < 0.0 and d2 < 0.0):
        return False
    if d1 != 0.0 or d2 != 0.0 or d3 != 0.0 or d4 != 0.0:
        return True
    # All four points collinear: 1D overlap on the shared line is
    # equivalent to overlap of both axis projections.
    if min(ax, bx) > max(cx, dx) or min(cx, dx) > max(ax, bx):
        return False
    if min(ay, by) > max(cy, dy) or min(cy, dy) > max(ay, by):
        return False
    return True


@njit(cache=True, inline="always")
def _bisect_left(a, x, n):
    lo = 0
    hi = n
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True, inline="always")
def _bisect_right(a, x, n):
    lo = 0
    hi = n
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True)
def blocked_mask(src, dst, seg_p1, seg_p2):
    """True at [i, j] iff segment src[i]->dst[j] meets any obstacle segment.

    Exact (matches a pairwise closed-segment scan). Cost scales with
    len(src) * len(obstacles), so callers should put the smaller point set
    on the src side and transpose.
    """
    m = src.shape[0]
    n = dst.shape[0]
    k = seg_p1.shape[0]
    out = np.zeros((m, n), dtype=np.bool_)
    ang = np.empty(n, dtype=np.float64)
    sang = np.empty(n, dtype=np.float64)
    for i in range(m):
        sx = src[i, 0]
        sy = src[i, 1]
        for j in range(n):
            ang[j] = _pseudo_angle(dst[j, 0] - sx, dst[j, 1] - sy)
        order = np.argsort(ang)
        for j in range(n):
            sang[j] = ang[order[j]]
        for w in range(k):
            w1x = seg_p1[w, 0]
            w1y = seg_p1[w, 1]
            w2x = seg_p2[w, 0]
            w2y = seg_p2[w, 1]
            a1 = _pseudo_angle(w1x - sx, w1y - sy)
            a2 = _pseudo_angle(w2x - sx, w2y - sy)
            if a1 > a2:
                a1, a2 = a2, a1
            if a2 - a1 <= 2.0:
                # Minor arc is [a1, a2].
                t0 = _bisect_left(sang, a1 - _ARC_EPS, n)
                t1 = _bisect_right(sang, a2 + _ARC_EPS, n)
                for t in range(t0, t1):
                    j = order[t]
                    if not out[i, j] and _segs_cross(
                        sx, sy, dst[j, 0], dst[j, 1], w1x, w1y, w2x, w2y
                    ):
                        out[i, j] = True
            else:
                # Minor arc wraps: [a2, 3) plus [-1, a1].
                t1 = _bisect_right(sang, a1 + _ARC_EPS, n)
                for t in range(0, t1):
                    j = order[t]
                    if not out[i, j] and _segs_cross(
                        sx, sy, dst[j, 0], dst[j, 1], w1x, w1y, w2x, w2y
                    ):
                        out[i, j] = True
                t0 = _bisect_left(sang, a2 - _ARC_EPS, n)
                for t in range(t0, n):
                    j = order[t]
                    if not out[i, j] and _segs_cross(
                        sx, sy, dst[j, 0], dst[j, 1], w1x, w1y, w2x, w2y
                    ):
                        out[i, j] = True
    return out


@njit(cache=True)
def crossing_counts(src, dst, seg_p1, seg_p2, in_leaf):
    """Per-pair counts of crossed segments, split by the in_leaf flag.

    Returns (in_counts, out_counts), each (len(src), len(dst)) int32.
    Same sweep as blocked_mask but accumulating instead of short-circuiting.
    """
    m = src.shape[0]
    n = dst.shape[0]
    k = seg_p1.shape[0]
    cin = np.zeros((m, n), dtype=np.int32)
    cout = np.zeros((m, n), dtype=np.int32)
    ang = np.empty(n, dtype=np.float64)
    sang = np.empty(n, dtype=np.float64)
    for i in range(m):
        sx = src[i, 0]
        sy = src[i, 1]
        for j in range(n):
            ang[j] = _pseudo_angle(dst[j, 0] - sx, dst[j, 1] - sy)
        order = np.argsort(ang)
        for j in range(n):
            sang[j] = ang[order[j]]
        for w in range(k):
            w1x = seg_p1[w, 0]
            w1y = seg_p1[w, 1]
            w2x = seg_p2[w, 0]
            w2y = seg_p2[w, 1]
            a1 = _pseudo_angle(w1x - sx, w1y - sy)
            a2 = _pseudo_angle(w2x - sx, w2y - sy)
            if a1 > a2:
                a1, a2 = a2, a1
            leafy = in_leaf[w]
            if a2 - a1 <= 2.0:
                t0 = _bisect_left(sang, a1 - _ARC_EPS, n)
                t1 = _bisect_right(sang, a2 + _ARC_EPS, n)
                for t in range(t0, t1):
                    j = order[t]
                    if _segs_cross(sx, sy, dst[j, 0], dst[j, 1], w1x, w1y, w2x, w2y):
                        if leafy:
                            cin[i, j] += 1
                        else:
                            cout[i, j] += 1
            else:
                t1 = _bisect_right(sang, a1 + _ARC_EPS, n)
                for t in range(0, t1):
                    j = order[t]
                    if _segs_cross(sx, sy, dst[j, 0], dst[j, 1], w1x, w1y, w2x, w2y):
                        if leafy:
                            cin[i, j] += 1
                        else:
                            cout[i, j] += 1
                t0 = _bisect_left(sang, a2 - _ARC_EPS, n)
                for t in range(t0, n):
                    j = order[t]
                    if _segs_cross(sx, sy, dst[j, 0], dst[j, 1], w1x, w1y, w2x, w2y):
                        if leafy:
                            cin[i, j] += 1
                        else:
                            cout[i, j] += 1
    return cin, cout


@njit(cache=True)
def rect_prisms_blocked_mask(src, dst, bounds, heights):
    """3D blockage of src[i]->dst[j] by axis-aligned rectangular prisms.

    src, dst are (.., 3) points; bounds is (k, 4) as (xmin, ymin, xmax, ymax)
    and heights (k,) roof heights; prisms stand on the ground plane z=0.
    A link is blocked iff some point of it lies inside a prism (closed),
    i.e. the slab-clipped parameter interval is non-empty and the lower of
    its two endpoint altitudes is at or below the roof.
    """
    m = src.shape[0]
    n = dst.shape[0]
    k = bounds.shape[0]
    out = np.zeros((m, n), dtype=np.bool_)
    for i in range(m):
        ax = src[i, 0]
        ay = src[i, 1]
        az = src[i, 2]
        for j in range(n):
            dx = dst[j, 0] - ax
            dy = dst[j, 1] - ay
            dz = dst[j, 2] - az
            lox = min(ax, dst[j, 0])
            hix = max(ax, dst[j, 0])
            loy = min(ay, dst[j, 1])
            hiy = max(ay, dst[j, 1])
            for w in range(k):
                if bounds[w, 0] > hix or bounds[w, 2] < lox:
                    continue
                if bounds[w, 1] > hiy or bounds[w, 3] < loy:
                    continue
                t0 = 0.0
                t1 = 1.0
                if dx != 0.0:
                    ta = (bounds[w, 0] - ax) / dx
                    tb = (bounds[w, 2] - ax) / dx
                    if ta > tb:
                        ta, tb = tb, ta
                    if ta > t0:
                        t0 = ta
                    if tb < t1:
                        t1 = tb
                elif ax < bounds[w, 0] or ax > bounds[w, 2]:
                    continue
                if dy != 0.0:
                    ta = (bounds[w, 1] - ay) / dy
                    tb = (bounds[w, 3] - ay) / dy
                    if ta > tb:
                        ta, tb = tb, ta
                    if ta > t0:
                        t0 = ta
                    if tb < t1:
                        t1 = tb
                elif ay < bounds[w, 1] or ay > bounds[w, 3]:
                    continue
                if t0 > t1:
                    continue
                if min(az + t0 * dz, az + t1 * dz) <= heights[w]:
                    out[i, j] = True
                    break
    return out
