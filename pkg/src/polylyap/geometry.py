"""Plot-ready geometry of 2-D and 3-D polytopes."""
import numpy as np
from scipy.spatial import ConvexHull


def polygon_order(v):
    """Column indices of a 2-D vertex matrix sorted counter-clockwise.

    Angles are measured about the origin, which is interior for any
    absorbing polytope, starting from the positive first axis.
    """
    v = np.asarray(v, dtype=float)
    if v.shape[0] != 2:
        raise ValueError(f"polygon order needs n = 2, got n = {v.shape[0]}")
    ang = np.mod(np.arctan2(v[1], v[0]), 2 * np.pi)
    # Snap angles that round to 2*pi back to 0 so (1, -tiny) sorts first.
    ang[np.isclose(ang, 2 * np.pi, rtol=0.0, atol=1e-15)] = 0.0
    return np.argsort(ang, kind="stable")


def hull_facets(v):
    """Outward-oriented triangles ``(i, j, k)`` of the hull of the columns of ``v``.

    Faces with more than three vertices come back triangulated.
    """
    v = np.asarray(v, dtype=float)
    if v.shape[0] != 3:
        raise ValueError(f"facets need n = 3, got n = {v.shape[0]}")
    pts = v.T
    hull = ConvexHull(pts, qhull_options="Qt")
    centre = pts[hull.vertices].mean(axis=0)
    out = []
    for tri in hull.simplices:
        a, b, c = pts[tri]
        normal = np.cross(b - a, c - a)
        if normal @ (a - centre) < 0:
            tri = tri[[0, 2, 1]]
        out.append(tuple(int(i) for i in tri))
    return sorted(out)
