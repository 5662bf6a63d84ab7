"""Plane-sum error quadrics.

A quadric is the upper triangle of a symmetric 4x4 form, stored row-major
as 10 float64 coefficients:

    [q0 q1 q2 q3]
    [ . q4 q5 q6]
    [ .  . q7 q8]
    [ .  .  . q9]

Built as a sum of outer products p p^T over unit planes p = (a, b, c, d),
the form evaluated at a homogenized point (x, y, z, 1) is the sum of
squared distances from the point to those planes.  Planes are normalized
to unit normals so the value is a true squared distance, not scaled by an
area-like factor.
"""

from __future__ import annotations

import numpy as np

from . import _scalar
from .errors import DegenerateTriangleError
from .mesh import Adjacency, Mesh

QUADRIC_SIZE = 10


def zero_quadric() -> np.ndarray:
    return np.zeros(QUADRIC_SIZE, dtype=np.float64)


def plane_of_triangle(p0, p1, p2) -> np.ndarray:
    """Unit plane (a, b, c, d) through a CCW triangle.

    Raises DegenerateTriangleError when the cross-product norm is at most
    1e-12 times the squared longest edge.
    """
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    plane = _scalar.triangle_plane(p0[0], p0[1], p0[2],
                                   p1[0], p1[1], p1[2],
                                   p2[0], p2[1], p2[2])
    if plane is None:
        raise DegenerateTriangleError("triangle is degenerate")
    return np.array(plane, dtype=np.float64)


def quadric_of_plane(plane) -> np.ndarray:
    """Outer product p p^T of a unit plane, as 10 upper-triangle coefficients."""
    a, b, c, d = (float(v) for v in plane)
    return np.array([a * a, a * b, a * c, a * d,
                     b * b, b * c, b * d,
                     c * c, c * d,
                     d * d], dtype=np.float64)


def add(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Coefficient-wise sum; exactly commutative."""
    return np.asarray(q1, dtype=np.float64) + np.asarray(q2, dtype=np.float64)


def evaluate(q, point) -> float:
    """Squared-distance sum at a point, clamped to >= 0."""
    x, y, z = (float(v) for v in point)
    return _scalar.quadric_eval(np.asarray(q, dtype=np.float64), x, y, z)


def vertex_quadric(mesh: Mesh, adj: Adjacency, i: int) -> np.ndarray:
    """Sum of plane quadrics over the non-degenerate faces incident to i."""
    q = zero_quadric()
    pos = mesh.positions
    for f in adj.faces_of(i):
        a, b, c = mesh.faces[f]
        plane = _scalar.triangle_plane(
            pos[a, 0], pos[a, 1], pos[a, 2],
            pos[b, 0], pos[b, 1], pos[b, 2],
            pos[c, 0], pos[c, 1], pos[c, 2])
        if plane is None:
            continue
        pa, pb, pc, pd = plane
        q += np.array([pa * pa, pa * pb, pa * pc, pa * pd,
                       pb * pb, pb * pc, pb * pd,
                       pc * pc, pc * pd,
                       pd * pd], dtype=np.float64)
    return q


def vertex_quadrics_all(mesh: Mesh, adj: Adjacency | None = None) -> np.ndarray:
    """(n, 10) array of per-vertex quadrics for every mesh vertex.

    Vectorized mirror of vertex_quadric: per-face planes use the same
    expressions as _scalar.triangle_plane and accumulation runs in
    ascending face order, so entries match the scalar path bit for bit.
    """
    n = mesh.vertex_count
    out = np.zeros((n, QUADRIC_SIZE), dtype=np.float64)
    if mesh.face_count == 0:
        return out
    pos = mesh.positions
    fcs = mesh.faces
    p0 = pos[fcs[:, 0]]
    p1 = pos[fcs[:, 1]]
    p2 = pos[fcs[:, 2]]
    e1 = p1 - p0
    e2 = p2 - p0
    nx = e1[:, 1] * e2[:, 2] - e1[:, 2] * e2[:, 1]
    ny = e1[:, 2] * e2[:, 0] - e1[:, 0] * e2[:, 2]
    nz = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    nn = np.sqrt(nx * nx + ny * ny + nz * nz)
    d1 = e1[:, 0] * e1[:, 0] + e1[:, 1] * e1[:, 1] + e1[:, 2] * e1[:, 2]
    d2 = e2[:, 0] * e2[:, 0] + e2[:, 1] * e2[:, 1] + e2[:, 2] * e2[:, 2]
    e3 = e2 - e1
    d3 = e3[:, 0] * e3[:, 0] + e3[:, 1] * e3[:, 1] + e3[:, 2] * e3[:, 2]
    longest = np.maximum(np.maximum(d1, d2), d3)
    valid = nn > _scalar.EPS_DEGENERATE * longest
    safe_nn = np.where(valid, nn, 1.0)
    a = nx / safe_nn
    b = ny / safe_nn
    c = nz / safe_nn
    d = -(a * p0[:, 0] + b * p0[:, 1] + c * p0[:, 2])
    fq = np.stack([a * a, a * b, a * c, a * d,
                   b * b, b * c, b * d,
                   c * c, c * d,
                   d * d], axis=1)
    fq[~valid] = 0.0
    np.add.at(out, fcs.ravel(), np.repeat(fq, 3, axis=0))
    return out


def placement(q, v1, v2) -> tuple[np.ndarray, float]:
    """Merged-vertex position minimizing the quadric, and its cost.

    Solves the 3x3 system when it is safely invertible (scale-aware
    determinant threshold); otherwise falls back to the best of
    {v1, v2, midpoint}, ties broken in that listed order.  The cost is
    never negative.
    """
    q = np.asarray(q, dtype=np.float64)
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    x, y, z, cost = _scalar.place_pair(
        q, v1[0], v1[1], v1[2], v2[0], v2[1], v2[2], _scalar.POLICY_OPTIMAL)
    return np.array([x, y, z], dtype=np.float64), float(cost)
