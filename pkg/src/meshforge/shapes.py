"""Procedural fixture meshes (closed, CCW-outward winding)."""

from __future__ import annotations

import numpy as np

from .mesh import Mesh


def tetrahedron() -> Mesh:
    """Regular tetrahedron inscribed in the unit sphere."""
    s = 1.0 / np.sqrt(3.0)
    positions = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]],
                         dtype=np.float64) * s
    faces = [(0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)]
    return Mesh(positions, faces, validate=False)


def cube() -> Mesh:
    """Axis-aligned cube spanning [-1, 1]^3, split into 12 triangles."""
    positions = np.array([[x, y, z]
                          for x in (-1.0, 1.0)
                          for y in (-1.0, 1.0)
                          for z in (-1.0, 1.0)], dtype=np.float64)
    quads = [
        (0, 1, 3, 2),  # x = -1
        (4, 6, 7, 5),  # x = +1
        (0, 4, 5, 1),  # y = -1
        (2, 3, 7, 6),  # y = +1
        (0, 2, 6, 4),  # z = -1
        (1, 5, 7, 3),  # z = +1
    ]
    faces = []
    for a, b, c, d in quads:
        faces.append((a, b, c))
        faces.append((a, c, d))
    return Mesh(positions, faces, validate=False)


def octahedron() -> Mesh:
    """Regular octahedron with vertices on the coordinate axes."""
    positions = np.array([[1, 0, 0], [-1, 0, 0],
                          [0, 1, 0], [0, -1, 0],
                          [0, 0, 1], [0, 0, -1]], dtype=np.float64)
    faces = [(0, 2, 4), (2, 1, 4), (1, 3, 4), (3, 0, 4),
             (2, 0, 5), (1, 2, 5), (3, 1, 5), (0, 3, 5)]
    return Mesh(positions, faces, validate=False)


def icosahedron() -> Mesh:
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    raw = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=np.float64)
    raw /= np.linalg.norm(raw[0])
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    return Mesh(raw, faces, validate=False)


def icosphere(subdivisions: int, radius: float = 1.0) -> Mesh:
    """Icosahedron subdivided `subdivisions` times, projected to a sphere.

    Face count is 20 * 4^subdivisions; the construction is deterministic.
    """
    mesh = icosahedron()
    positions = mesh.positions
    faces = mesh.faces
    for _ in range(subdivisions):
        e01 = np.sort(faces[:, (0, 1)], axis=1)
        e12 = np.sort(faces[:, (1, 2)], axis=1)
        e20 = np.sort(faces[:, (2, 0)], axis=1)
        all_edges = np.concatenate([e01, e12, e20], axis=0)
        uniq, inverse = np.unique(all_edges, axis=0, return_inverse=True)
        mids = 0.5 * (positions[uniq[:, 0]] + positions[uniq[:, 1]])
        norms = np.sqrt((mids * mids).sum(axis=1))
        mids = mids / norms[:, None]
        base = len(positions)
        positions = np.concatenate([positions, mids], axis=0)
        nf = len(faces)
        m01 = base + inverse[:nf]
        m12 = base + inverse[nf:2 * nf]
        m20 = base + inverse[2 * nf:]
        a, b, c = faces[:, 0], faces[:, 1], faces[:, 2]
        faces = np.concatenate([
            np.stack([a, m01, m20], axis=1),
            np.stack([b, m12, m01], axis=1),
            np.stack([c, m20, m12], axis=1),
            np.stack([m01, m12, m20], axis=1),
        ], axis=0)
    norms = np.sqrt((positions * positions).sum(axis=1))
    positions = positions / norms[:, None] * radius
    return Mesh(positions, faces, validate=False)
