"""Indexed triangle meshes: OBJ import/export, hygiene, adjacency.

All geometry is 64-bit floating point in model units.  Faces are triples of
vertex indices; counter-clockwise winding means outward normal.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ObjParseError


class Mesh:
    """An indexed triangle set: (n, 3) float64 positions, (m, 3) int64 faces."""

    __slots__ = ("positions", "faces")

    def __init__(self, positions=None, faces=None, validate: bool = True):
        if positions is None:
            positions = np.zeros((0, 3), dtype=np.float64)
        if faces is None:
            faces = np.zeros((0, 3), dtype=np.int64)
        self.positions = np.ascontiguousarray(
            np.asarray(positions, dtype=np.float64).reshape(-1, 3))
        self.faces = np.ascontiguousarray(
            np.asarray(faces, dtype=np.int64).reshape(-1, 3))
        if validate:
            self._check()

    def _check(self):
        if self.positions.size and not np.isfinite(self.positions).all():
            raise ValueError("mesh has a non-finite vertex coordinate")
        if self.faces.size:
            if self.faces.min() < 0 or self.faces.max() >= len(self.positions):
                raise ValueError("face index out of range")

    @property
    def vertex_count(self) -> int:
        return self.positions.shape[0]

    @property
    def face_count(self) -> int:
        return self.faces.shape[0]

    def copy(self) -> "Mesh":
        return Mesh(self.positions.copy(), self.faces.copy(), validate=False)

    def __eq__(self, other):
        if not isinstance(other, Mesh):
            return NotImplemented
        return (self.positions.shape == other.positions.shape
                and self.faces.shape == other.faces.shape
                and np.array_equal(self.positions, other.positions)
                and np.array_equal(self.faces, other.faces))

    __hash__ = None

    def __repr__(self):
        return f"Mesh({self.vertex_count} vertices, {self.face_count} faces)"


class Adjacency:
    """Vertex-to-incident-face lists and the canonical edge set of a mesh.

    A face is listed under vertex i exactly when i appears among its
    corners; an edge (i, j) with i < j is present exactly when some face
    contains both endpoints.
    """

    __slots__ = ("vertex_faces", "edges")

    def __init__(self, mesh: Mesh):
        n = mesh.vertex_count
        vertex_faces: list[list[int]] = [[] for _ in range(n)]
        edges: set[tuple[int, int]] = set()
        for f, (a, b, c) in enumerate(mesh.faces.tolist()):
            for v in {a, b, c}:
                vertex_faces[v].append(f)
            for i, j in ((a, b), (b, c), (a, c)):
                if i != j:
                    edges.add((i, j) if i < j else (j, i))
        self.vertex_faces = vertex_faces
        self.edges = edges

    def faces_of(self, i: int) -> list[int]:
        return self.vertex_faces[i]

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


def load_obj(text: str) -> Mesh:
    """Parse the `v`/`f` subset of Wavefront OBJ.

    Faces with more than three corners are fan-triangulated from the first
    corner; negative indices resolve against the vertex count seen so far;
    `vt`/`vn`/material/group records and comments are ignored.
    """
    positions: list[tuple[float, float, float]] = []
    faces: list[tuple[int, int, int]] = []
    face_lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        key = parts[0]
        if key == "v":
            if len(parts) < 4:
                raise ObjParseError(lineno, "vertex record needs 3 coordinates")
            try:
                xyz = (float(parts[1]), float(parts[2]), float(parts[3]))
            except ValueError:
                raise ObjParseError(lineno, "malformed numeric field") from None
            if not all(math.isfinite(c) for c in xyz):
                raise ObjParseError(lineno, "non-finite vertex coordinate")
            positions.append(xyz)
        elif key == "f":
            corners: list[int] = []
            for tok in parts[1:]:
                head = tok.split("/", 1)[0]
                try:
                    idx = int(head)
                except ValueError:
                    raise ObjParseError(lineno, "malformed face index") from None
                if idx == 0:
                    raise ObjParseError(lineno, "OBJ face indices are 1-based")
                resolved = len(positions) + idx if idx < 0 else idx - 1
                if resolved < 0:
                    raise ObjParseError(lineno, "face index out of range")
                corners.append(resolved)
            if len(corners) < 3:
                raise ObjParseError(lineno, "face record needs at least 3 corners")
            for c1, c2 in zip(corners[1:-1], corners[2:]):
                faces.append((corners[0], c1, c2))
                face_lines.append(lineno)
        # vt / vn / usemtl / mtllib / g / o / s and the rest: ignored
    nv = len(positions)
    for (a, b, c), ln in zip(faces, face_lines):
        if a >= nv or b >= nv or c >= nv:
            raise ObjParseError(ln, "face index out of range")
    return Mesh(positions, faces, validate=False)


def save_obj(mesh: Mesh) -> str:
    """Serialize a mesh so that load_obj round-trips it exactly.

    Positions are printed with shortest-round-trip decimal repr, so the
    parsed floats come back bit-identical.
    """
    lines = []
    for x, y, z in mesh.positions:
        lines.append(f"v {float(x)!r} {float(y)!r} {float(z)!r}")
    for a, b, c in mesh.faces:
        lines.append(f"f {a + 1} {b + 1} {c + 1}")
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def cleanup(mesh: Mesh) -> Mesh:
    """Drop faces with fewer than 3 distinct corners and exact duplicates.

    Duplicates are faces with the same corner index set regardless of
    rotation or winding; the first occurrence is kept.  The vertex list is
    unchanged.  Idempotent.
    """
    kept: list[tuple[int, int, int]] = []
    seen: set[tuple[int, int, int]] = set()
    for a, b, c in mesh.faces.tolist():
        if a == b or b == c or a == c:
            continue
        key = tuple(sorted((a, b, c)))
        if key in seen:
            continue
        seen.add(key)
        kept.append((a, b, c))
    return Mesh(mesh.positions.copy(), kept, validate=False)


def bounding_radius(mesh: Mesh) -> float:
    """Half the diagonal of the axis-aligned bounding box."""
    if mesh.vertex_count == 0:
        raise ValueError("bounding_radius of an empty mesh")
    span = mesh.positions.max(axis=0) - mesh.positions.min(axis=0)
    return 0.5 * float(np.sqrt(span[0] * span[0] + span[1] * span[1]
                               + span[2] * span[2]))
