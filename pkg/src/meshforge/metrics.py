"""Sampled geometric deviation between two triangle meshes.

Sample points are drawn area-uniformly on the source surface with a
counter-based generator (see _scalar.uniform01), so a (mesh, samples,
seed) triple always yields the same report.  Nearest-face queries go
through a uniform grid over the target's triangles; a brute-force scan is
the testing oracle for that acceleration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import _scalar
from ._backend import get_impl
from .errors import ZeroAreaMeshError
from .mesh import Mesh

_GRID_CELL_CAP = 1 << 21  # max total cells


@dataclass(frozen=True)
class DeviationReport:
    mean: float
    max: float
    samples: int
    seed: int
    direction: str  # "A->B" or "symmetric"

    def to_dict(self) -> dict:
        return {"mean": self.mean, "max": self.max, "samples": self.samples,
                "seed": self.seed, "direction": self.direction}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def point_triangle_distance(p, tri) -> float:
    """Exact Euclidean distance from a point to a closed triangle.

    The triangle may be degenerate; distance then falls back to the
    nearest of its edge segments (or point).
    """
    p = np.asarray(p, dtype=np.float64)
    t = np.asarray(tri, dtype=np.float64).reshape(3, 3)
    return math.sqrt(_scalar.point_triangle_dist_sq(
        p[0], p[1], p[2],
        t[0, 0], t[0, 1], t[0, 2],
        t[1, 0], t[1, 1], t[1, 2],
        t[2, 0], t[2, 1], t[2, 2]))


def _face_areas(mesh: Mesh) -> np.ndarray:
    p = mesh.positions
    f = mesh.faces
    e1 = p[f[:, 1]] - p[f[:, 0]]
    e2 = p[f[:, 2]] - p[f[:, 0]]
    cx = e1[:, 1] * e2[:, 2] - e1[:, 2] * e2[:, 1]
    cy = e1[:, 2] * e2[:, 0] - e1[:, 0] * e2[:, 2]
    cz = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    return 0.5 * np.sqrt(cx * cx + cy * cy + cz * cz)


def _uniform01_vec(seed: int, counters: np.ndarray) -> np.ndarray:
    # vectorized _scalar.uniform01
    m = np.uint64(0xFFFFFFFFFFFFFFFF)
    with np.errstate(over="ignore"):
        z = (np.uint64(seed & 0xFFFFFFFFFFFFFFFF) * np.uint64(0x9E3779B97F4A7C15)
             + counters.astype(np.uint64) * np.uint64(0xBF58476D1CE4E5B9)
             + np.uint64(0xD1B54A32D192ED03)) & m
        z ^= z >> np.uint64(30)
        z = (z * np.uint64(0xBF58476D1CE4E5B9)) & m
        z ^= z >> np.uint64(27)
        z = (z * np.uint64(0x94D049BB133111EB)) & m
        z ^= z >> np.uint64(31)
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def sample_surface(mesh: Mesh, samples: int, seed: int,
                   counter_base: int = 0) -> np.ndarray:
    """(samples, 3) points area-uniformly distributed over the surface.

    Per-face sample counts are allocated proportionally to face area
    (largest-remainder rounding, ties to the lower face index); points are
    then placed by uniform barycentric sampling.  Sample s consumes the
    generator values at counters 2*(counter_base+s) and 2*(counter_base+s)+1.
    """
    if samples <= 0:
        raise ValueError("samples must be > 0")
    if mesh.face_count == 0:
        raise ZeroAreaMeshError("mesh has no faces")
    areas = _face_areas(mesh)
    total = float(areas.sum())
    if not (total > 0.0):
        raise ZeroAreaMeshError("mesh has no positive-area faces")
    exact = areas * (samples / total)
    counts = np.floor(exact).astype(np.int64)
    shortfall = samples - int(counts.sum())
    if shortfall > 0:
        frac = exact - np.floor(exact)
        order = np.lexsort((np.arange(len(frac)), -frac))
        counts[order[:shortfall]] += 1
    face_idx = np.repeat(np.arange(mesh.face_count), counts)
    ctr = counter_base + np.arange(samples, dtype=np.uint64)
    u1 = _uniform01_vec(seed, 2 * ctr)
    u2 = _uniform01_vec(seed, 2 * ctr + np.uint64(1))
    r = np.sqrt(u1)
    p = mesh.positions
    f = mesh.faces[face_idx]
    a = p[f[:, 0]]
    b = p[f[:, 1]]
    c = p[f[:, 2]]
    return ((1.0 - r)[:, None] * a
            + (r * (1.0 - u2))[:, None] * b
            + (r * u2)[:, None] * c)


def _build_face_grid(mesh: Mesh):
    """Uniform grid binning each face into every cell its bbox overlaps.

    Returns (tri_pts (F, 9), cell_start, cell_faces, origin, cell, dims).
    """
    p = mesh.positions
    f = mesh.faces
    tri = p[f]  # (F, 3, 3)
    lo = tri.min(axis=1)
    hi = tri.max(axis=1)
    gmin = lo.min(axis=0)
    gmax = hi.max(axis=0)
    extent = gmax - gmin
    diag = float(np.sqrt(extent @ extent))
    cell = float(np.mean((hi - lo).max(axis=1)))
    if not (cell > 0.0):
        cell = diag / 16.0 if diag > 0.0 else 1.0
    if diag > 0.0:
        cell = max(cell, diag / 256.0)
    while True:
        dims = np.maximum(1, np.ceil(extent / cell - 1e-12).astype(np.int64))
        if int(dims.prod()) <= _GRID_CELL_CAP:
            break
        cell *= 2.0
    nx, ny, nz = (int(d) for d in dims)

    lo_cell = np.clip(np.floor((lo - gmin) / cell).astype(np.int64), 0,
                      dims - 1)
    hi_cell = np.clip(np.floor((hi - gmin) / cell).astype(np.int64), 0,
                      dims - 1)
    counts = np.zeros(nx * ny * nz + 1, dtype=np.int64)
    spans = []
    for t in range(len(f)):
        x0, y0, z0 = lo_cell[t]
        x1, y1, z1 = hi_cell[t]
        spans.append((int(x0), int(x1), int(y0), int(y1), int(z0), int(z1)))
        for gx in range(x0, x1 + 1):
            for gy in range(y0, y1 + 1):
                base = (gx * ny + gy) * nz
                counts[base + z0 + 1:base + z1 + 2] += 1
    cell_start = np.cumsum(counts)
    cell_faces = np.empty(int(cell_start[-1]), dtype=np.int64)
    fill = cell_start[:-1].copy()
    for t, (x0, x1, y0, y1, z0, z1) in enumerate(spans):
        for gx in range(x0, x1 + 1):
            for gy in range(y0, y1 + 1):
                base = (gx * ny + gy) * nz
                for gz in range(z0, z1 + 1):
                    c = base + gz
                    cell_faces[fill[c]] = t
                    fill[c] += 1
    tri_pts = np.ascontiguousarray(tri.reshape(-1, 9), dtype=np.float64)
    return (tri_pts, np.ascontiguousarray(cell_start),
            np.ascontiguousarray(cell_faces), gmin.astype(np.float64),
            cell, (nx, ny, nz))


def min_distances_to_mesh(points, mesh: Mesh, backend: str | None = None) -> np.ndarray:
    """Grid-accelerated distance from each point to the nearest face of `mesh`."""
    if mesh.face_count == 0:
        raise ZeroAreaMeshError("target mesh has no faces")
    pts = np.ascontiguousarray(np.asarray(points, dtype=np.float64).reshape(-1, 3))
    tri_pts, cell_start, cell_faces, origin, cell, dims = _build_face_grid(mesh)
    impl = get_impl(backend)
    sq = impl.min_sq_distances(pts, tri_pts, cell_start, cell_faces,
                               origin, cell, dims)
    return np.sqrt(np.asarray(sq, dtype=np.float64))


def min_distances_to_mesh_brute(points, mesh: Mesh) -> np.ndarray:
    """Brute-force scan over every face; the oracle for the grid path."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    tri = mesh.positions[mesh.faces].reshape(-1, 9)
    out = np.empty(len(pts), dtype=np.float64)
    for s, (px, py, pz) in enumerate(pts):
        best = math.inf
        for row in tri:
            d = _scalar.point_triangle_dist_sq(
                px, py, pz, row[0], row[1], row[2], row[3], row[4], row[5],
                row[6], row[7], row[8])
            if d < best:
                best = d
        out[s] = math.sqrt(best)
    return out


def sampled_deviation(a: Mesh, b: Mesh, samples: int, seed: int,
                      symmetric: bool = False,
                      backend: str | None = None) -> DeviationReport:
    """Deviation report from `samples` surface points per direction.

    One-sided mode samples a and measures distance to b.  Symmetric mode
    additionally samples b against a (the B->A samples continue the same
    counter stream) and pools all distances for the mean and max.
    """
    if a.face_count == 0 or b.face_count == 0:
        raise ZeroAreaMeshError("deviation needs faces on both meshes")
    pts_ab = sample_surface(a, samples, seed, counter_base=0)
    d_ab = min_distances_to_mesh(pts_ab, b, backend=backend)
    if symmetric:
        pts_ba = sample_surface(b, samples, seed, counter_base=samples)
        d_ba = min_distances_to_mesh(pts_ba, a, backend=backend)
        pooled = np.concatenate([d_ab, d_ba])
        return DeviationReport(mean=float(pooled.sum() / len(pooled)),
                               max=float(pooled.max()),
                               samples=samples, seed=seed,
                               direction="symmetric")
    return DeviationReport(mean=float(d_ab.sum() / len(d_ab)),
                           max=float(d_ab.max()),
                           samples=samples, seed=seed, direction="A->B")
