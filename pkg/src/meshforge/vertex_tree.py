"""Binary contraction hierarchy over mesh vertices.

Leaves are the original vertices; each contraction record becomes one
internal node whose children are the two merged ids.  Nodes carry the
merge cost, an error radius bounding the distance to any descendant leaf,
and a normal cone bounding descendant face normals.  Original faces are
stored against leaf ids; any cut through the forest induces a mesh by
mapping each corner to its active ancestor (a face renders when its three
proxies are distinct).
"""

from __future__ import annotations

import json
import math
import struct
import zlib
from dataclasses import dataclass

import numpy as np

from . import _scalar
from .errors import (InconsistentLogError, TreeChecksumError,
                     TreeStructureError, TreeVersionError)
from .mesh import Mesh, cleanup

_MAGIC = b"VTREE\x00\x00\x01"
_VERSION = 1


@dataclass
class VertexNode:
    """Snapshot view of one tree node."""

    id: int
    position: np.ndarray
    children: tuple[int, int] | None
    parent: int | None
    cost: float
    error_radius: float
    cone_axis: np.ndarray
    cone_angle: float

    @property
    def is_leaf(self) -> bool:
        return self.children is None


class VertexTree:
    """Forest over vertex ids [0, node_count): leaves first, then one
    internal node per contraction record in log order."""

    def __init__(self, leaf_count: int, positions, costs, radii, cone_axes,
                 cone_angles, children, faces, validate: bool = True):
        self.leaf_count = int(leaf_count)
        self.positions = np.ascontiguousarray(positions, dtype=np.float64).reshape(-1, 3)
        self.costs = np.ascontiguousarray(costs, dtype=np.float64).reshape(-1)
        self.radii = np.ascontiguousarray(radii, dtype=np.float64).reshape(-1)
        self.cone_axes = np.ascontiguousarray(cone_axes, dtype=np.float64).reshape(-1, 3)
        self.cone_angles = np.ascontiguousarray(cone_angles, dtype=np.float64).reshape(-1)
        self.children = np.ascontiguousarray(children, dtype=np.int64).reshape(-1, 2)
        self.faces = np.ascontiguousarray(faces, dtype=np.int64).reshape(-1, 3)
        if validate:
            self._validate_structure()
        self._build_derived()

    # -- structure ---------------------------------------------------------

    @property
    def node_count(self) -> int:
        return self.positions.shape[0]

    @property
    def internal_count(self) -> int:
        return self.children.shape[0]

    def _validate_structure(self):
        n = self.node_count
        leaf = self.leaf_count
        if leaf < 0 or leaf > n:
            raise TreeStructureError("leaf count out of range")
        if self.internal_count != n - leaf:
            raise TreeStructureError("child table does not match internal count")
        if (self.costs.shape[0] != n or self.radii.shape[0] != n
                or self.cone_axes.shape[0] != n or self.cone_angles.shape[0] != n):
            raise TreeStructureError("attribute array length mismatch")
        seen_child = np.zeros(n, dtype=bool)
        for r in range(self.internal_count):
            nid = leaf + r
            a, b = int(self.children[r, 0]), int(self.children[r, 1])
            if not (0 <= a < nid and 0 <= b < nid) or a == b:
                raise TreeStructureError(
                    f"node {nid} has invalid children ({a}, {b})")
            if seen_child[a] or seen_child[b]:
                raise TreeStructureError("node claimed by two parents")
            seen_child[a] = True
            seen_child[b] = True
        if self.faces.size:
            if self.faces.min() < 0 or self.faces.max() >= leaf:
                raise TreeStructureError("face corner is not a leaf id")

    def _build_derived(self):
        n = self.node_count
        leaf = self.leaf_count
        parents = np.full(n, -1, dtype=np.int64)
        for r in range(self.internal_count):
            nid = leaf + r
            parents[self.children[r, 0]] = nid
            parents[self.children[r, 1]] = nid
        self.parents = parents
        self.roots = [int(v) for v in np.nonzero(parents == -1)[0]]
        # DFS leaf ordering: every node covers a contiguous slice of leaf_order
        leaf_order = np.empty(leaf, dtype=np.int64)
        span = np.zeros((n, 2), dtype=np.int64)
        cursor = 0
        for root in self.roots:
            stack = [(root, False)]
            while stack:
                node, done = stack.pop()
                if done:
                    if node >= leaf:
                        a, b = self.children[node - leaf]
                        span[node, 0] = span[a, 0]
                        span[node, 1] = span[b, 1]
                    continue
                if node < leaf:
                    leaf_order[cursor] = node
                    span[node] = (cursor, cursor + 1)
                    cursor += 1
                else:
                    a, b = self.children[node - leaf]
                    stack.append((node, True))
                    stack.append((int(b), False))
                    stack.append((int(a), False))
        if cursor != leaf:
            raise TreeStructureError("forest does not cover every leaf")
        self.leaf_order = leaf_order
        self.leaf_span = span

    def node(self, i: int) -> VertexNode:
        if not (0 <= i < self.node_count):
            raise IndexError(f"node id {i} out of range")
        children = None
        if i >= self.leaf_count:
            a, b = self.children[i - self.leaf_count]
            children = (int(a), int(b))
        parent = int(self.parents[i])
        return VertexNode(
            id=i,
            position=self.positions[i].copy(),
            children=children,
            parent=None if parent < 0 else parent,
            cost=float(self.costs[i]),
            error_radius=float(self.radii[i]),
            cone_axis=self.cone_axes[i].copy(),
            cone_angle=float(self.cone_angles[i]),
        )

    def descendant_leaves(self, i: int) -> np.ndarray:
        lo, hi = self.leaf_span[i]
        return self.leaf_order[lo:hi]


# -- normal cones -----------------------------------------------------------

def _merge_cones(ax1, a1, ax2, a2):
    """Smallest simple cone containing two cones (capped at pi)."""
    if a1 >= math.pi:
        return ax1, math.pi
    if a2 >= math.pi:
        return ax2, math.pi
    dot = float(np.clip(np.dot(ax1, ax2), -1.0, 1.0))
    omega = math.acos(dot)
    if omega + a2 <= a1:
        return ax1, a1
    if omega + a1 <= a2:
        return ax2, a2
    angle = 0.5 * (a1 + a2 + omega)
    if angle >= math.pi:
        return ax1, math.pi
    if omega < 1e-12:
        return ax1, max(a1, a2)
    t = angle - a1  # rotate ax1 toward ax2 by t along the great arc
    s = math.sin(omega)
    axis = (math.sin(omega - t) * ax1 + math.sin(t) * ax2) / s
    norm = float(np.linalg.norm(axis))
    if norm < 1e-12:
        return ax1, math.pi
    return axis / norm, angle


def _leaf_cones(mesh_positions, faces, leaf_count):
    axes = np.tile(np.array([0.0, 0.0, 1.0]), (leaf_count, 1))
    angles = np.full(leaf_count, math.pi, dtype=np.float64)
    normals_per_leaf: dict[int, list[np.ndarray]] = {}
    for a, b, c in faces.tolist():
        plane = _scalar.triangle_plane(
            mesh_positions[a, 0], mesh_positions[a, 1], mesh_positions[a, 2],
            mesh_positions[b, 0], mesh_positions[b, 1], mesh_positions[b, 2],
            mesh_positions[c, 0], mesh_positions[c, 1], mesh_positions[c, 2])
        if plane is None:
            continue
        normal = np.array(plane[:3], dtype=np.float64)
        for v in (a, b, c):
            normals_per_leaf.setdefault(v, []).append(normal)
    for v, normals in normals_per_leaf.items():
        if len(normals) == 1:
            axes[v] = normals[0]
            angles[v] = 0.0
            continue
        total = np.sum(normals, axis=0)
        norm = float(np.linalg.norm(total))
        if norm < 1e-12:
            continue  # spread normals: keep the full cone
        axis = total / norm
        worst = 0.0
        for nrm in normals:
            ang = math.acos(float(np.clip(np.dot(axis, nrm), -1.0, 1.0)))
            if ang > worst:
                worst = ang
        axes[v] = axis
        angles[v] = worst
    return axes, angles


# -- construction -----------------------------------------------------------

def build_tree(mesh: Mesh, records) -> VertexTree:
    """Build the hierarchy for a mesh and its contraction log.

    One leaf per original vertex, one internal node per record.  Error
    radii use the recursive child-radius-plus-displacement bound; cones
    merge the children's normal cones (leaf cones cover incident face
    normals).  Raises InconsistentLogError when the log does not replay.
    """
    base = cleanup(mesh)
    leaf = mesh.vertex_count
    total = leaf + len(records)
    positions = np.zeros((total, 3), dtype=np.float64)
    positions[:leaf] = mesh.positions
    costs = np.zeros(total, dtype=np.float64)
    radii = np.zeros(total, dtype=np.float64)
    children = np.zeros((len(records), 2), dtype=np.int64)
    alive = np.zeros(total, dtype=bool)
    alive[:leaf] = True
    for r, rec in enumerate(records):
        nid = leaf + r
        if rec.created != nid:
            raise InconsistentLogError(
                f"record {r} creates id {rec.created}, expected {nid}")
        a, b = rec.removed_a, rec.removed_b
        if a == b:
            raise InconsistentLogError(f"record {r} merges id {a} with itself")
        for v in (a, b):
            if not (0 <= v < nid) or not alive[v]:
                raise InconsistentLogError(
                    f"record {r} references dead/unknown id {v}")
        alive[a] = False
        alive[b] = False
        alive[nid] = True
        children[r] = (a, b)
        positions[nid] = rec.position
        costs[nid] = rec.cost

    cone_axes, cone_angles = _leaf_cones(mesh.positions, base.faces, leaf)
    cone_axes = np.concatenate(
        [cone_axes, np.zeros((len(records), 3), dtype=np.float64)], axis=0)
    cone_angles = np.concatenate(
        [cone_angles, np.zeros(len(records), dtype=np.float64)])
    for r in range(len(records)):
        nid = leaf + r
        a, b = children[r]
        da = positions[nid] - positions[a]
        db = positions[nid] - positions[b]
        ra = radii[a] + float(np.sqrt(da @ da))
        rb = radii[b] + float(np.sqrt(db @ db))
        radii[nid] = ra if ra > rb else rb
        axis, angle = _merge_cones(cone_axes[a], float(cone_angles[a]),
                                   cone_axes[b], float(cone_angles[b]))
        cone_axes[nid] = axis
        cone_angles[nid] = angle

    return VertexTree(leaf, positions, costs, radii, cone_axes, cone_angles,
                      children, base.faces, validate=False)


def full_resolution(tree: VertexTree) -> Mesh:
    """Mesh with every leaf active: exactly cleanup(original)."""
    return Mesh(tree.positions[:tree.leaf_count].copy(), tree.faces.copy(),
                validate=False)


def _front_mesh(tree: VertexTree, active_ids: list[int]) -> Mesh:
    """Compact the proxy-mapped face set of a front into a mesh.

    Faces keep their original order (first occurrence wins on duplicate
    proxy triples); vertices are the active nodes in ascending id order.
    """
    active_sorted = sorted(active_ids)
    index = {nid: i for i, nid in enumerate(active_sorted)}
    proxy = np.empty(tree.leaf_count, dtype=np.int64)
    for nid in active_sorted:
        lo, hi = tree.leaf_span[nid]
        proxy[tree.leaf_order[lo:hi]] = nid
    faces = []
    seen = set()
    for a, b, c in tree.faces.tolist():
        pa, pb, pc = int(proxy[a]), int(proxy[b]), int(proxy[c])
        if pa == pb or pb == pc or pa == pc:
            continue
        key = tuple(sorted((pa, pb, pc)))
        if key in seen:
            continue
        seen.add(key)
        faces.append((index[pa], index[pb], index[pc]))
    positions = tree.positions[np.array(active_sorted, dtype=np.int64)] \
        if active_sorted else np.zeros((0, 3))
    return Mesh(positions, faces, validate=False)


def extract_at_error(tree: VertexTree, epsilon: float) -> Mesh:
    """Coarsest front whose active nodes all have merge cost <= epsilon.

    A node is active when its cost is within budget and every proper
    ancestor's cost exceeds it; leaves (cost 0) always qualify, so the
    descent terminates.
    """
    if not (epsilon >= 0.0):
        raise ValueError("epsilon must be >= 0")
    active: list[int] = []
    leaf = tree.leaf_count
    for root in tree.roots:
        stack = [root]
        while stack:
            node = stack.pop()
            if tree.costs[node] <= epsilon:
                active.append(node)
            else:
                a, b = tree.children[node - leaf]
                stack.append(int(b))
                stack.append(int(a))
    return _front_mesh(tree, active)


# -- serialization ----------------------------------------------------------

def _bbox_of(tree: VertexTree) -> list[list[float]]:
    if tree.leaf_count == 0:
        return [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
    leaves = tree.positions[:tree.leaf_count]
    return [[float(v) for v in leaves.min(axis=0)],
            [float(v) for v in leaves.max(axis=0)]]


def save_tree(tree: VertexTree) -> bytes:
    """VTREE v1: magic, length-prefixed JSON header, little-endian arrays,
    trailing CRC32 of everything before it."""
    header = json.dumps({
        "leaf_count": tree.leaf_count,
        "node_count": tree.node_count,
        "face_count": int(tree.faces.shape[0]),
        "bbox": _bbox_of(tree),
    }, separators=(",", ":")).encode("utf-8")
    parts = [_MAGIC, struct.pack("<I", len(header)), header]
    parts.append(tree.positions.astype("<f8").tobytes())
    parts.append(tree.costs.astype("<f8").tobytes())
    parts.append(tree.radii.astype("<f8").tobytes())
    cones = np.concatenate([tree.cone_axes,
                            tree.cone_angles.reshape(-1, 1)], axis=1)
    parts.append(cones.astype("<f8").tobytes())
    parts.append(tree.children.astype("<u4").tobytes())
    parts.append(tree.faces.astype("<u4").tobytes())
    payload = b"".join(parts)
    return payload + struct.pack("<I", zlib.crc32(payload) & 0xFFFFFFFF)


def load_tree(data: bytes) -> VertexTree:
    """Inverse of save_tree; validates version, checksum, and structure."""
    if len(data) < 12:
        raise TreeChecksumError("stream truncated")
    if data[:7] != _MAGIC[:7]:
        raise TreeStructureError("not a VTREE stream")
    if data[7] != _VERSION:
        raise TreeVersionError(f"unsupported version {data[7]}")
    stored_crc = struct.unpack("<I", data[-4:])[0]
    if zlib.crc32(data[:-4]) & 0xFFFFFFFF != stored_crc:
        raise TreeChecksumError("checksum mismatch (truncated or corrupt)")
    try:
        hlen = struct.unpack("<I", data[8:12])[0]
        header = json.loads(data[12:12 + hlen].decode("utf-8"))
        leaf = int(header["leaf_count"])
        n = int(header["node_count"])
        nfaces = int(header["face_count"])
        off = 12 + hlen
        internal = n - leaf

        def take(count, dtype, width):
            nonlocal off
            nbytes = count * width
            if off + nbytes > len(data) - 4:
                raise TreeChecksumError("stream truncated")
            arr = np.frombuffer(data[off:off + nbytes], dtype=dtype)
            off += nbytes
            return arr

        positions = take(n * 3, "<f8", 8).reshape(-1, 3)
        costs = take(n, "<f8", 8)
        radii = take(n, "<f8", 8)
        cones = take(n * 4, "<f8", 8).reshape(-1, 4)
        children = take(internal * 2, "<u4", 4).astype(np.int64).reshape(-1, 2)
        faces = take(nfaces * 3, "<u4", 4).astype(np.int64).reshape(-1, 3)
        if off != len(data) - 4:
            raise TreeStructureError("trailing bytes after face table")
    except (KeyError, ValueError, struct.error, UnicodeDecodeError) as exc:
        raise TreeStructureError(f"malformed header: {exc}") from None
    return VertexTree(leaf, positions, costs, radii, cones[:, :3],
                      cones[:, 3], children, faces, validate=True)


def tree_to_json(tree: VertexTree) -> dict:
    """The viewer export: the VTREE content as one JSON document."""
    cones = np.concatenate([tree.cone_axes,
                            tree.cone_angles.reshape(-1, 1)], axis=1)
    return {
        "format": "vtree",
        "version": _VERSION,
        "leaf_count": tree.leaf_count,
        "node_count": tree.node_count,
        "face_count": int(tree.faces.shape[0]),
        "bbox": _bbox_of(tree),
        "positions": [float(v) for v in tree.positions.ravel()],
        "costs": [float(v) for v in tree.costs],
        "radii": [float(v) for v in tree.radii],
        "cones": [float(v) for v in cones.ravel()],
        "children": [int(v) for v in tree.children.ravel()],
        "faces": [int(v) for v in tree.faces.ravel()],
    }
