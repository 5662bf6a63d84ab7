"""Candidate-pair selection and greedy min-cost pair contraction.

The driver keeps a lazy-deletion priority queue of candidate pairs.  Each
entry snapshots the generation counters of its endpoints; contracting a
pair bumps the generations of the new vertex's mesh neighbors, so entries
whose stamps no longer match are re-costed and re-queued when popped.
Entries with a dead endpoint are dropped outright.  Created vertices get
fresh ids (never reused), so the contraction log doubles as the node set
of the detail hierarchy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _scalar
from ._backend import get_impl
from .errors import DeadVertexError, InconsistentLogError, PairExplosionError
from .mesh import Adjacency, Mesh, cleanup
from .quadric import vertex_quadrics_all

import math

PLACEMENT_POLICIES = {
    "optimal": _scalar.POLICY_OPTIMAL,
    "midpoint-fallback-only": _scalar.POLICY_MIDPOINT_FALLBACK,
    "subset-only": _scalar.POLICY_SUBSET_ONLY,
}


class CandidatePair(NamedTuple):
    """Heap entry: cost-ordered, ties broken by (i, j).

    stamp_i/stamp_j are the endpoint generations captured when the cost was
    computed; the pair is stale once either endpoint's generation moved on.
    """

    cost: float
    i: int
    j: int
    stamp_i: int
    stamp_j: int
    target: tuple[float, float, float]


@dataclass(frozen=True)
class ContractionRecord:
    """One merge event, replayable forward (and reversible by walking backward)."""

    removed_a: int
    removed_b: int
    created: int
    position: tuple[float, float, float]
    cost: float
    faces_removed: tuple[int, ...] = ()
    was_edge: bool = False

    def to_line(self) -> str:
        x, y, z = self.position
        return (f"C {self.removed_a} {self.removed_b} {self.created} "
                f"{x!r} {y!r} {z!r} {self.cost!r}")

    @classmethod
    def from_line(cls, line: str) -> "ContractionRecord":
        parts = line.split()
        if len(parts) != 8 or parts[0] != "C":
            raise InconsistentLogError(f"malformed log line: {line!r}")
        try:
            a, b, k = int(parts[1]), int(parts[2]), int(parts[3])
            x, y, z = float(parts[4]), float(parts[5]), float(parts[6])
            cost = float(parts[7])
        except ValueError:
            raise InconsistentLogError(f"malformed log line: {line!r}") from None
        return cls(a, b, k, (x, y, z), cost)


def log_to_text(records: list[ContractionRecord]) -> str:
    return "".join(r.to_line() + "\n" for r in records)


def log_from_text(text: str) -> list[ContractionRecord]:
    """Parse a contraction log.  faces_removed/was_edge are not stored in
    the text format; replaying the log reconstructs them."""
    records = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        records.append(ContractionRecord.from_line(line))
    return records


@dataclass
class SimplifyConfig:
    target_faces: int
    pair_threshold: float = 0.0
    placement_policy: str = "optimal"

    def __post_init__(self):
        if self.target_faces < 0:
            raise ValueError("target_faces must be >= 0")
        if not (self.pair_threshold >= 0.0):
            raise ValueError("pair_threshold must be >= 0")
        if self.placement_policy not in PLACEMENT_POLICIES:
            raise ValueError(f"unknown placement policy {self.placement_policy!r}")


@dataclass
class SimplifyResult:
    mesh: Mesh
    records: list[ContractionRecord]
    reached_target: bool

    @property
    def total_cost(self) -> float:
        total = 0.0
        for r in self.records:
            total += r.cost
        return total


def select_pairs(mesh: Mesh, adj: Adjacency, threshold: float) -> list[tuple[int, int]]:
    """Every mesh edge, plus every non-edge pair closer than `threshold`.

    threshold = 0 disables non-edge pairs.  Non-edge search uses a uniform
    grid of cell size `threshold`; when the non-edge pair count exceeds
    16x the vertex count a PairExplosionError signals that the threshold is
    too large for the model scale.  Result is deduplicated, (i < j), sorted.
    """
    if not (threshold >= 0.0):
        raise ValueError("threshold must be >= 0")
    pairs: set[tuple[int, int]] = set(adj.edges)
    n = mesh.vertex_count
    if threshold > 0.0 and n > 1:
        cap = 16 * n
        count = 0
        pos = mesh.positions
        if math.isinf(threshold):
            for i in range(n):
                for j in range(i + 1, n):
                    if (i, j) in pairs:
                        continue
                    count += 1
                    if count > cap:
                        raise PairExplosionError(
                            f"{count} non-edge pairs exceeds cap {cap}")
                    pairs.add((i, j))
        else:
            inv = 1.0 / threshold
            cells: dict[tuple[int, int, int], list[int]] = {}
            keys = np.floor(pos * inv).astype(np.int64)
            keys_l = [tuple(k) for k in keys.tolist()]
            t2 = threshold * threshold
            for i in range(n):
                kx, ky, kz = keys_l[i]
                for dx in (-1, 0, 1):
                    for dy in (-1, 0, 1):
                        for dz in (-1, 0, 1):
                            bucket = cells.get((kx + dx, ky + dy, kz + dz))
                            if not bucket:
                                continue
                            for j in bucket:
                                lo, hi = (j, i) if j < i else (i, j)
                                if (lo, hi) in pairs:
                                    continue
                                d = pos[i] - pos[j]
                                if float(d @ d) < t2:
                                    count += 1
                                    if count > cap:
                                        raise PairExplosionError(
                                            f"over {cap} non-edge pairs; "
                                            f"threshold {threshold} too large")
                                    pairs.add((lo, hi))
                cells.setdefault((kx, ky, kz), []).append(i)
    return sorted(pairs)


class SimplifyState:
    """Mutable contraction state: grown vertex table, rewritten face table.

    This is the readable reference implementation used for log replay and
    for single contractions; the batch backends mirror its semantics on
    flat arrays.
    """

    def __init__(self, positions, faces, quadrics):
        self.positions: list[tuple[float, float, float]] = [
            tuple(p) for p in positions]
        self.quadrics: list[tuple[float, ...]] = [tuple(q) for q in quadrics]
        self.faces: list[list[int]] = [list(f) for f in faces]
        self.alive: list[bool] = [True] * len(self.positions)
        self.generation: list[int] = [0] * len(self.positions)
        self.face_alive: list[bool] = [True] * len(self.faces)
        self.live_face_count: int = len(self.faces)
        self.incident: list[set[int]] = [set() for _ in self.positions]
        for f, corners in enumerate(self.faces):
            for v in set(corners):
                self.incident[v].add(f)

    @classmethod
    def from_mesh(cls, mesh: Mesh) -> "SimplifyState":
        base = cleanup(mesh)
        quadrics = vertex_quadrics_all(base)
        return cls(base.positions, base.faces.tolist(), quadrics)

    def contract(self, i: int, j: int, position, cost: float = 0.0) -> ContractionRecord:
        """Merge vertices i and j into a fresh vertex at `position`.

        Every face reference to i or j is rewritten to the new id; faces
        left with fewer than 3 distinct corners are retired.  The new
        vertex's quadric is the sum of its children's, and the generation
        counters of its mesh neighbors are bumped.
        """
        if i == j:
            raise ValueError("cannot contract a vertex with itself")
        for v in (i, j):
            if v >= len(self.alive) or not self.alive[v]:
                raise DeadVertexError(f"vertex {v} is not alive")
        k = len(self.positions)
        px, py, pz = (float(c) for c in position)
        self.positions.append((px, py, pz))
        qi = self.quadrics[i]
        qj = self.quadrics[j]
        self.quadrics.append(tuple(qi[t] + qj[t] for t in range(10)))
        self.alive.append(True)
        self.generation.append(0)
        self.incident.append(set())

        touched = self.incident[i] | self.incident[j]
        removed: list[int] = []
        was_edge = False
        for f in sorted(touched):
            corners = self.faces[f]
            has_i = i in corners
            has_j = j in corners
            if has_i and has_j:
                was_edge = True
            corners = [k if (c == i or c == j) else c for c in corners]
            self.faces[f] = corners
            if len(set(corners)) < 3:
                self.face_alive[f] = False
                self.live_face_count -= 1
                removed.append(f)
                for c in set(corners):
                    if c != k:
                        self.incident[c].discard(f)
            else:
                self.incident[k].add(f)
        self.incident[i] = set()
        self.incident[j] = set()
        neighbors = set()
        for f in self.incident[k]:
            neighbors.update(self.faces[f])
        neighbors.discard(k)
        for v in neighbors:
            self.generation[v] += 1
        self.alive[i] = False
        self.alive[j] = False
        return ContractionRecord(i, j, k, (px, py, pz), float(cost),
                                 tuple(removed), was_edge)

    def extract_mesh(self) -> Mesh:
        """Compacted mesh of live vertices and live faces (original order)."""
        remap: dict[int, int] = {}
        positions = []
        for v, ok in enumerate(self.alive):
            if ok:
                remap[v] = len(positions)
                positions.append(self.positions[v])
        faces = [[remap[c] for c in corners]
                 for f, corners in enumerate(self.faces) if self.face_alive[f]]
        return Mesh(np.array(positions, dtype=np.float64).reshape(-1, 3),
                    faces, validate=False)


def replay_log(mesh: Mesh, records) -> tuple[Mesh, list[ContractionRecord]]:
    """Re-apply a contraction log to a mesh.

    Returns the resulting compacted mesh and fully populated records
    (faces_removed and was_edge reconstructed).  Raises
    InconsistentLogError when a record references an unknown or dead id or
    breaks the fresh-id discipline.
    """
    state = SimplifyState.from_mesh(mesh)
    out: list[ContractionRecord] = []
    for r in records:
        if r.created != len(state.positions):
            raise InconsistentLogError(
                f"record creates id {r.created}, expected {len(state.positions)}")
        if r.removed_a == r.removed_b:
            raise InconsistentLogError(
                f"record merges id {r.removed_a} with itself")
        for v in (r.removed_a, r.removed_b):
            if v >= len(state.alive) or not state.alive[v]:
                raise InconsistentLogError(f"record references dead/unknown id {v}")
        out.append(state.contract(r.removed_a, r.removed_b, r.position, r.cost))
    return state.extract_mesh(), out


def simplify(mesh: Mesh, config: SimplifyConfig, backend: str | None = None) -> SimplifyResult:
    """Greedy min-cost contraction down to a target face count.

    Deterministic: cost ties break on (smaller i, then smaller j).  When
    candidate pairs run out above the target the best achieved mesh is
    returned with reached_target False.  `backend` forces the compiled or
    pure-Python loop (default: compiled when available).
    """
    base = cleanup(mesh)
    if config.target_faces >= base.face_count:
        return SimplifyResult(base, [], True)
    adj = Adjacency(base)
    quadrics = vertex_quadrics_all(base, adj)
    pairs = select_pairs(base, adj, config.pair_threshold)
    if not pairs:
        return SimplifyResult(base, [], base.face_count <= config.target_faces)
    impl = get_impl(backend)
    out = impl.simplify_loop(
        np.ascontiguousarray(base.positions, dtype=np.float64),
        np.ascontiguousarray(base.faces, dtype=np.int64),
        np.ascontiguousarray(quadrics, dtype=np.float64),
        np.ascontiguousarray(np.array(pairs, dtype=np.int64).reshape(-1, 2)),
        int(config.target_faces),
        PLACEMENT_POLICIES[config.placement_policy],
    )
    n0 = base.vertex_count
    rec_a = out["rec_a"]
    rec_b = out["rec_b"]
    rec_cost = out["rec_cost"]
    rec_pos = out["rec_pos"]
    rec_was_edge = out["rec_was_edge"]
    removed_flat = out["removed_flat"]
    removed_off = out["removed_off"]
    records = []
    for r in range(len(rec_a)):
        removed = tuple(int(f) for f in
                        removed_flat[removed_off[r]:removed_off[r + 1]])
        records.append(ContractionRecord(
            int(rec_a[r]), int(rec_b[r]), n0 + r,
            (float(rec_pos[r, 0]), float(rec_pos[r, 1]), float(rec_pos[r, 2])),
            float(rec_cost[r]), removed, bool(rec_was_edge[r])))

    alive = np.ones(n0 + len(records), dtype=bool)
    alive[rec_a] = False
    alive[rec_b] = False
    all_positions = np.concatenate(
        [base.positions, np.asarray(rec_pos, dtype=np.float64).reshape(-1, 3)],
        axis=0)
    remap = np.full(len(alive), -1, dtype=np.int64)
    remap[alive] = np.arange(int(alive.sum()))
    final_faces = np.asarray(out["faces"], dtype=np.int64)
    face_alive = np.asarray(out["face_alive"], dtype=bool)
    faces = remap[final_faces[face_alive]]
    result_mesh = Mesh(all_positions[alive], faces, validate=False)
    return SimplifyResult(result_mesh, records, bool(out["reached"]))
