"""Per-frame refinement of an active front under a screen-space criterion.

The active front is a cut through the vertex forest: every leaf has exactly
one active ancestor-or-self.  Each adapt pass examines the current active
set once, splits nodes whose projected error radius exceeds the pixel
threshold (a tighter threshold applies on silhouettes), and merges sibling
pairs whose parent projects below the hysteresis fraction of its threshold.
Nodes created by a pass are re-examined on later frames, which bounds the
work per frame; thresholds drive the front to a fixpoint over frames.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import _scalar
from .vertex_tree import VertexNode, VertexTree


def _normalized(v, name):
    arr = np.asarray(v, dtype=np.float64).reshape(3)
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"{name} must be a unit vector (|{name}| = {norm})")
    return arr


@dataclass(frozen=True)
class Camera:
    """Perspective pinhole camera; forward/up must be orthonormal."""

    eye: tuple[float, float, float]
    forward: tuple[float, float, float]
    up: tuple[float, float, float]
    fov_y: float
    viewport_height: float
    near: float = 1e-3

    def __post_init__(self):
        fwd = _normalized(self.forward, "forward")
        up = _normalized(self.up, "up")
        if abs(float(fwd @ up)) > 1e-9:
            raise ValueError("forward and up must be orthogonal")
        if not (0.0 < self.fov_y < math.pi):
            raise ValueError("fov_y must lie in (0, pi)")
        if not (self.viewport_height > 0):
            raise ValueError("viewport_height must be positive")
        if not (self.near > 0):
            raise ValueError("near must be positive")
        object.__setattr__(self, "eye", tuple(float(c) for c in self.eye))
        object.__setattr__(self, "forward", tuple(float(c) for c in fwd))
        object.__setattr__(self, "up", tuple(float(c) for c in up))

    @classmethod
    def look_at(cls, eye, target, up=(0.0, 1.0, 0.0), fov_y=math.pi / 3,
                viewport_height=1080.0, near=1e-3) -> "Camera":
        eye = np.asarray(eye, dtype=np.float64)
        fwd = np.asarray(target, dtype=np.float64) - eye
        norm = float(np.linalg.norm(fwd))
        if norm <= 0:
            raise ValueError("eye and target coincide")
        fwd = fwd / norm
        upv = np.asarray(up, dtype=np.float64)
        upv = upv - float(upv @ fwd) * fwd
        norm = float(np.linalg.norm(upv))
        if norm <= 0:
            raise ValueError("up is parallel to the view direction")
        upv = upv / norm
        return cls(tuple(eye), tuple(fwd), tuple(upv), float(fov_y),
                   float(viewport_height), float(near))


@dataclass
class AdaptParams:
    """Pixel thresholds for the split/merge decisions.

    tau_silhouette defaults to tau and must not exceed it; hysteresis in
    [0, 1) scales the merge threshold below the split threshold so fronts
    do not oscillate.  max_ops_per_frame (None = unlimited) defers the
    lowest-error candidates to later frames.
    """

    tau: float
    tau_silhouette: float | None = None
    hysteresis: float = 0.0
    max_ops_per_frame: int | None = None

    def __post_init__(self):
        if self.tau_silhouette is None:
            self.tau_silhouette = self.tau
        if not (self.tau >= 0.0):
            raise ValueError("tau must be >= 0")
        if not (0.0 <= self.tau_silhouette <= self.tau):
            raise ValueError("tau_silhouette must lie in [0, tau]")
        if not (0.0 <= self.hysteresis < 1.0):
            raise ValueError("hysteresis must lie in [0, 1)")
        if self.max_ops_per_frame is not None and self.max_ops_per_frame < 0:
            raise ValueError("max_ops_per_frame must be >= 0")


class ActiveFront:
    """A valid cut through the forest plus the leaf -> active proxy map."""

    __slots__ = ("active", "proxy", "frame", "last_splits", "last_merges")

    def __init__(self, active: set[int], proxy: np.ndarray, frame: int = 0,
                 last_splits: int = 0, last_merges: int = 0):
        self.active = active
        self.proxy = proxy
        self.frame = frame
        self.last_splits = last_splits
        self.last_merges = last_merges

    @classmethod
    def roots_only(cls, tree: VertexTree) -> "ActiveFront":
        active = set(tree.roots)
        proxy = np.empty(tree.leaf_count, dtype=np.int64)
        for nid in tree.roots:
            lo, hi = tree.leaf_span[nid]
            proxy[tree.leaf_order[lo:hi]] = nid
        return cls(active, proxy)

    @classmethod
    def all_leaves(cls, tree: VertexTree) -> "ActiveFront":
        return cls(set(range(tree.leaf_count)),
                   np.arange(tree.leaf_count, dtype=np.int64))

    def copy(self) -> "ActiveFront":
        return ActiveFront(set(self.active), self.proxy.copy(), self.frame,
                           self.last_splits, self.last_merges)

    def validate(self, tree: VertexTree) -> None:
        """Exhaustive cut-validity check (test support): every leaf has
        exactly one active ancestor-or-self, consistent with the proxy map."""
        for leaf in range(tree.leaf_count):
            node = leaf
            hits = []
            while node != -1:
                if node in self.active:
                    hits.append(node)
                node = int(tree.parents[node])
            if len(hits) != 1:
                raise AssertionError(
                    f"leaf {leaf} has {len(hits)} active ancestors")
            if hits[0] != int(self.proxy[leaf]):
                raise AssertionError(f"leaf {leaf} proxy mismatch")


def screen_space_error(node: VertexNode, cam: Camera) -> float:
    """Pixels subtended by the node's error sphere; +inf when the sphere
    reaches the near region; 0 for zero radius."""
    p = node.position
    return _scalar.sphere_screen_error(
        float(p[0]), float(p[1]), float(p[2]), float(node.error_radius),
        cam.eye[0], cam.eye[1], cam.eye[2],
        cam.forward[0], cam.forward[1], cam.forward[2],
        cam.fov_y, cam.viewport_height, cam.near)


def is_silhouette(node: VertexNode, cam: Camera) -> bool:
    """True when the node's normal cone straddles directions perpendicular
    to the view ray (always true for a full cone)."""
    angle = float(node.cone_angle)
    if angle >= math.pi:
        return True
    p = node.position
    wx = float(p[0]) - cam.eye[0]
    wy = float(p[1]) - cam.eye[1]
    wz = float(p[2]) - cam.eye[2]
    norm = math.sqrt(wx * wx + wy * wy + wz * wz)
    if norm <= 0.0:
        return True
    axis = node.cone_axis
    dot = (float(axis[0]) * wx + float(axis[1]) * wy + float(axis[2]) * wz) / norm
    dot = min(1.0, max(-1.0, dot))
    theta = math.acos(dot)
    return abs(theta - math.pi / 2.0) <= angle


def _node_error(tree: VertexTree, nid: int, cam: Camera) -> float:
    p = tree.positions[nid]
    return _scalar.sphere_screen_error(
        p[0], p[1], p[2], tree.radii[nid],
        cam.eye[0], cam.eye[1], cam.eye[2],
        cam.forward[0], cam.forward[1], cam.forward[2],
        cam.fov_y, cam.viewport_height, cam.near)


def _node_tau(tree: VertexTree, nid: int, cam: Camera, params: AdaptParams) -> float:
    return params.tau_silhouette if is_silhouette(tree.node(nid), cam) else params.tau


def adapt(front: ActiveFront, tree: VertexTree, cam: Camera,
          params: AdaptParams) -> ActiveFront:
    """One adaptation pass; returns a new front (input left untouched).

    Decisions are taken against a snapshot of the active set in ascending
    id order; they are applied most-urgent-first (largest screen error)
    so a max_ops_per_frame budget defers the least pressing work.
    """
    leaf = tree.leaf_count
    split_ops: list[tuple[float, int]] = []
    merge_ops: list[tuple[float, int]] = []
    merge_seen: set[int] = set()
    for nid in sorted(front.active):
        if nid >= leaf:
            err = _node_error(tree, nid, cam)
            tau_n = _node_tau(tree, nid, cam, params)
            if err > tau_n:
                split_ops.append((err, nid))
        parent = int(tree.parents[nid])
        if parent >= 0 and parent not in merge_seen:
            a, b = tree.children[parent - leaf]
            if int(a) in front.active and int(b) in front.active:
                merge_seen.add(parent)
                tau_p = _node_tau(tree, parent, cam, params)
                if math.isinf(tau_p):
                    merge_ops.append((_node_error(tree, parent, cam), parent))
                else:
                    threshold = params.hysteresis * tau_p
                    perr = _node_error(tree, parent, cam)
                    if perr < threshold:
                        merge_ops.append((perr, parent))

    ops = ([(err, 0, nid) for err, nid in split_ops]
           + [(err, 1, nid) for err, nid in merge_ops])
    ops.sort(key=lambda op: (-op[0], op[1], op[2]))
    if params.max_ops_per_frame is not None:
        ops = ops[:params.max_ops_per_frame]

    out = front.copy()
    splits = 0
    merges = 0
    for _, kind, nid in ops:
        if kind == 0:
            if nid not in out.active:
                continue
            a, b = (int(v) for v in tree.children[nid - leaf])
            out.active.remove(nid)
            out.active.add(a)
            out.active.add(b)
            for child in (a, b):
                lo, hi = tree.leaf_span[child]
                out.proxy[tree.leaf_order[lo:hi]] = child
            splits += 1
        else:
            a, b = (int(v) for v in tree.children[nid - leaf])
            if a not in out.active or b not in out.active:
                continue
            out.active.remove(a)
            out.active.remove(b)
            out.active.add(nid)
            lo, hi = tree.leaf_span[nid]
            out.proxy[tree.leaf_order[lo:hi]] = nid
            merges += 1
    out.frame = front.frame + 1
    out.last_splits = splits
    out.last_merges = merges
    return out


def render_set(front: ActiveFront, tree: VertexTree) -> list[tuple[int, int, int]]:
    """Proxy-mapped faces with three distinct corners, deduplicated by
    unordered id triple, in sorted order."""
    proxy = front.proxy
    out: dict[tuple[int, int, int], tuple[int, int, int]] = {}
    for a, b, c in tree.faces.tolist():
        pa, pb, pc = int(proxy[a]), int(proxy[b]), int(proxy[c])
        if pa == pb or pb == pc or pa == pc:
            continue
        key = tuple(sorted((pa, pb, pc)))
        if key not in out:
            out[key] = (pa, pb, pc)
    return [out[key] for key in sorted(out)]


@dataclass
class FrameStats:
    frame: int
    active: int
    triangles: int
    splits: int
    merges: int
    max_err_px: float

    def csv_row(self) -> str:
        err = "inf" if math.isinf(self.max_err_px) else repr(float(self.max_err_px))
        return (f"{self.frame},{self.active},{self.triangles},"
                f"{self.splits},{self.merges},{err}")


FLYTHROUGH_CSV_HEADER = "frame,active,triangles,splits,merges,max_err_px"


def flythrough(tree: VertexTree, camera_path, params: AdaptParams,
               initial: ActiveFront | None = None
               ) -> tuple[list[FrameStats], ActiveFront]:
    """Run one adapt per path entry, starting from the roots-only front.

    camera_path is a sequence of (time, Camera); times are carried for
    context only.  Returns per-frame stats and the final front.
    """
    if not camera_path:
        raise ValueError("camera path is empty")
    front = initial.copy() if initial is not None else ActiveFront.roots_only(tree)
    stats: list[FrameStats] = []
    leaf = tree.leaf_count
    for frame, (_, cam) in enumerate(camera_path):
        front = adapt(front, tree, cam, params)
        max_err = 0.0
        for nid in front.active:
            if nid >= leaf:
                err = _node_error(tree, nid, cam)
                if err > max_err:
                    max_err = float(err)
        stats.append(FrameStats(
            frame=frame,
            active=len(front.active),
            triangles=len(render_set(front, tree)),
            splits=front.last_splits,
            merges=front.last_merges,
            max_err_px=max_err,
        ))
    return stats, front


def screen_error_dump(tree: VertexTree, cam: Camera) -> list[float]:
    """Per-node screen errors at one pose (viewer parity support)."""
    return [float(_node_error(tree, nid, cam)) for nid in range(tree.node_count)]


def load_camera_path(text: str) -> list[tuple[float, Camera]]:
    """Parse the camera-path JSON: an array of
    {t, eye:[3], forward:[3], up:[3], fov_y, viewport_height[, near]}."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"camera path is not valid JSON: {exc}") from None
    if not isinstance(doc, list) or not doc:
        raise ValueError("camera path must be a non-empty JSON array")
    path = []
    for i, entry in enumerate(doc):
        try:
            cam = Camera(
                eye=tuple(float(v) for v in entry["eye"]),
                forward=tuple(float(v) for v in entry["forward"]),
                up=tuple(float(v) for v in entry["up"]),
                fov_y=float(entry["fov_y"]),
                viewport_height=float(entry["viewport_height"]),
                near=float(entry.get("near", 1e-3)),
            )
            path.append((float(entry.get("t", i)), cam))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"camera path entry {i} is invalid: {exc}") from None
    return path


def camera_path_to_json(path) -> str:
    entries = []
    for t, cam in path:
        entries.append({
            "t": t, "eye": list(cam.eye), "forward": list(cam.forward),
            "up": list(cam.up), "fov_y": cam.fov_y,
            "viewport_height": cam.viewport_height, "near": cam.near,
        })
    return json.dumps(entries, indent=1)
