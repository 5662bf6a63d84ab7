// Active-front adaptation: the same formulas and decision rules as the
// batch tool, so per-node screen errors agree with its debug dumps.

import { TreeData } from "./vtree.js";

export interface CameraPose {
  eye: [number, number, number];
  forward: [number, number, number]; // unit
  up: [number, number, number]; // unit, orthogonal to forward
  fovY: number; // radians
  viewportHeight: number; // pixels
  near: number;
}

export interface AdaptParams {
  tau: number; // split threshold, pixels
  tauSilhouette: number; // <= tau
  hysteresis: number; // in [0, 1)
  maxOpsPerFrame: number | null;
}

// err = radius * viewport / (2 tan(fovY/2) * depth); +inf once the error
// sphere reaches the near region; exactly 0 for zero radius.
export function screenSpaceError(tree: TreeData, nid: number, cam: CameraPose): number {
  const radius = tree.radii[nid];
  if (radius <= 0.0) return 0.0;
  const px = tree.positions[3 * nid];
  const py = tree.positions[3 * nid + 1];
  const pz = tree.positions[3 * nid + 2];
  const depth = (px - cam.eye[0]) * cam.forward[0]
    + (py - cam.eye[1]) * cam.forward[1]
    + (pz - cam.eye[2]) * cam.forward[2];
  if (depth - radius <= cam.near) return Infinity;
  const d = depth > cam.near ? depth : cam.near;
  return radius * cam.viewportHeight / (2.0 * Math.tan(0.5 * cam.fovY) * d);
}

// true when the normal cone straddles directions perpendicular to the view ray
export function isSilhouette(tree: TreeData, nid: number, cam: CameraPose): boolean {
  const angle = tree.cones[4 * nid + 3];
  if (angle >= Math.PI) return true;
  const wx = tree.positions[3 * nid] - cam.eye[0];
  const wy = tree.positions[3 * nid + 1] - cam.eye[1];
  const wz = tree.positions[3 * nid + 2] - cam.eye[2];
  const norm = Math.sqrt(wx * wx + wy * wy + wz * wz);
  if (norm <= 0.0) return true;
  let dot = (tree.cones[4 * nid] * wx + tree.cones[4 * nid + 1] * wy
    + tree.cones[4 * nid + 2] * wz) / norm;
  if (dot > 1.0) dot = 1.0;
  else if (dot < -1.0) dot = -1.0;
  const theta = Math.acos(dot);
  return Math.abs(theta - Math.PI / 2.0) <= angle;
}

export class ActiveFront {
  active: Set<number>;
  proxy: Int32Array;
  frame = 0;
  lastSplits = 0;
  lastMerges = 0;

  constructor(active: Set<number>, proxy: Int32Array) {
    this.active = active;
    this.proxy = proxy;
  }

  static rootsOnly(tree: TreeData): ActiveFront {
    const proxy = new Int32Array(tree.leafCount);
    for (const root of tree.roots) {
      const lo = tree.leafSpan[2 * root];
      const hi = tree.leafSpan[2 * root + 1];
      for (let i = lo; i < hi; i++) proxy[tree.leafOrder[i]] = root;
    }
    return new ActiveFront(new Set(tree.roots), proxy);
  }

  static allLeaves(tree: TreeData): ActiveFront {
    const proxy = new Int32Array(tree.leafCount);
    const active = new Set<number>();
    for (let i = 0; i < tree.leafCount; i++) {
      proxy[i] = i;
      active.add(i);
    }
    return new ActiveFront(active, proxy);
  }

  copy(): ActiveFront {
    const out = new ActiveFront(new Set(this.active), this.proxy.slice());
    out.frame = this.frame;
    out.lastSplits = this.lastSplits;
    out.lastMerges = this.lastMerges;
    return out;
  }

  // exhaustive cut validity: each leaf has exactly one active ancestor-or-self
  validate(tree: TreeData): void {
    for (let leafId = 0; leafId < tree.leafCount; leafId++) {
      let node = leafId;
      let hit = -1;
      let count = 0;
      while (node !== -1) {
        if (this.active.has(node)) {
          hit = node;
          count++;
        }
        node = tree.parents[node];
      }
      if (count !== 1 || hit !== this.proxy[leafId]) {
        throw new Error(`cut invalid at leaf ${leafId}`);
      }
    }
  }
}

function nodeTau(tree: TreeData, nid: number, cam: CameraPose, params: AdaptParams): number {
  return isSilhouette(tree, nid, cam) ? params.tauSilhouette : params.tau;
}

// One pass over a snapshot of the active set (ascending id order); splits
// where the projected error exceeds the node's threshold, merges sibling
// pairs whose parent projects under hysteresis * threshold.  Ops apply
// most-urgent-first so a per-frame budget defers the least pressing work.
export function adapt(front: ActiveFront, tree: TreeData, cam: CameraPose,
                      params: AdaptParams): ActiveFront {
  const leaf = tree.leafCount;
  const splitOps: Array<[number, number]> = [];
  const mergeOps: Array<[number, number]> = [];
  const mergeSeen = new Set<number>();
  const snapshot = Array.from(front.active).sort((a, b) => a - b);
  for (const nid of snapshot) {
    if (nid >= leaf) {
      const err = screenSpaceError(tree, nid, cam);
      if (err > nodeTau(tree, nid, cam, params)) splitOps.push([err, nid]);
    }
    const parent = tree.parents[nid];
    if (parent >= 0 && !mergeSeen.has(parent)) {
      const a = tree.children[2 * (parent - leaf)];
      const b = tree.children[2 * (parent - leaf) + 1];
      if (front.active.has(a) && front.active.has(b)) {
        mergeSeen.add(parent);
        const tauP = nodeTau(tree, parent, cam, params);
        const perr = screenSpaceError(tree, parent, cam);
        if (tauP === Infinity) {
          mergeOps.push([perr, parent]);
        } else if (perr < params.hysteresis * tauP) {
          mergeOps.push([perr, parent]);
        }
      }
    }
  }

  const ops: Array<[number, number, number]> = [];
  for (const [err, nid] of splitOps) ops.push([err, 0, nid]);
  for (const [err, nid] of mergeOps) ops.push([err, 1, nid]);
  ops.sort((x, y) => {
    if (x[0] !== y[0]) return y[0] - x[0]; // larger error first
    if (x[1] !== y[1]) return x[1] - y[1]; // splits before merges
    return x[2] - y[2];
  });
  const budget = params.maxOpsPerFrame === null ? ops.length : params.maxOpsPerFrame;
  const out = front.copy();
  let splits = 0;
  let merges = 0;
  for (const [, kind, nid] of ops.slice(0, budget)) {
    const a = tree.children[2 * (nid - leaf)];
    const b = tree.children[2 * (nid - leaf) + 1];
    if (kind === 0) {
      if (!out.active.has(nid)) continue;
      out.active.delete(nid);
      out.active.add(a);
      out.active.add(b);
      for (const child of [a, b]) {
        const lo = tree.leafSpan[2 * child];
        const hi = tree.leafSpan[2 * child + 1];
        for (let i = lo; i < hi; i++) out.proxy[tree.leafOrder[i]] = child;
      }
      splits++;
    } else {
      if (!out.active.has(a) || !out.active.has(b)) continue;
      out.active.delete(a);
      out.active.delete(b);
      out.active.add(nid);
      const lo = tree.leafSpan[2 * nid];
      const hi = tree.leafSpan[2 * nid + 1];
      for (let i = lo; i < hi; i++) out.proxy[tree.leafOrder[i]] = nid;
      merges++;
    }
  }
  out.frame = front.frame + 1;
  out.lastSplits = splits;
  out.lastMerges = merges;
  return out;
}

// Proxy-mapped faces with three distinct corners, deduplicated by unordered
// triple, sorted; returns flattened node-id triples (first-seen winding).
export function renderSet(front: ActiveFront, tree: TreeData): Int32Array {
  const seen = new Map<string, [number, number, number]>();
  for (let f = 0; f < tree.faceCount; f++) {
    const pa = front.proxy[tree.faces[3 * f]];
    const pb = front.proxy[tree.faces[3 * f + 1]];
    const pc = front.proxy[tree.faces[3 * f + 2]];
    if (pa === pb || pb === pc || pa === pc) continue;
    const key = [pa, pb, pc].sort((x, y) => x - y).join(",");
    if (!seen.has(key)) seen.set(key, [pa, pb, pc]);
  }
  const keys = Array.from(seen.keys()).sort((ka, kb) => {
    const a = ka.split(",").map(Number);
    const b = kb.split(",").map(Number);
    for (let i = 0; i < 3; i++) {
      if (a[i] !== b[i]) return a[i] - b[i];
    }
    return 0;
  });
  const out = new Int32Array(keys.length * 3);
  keys.forEach((key, i) => {
    const tri = seen.get(key)!;
    out[3 * i] = tri[0];
    out[3 * i + 1] = tri[1];
    out[3 * i + 2] = tri[2];
  });
  return out;
}
