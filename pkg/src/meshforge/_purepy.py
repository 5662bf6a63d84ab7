"""Pure-Python backend: greedy contraction loop and nearest-face queries.

Mirrors meshforge._core; the float math lives in _scalar so both backends
share one set of formulas.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

from ._scalar import place_pair, point_triangle_dist_sq


def _qsum(qa, qb):
    return (qa[0] + qb[0], qa[1] + qb[1], qa[2] + qb[2], qa[3] + qb[3],
            qa[4] + qb[4], qa[5] + qb[5], qa[6] + qb[6], qa[7] + qb[7],
            qa[8] + qb[8], qa[9] + qb[9])


def simplify_loop(positions, faces, quadrics, pairs, target_faces, policy):
    # Deferred import: _backend loads this module lazily, after simplifier.
    from .simplifier import CandidatePair, SimplifyState

    state = SimplifyState(positions, faces.tolist(), quadrics)
    pos = state.positions
    quad = state.quadrics
    alive = state.alive
    gen = state.generation

    padj: list[set[int]] = [set() for _ in pos]
    heap: list[CandidatePair] = []
    for i, j in pairs.tolist():
        padj[i].add(j)
        padj[j].add(i)
        q = _qsum(quad[i], quad[j])
        vi = pos[i]
        vj = pos[j]
        x, y, z, cost = place_pair(q, vi[0], vi[1], vi[2],
                                   vj[0], vj[1], vj[2], policy)
        heap.append(CandidatePair(cost, i, j, 0, 0, (x, y, z)))
    heapq.heapify(heap)

    rec_a: list[int] = []
    rec_b: list[int] = []
    rec_cost: list[float] = []
    rec_pos: list[tuple[float, float, float]] = []
    rec_was_edge: list[int] = []
    removed_flat: list[int] = []
    removed_off: list[int] = [0]

    target = int(target_faces)
    while state.live_face_count > target and heap:
        cand = heapq.heappop(heap)
        i, j = cand.i, cand.j
        if not alive[i] or not alive[j]:
            continue
        if cand.stamp_i != gen[i] or cand.stamp_j != gen[j]:
            q = _qsum(quad[i], quad[j])
            vi = pos[i]
            vj = pos[j]
            x, y, z, cost = place_pair(q, vi[0], vi[1], vi[2],
                                       vj[0], vj[1], vj[2], policy)
            heapq.heappush(heap, CandidatePair(cost, i, j, gen[i], gen[j],
                                               (x, y, z)))
            continue
        rec = state.contract(i, j, cand.target, cand.cost)
        k = rec.created
        rec_a.append(i)
        rec_b.append(j)
        rec_cost.append(rec.cost)
        rec_pos.append(rec.position)
        rec_was_edge.append(1 if rec.was_edge else 0)
        removed_flat.extend(rec.faces_removed)
        removed_off.append(len(removed_flat))

        neighbors = sorted(x for x in (padj[i] | padj[j]) if alive[x])
        padj.append(set(neighbors))
        vk = pos[k]
        qk = quad[k]
        gk = gen[k]
        for x in neighbors:
            padj[x].add(k)
            q = _qsum(quad[x], qk)
            vx = pos[x]
            px, py, pz, cost = place_pair(q, vx[0], vx[1], vx[2],
                                          vk[0], vk[1], vk[2], policy)
            heapq.heappush(heap, CandidatePair(cost, x, k, gen[x], gk,
                                               (px, py, pz)))

    return {
        "rec_a": np.array(rec_a, dtype=np.int64),
        "rec_b": np.array(rec_b, dtype=np.int64),
        "rec_cost": np.array(rec_cost, dtype=np.float64),
        "rec_pos": np.array(rec_pos, dtype=np.float64).reshape(-1, 3),
        "rec_was_edge": np.array(rec_was_edge, dtype=np.uint8),
        "removed_flat": np.array(removed_flat, dtype=np.int64),
        "removed_off": np.array(removed_off, dtype=np.int64),
        "faces": np.array(state.faces, dtype=np.int64).reshape(-1, 3),
        "face_alive": np.array(state.face_alive, dtype=np.uint8),
        "reached": state.live_face_count <= target,
    }


def min_sq_distances(points, tri_pts, cell_start, cell_faces, origin, cell, dims):
    """Per-point squared distance to the nearest triangle, via the face grid.

    Expands Chebyshev rings of cells around each query point and stops once
    the scanned box already bounds the best distance.  Exact: agrees with a
    brute-force scan over all triangles.
    """
    pts = np.asarray(points, dtype=np.float64)
    tp = np.asarray(tri_pts, dtype=np.float64)
    nx, ny, nz = (int(d) for d in dims)
    ox, oy, oz = (float(o) for o in origin)
    cell = float(cell)
    nfaces = tp.shape[0]
    visited = np.zeros(nfaces, dtype=np.int64)
    out = np.empty(len(pts), dtype=np.float64)
    max_ring = max(nx, ny, nz)
    cs = cell_start
    cf = cell_faces

    for s in range(len(pts)):
        px, py, pz = pts[s]
        cx = int(math.floor((px - ox) / cell))
        cy = int(math.floor((py - oy) / cell))
        cz = int(math.floor((pz - oz) / cell))
        cx = min(max(cx, 0), nx - 1)
        cy = min(max(cy, 0), ny - 1)
        cz = min(max(cz, 0), nz - 1)
        best = math.inf
        stamp = s + 1
        for r in range(max_ring + 1):
            if r > 0 and best < math.inf:
                # everything unscanned lies outside the box of rings < r
                lo_x = ox + (cx - (r - 1)) * cell
                hi_x = ox + (cx + r) * cell
                lo_y = oy + (cy - (r - 1)) * cell
                hi_y = oy + (cy + r) * cell
                lo_z = oz + (cz - (r - 1)) * cell
                hi_z = oz + (cz + r) * cell
                if (px >= lo_x and px <= hi_x and py >= lo_y and py <= hi_y
                        and pz >= lo_z and pz <= hi_z):
                    margin = min(px - lo_x, hi_x - px, py - lo_y, hi_y - py,
                                 pz - lo_z, hi_z - pz)
                    if best <= margin * margin:
                        break
            x0, x1 = max(cx - r, 0), min(cx + r, nx - 1)
            y0, y1 = max(cy - r, 0), min(cy + r, ny - 1)
            z0, z1 = max(cz - r, 0), min(cz + r, nz - 1)
            for gx in range(x0, x1 + 1):
                on_x = gx == cx - r or gx == cx + r
                for gy in range(y0, y1 + 1):
                    on_y = gy == cy - r or gy == cy + r
                    for gz in range(z0, z1 + 1):
                        if r > 0 and not (on_x or on_y
                                          or gz == cz - r or gz == cz + r):
                            continue
                        c = (gx * ny + gy) * nz + gz
                        for t in range(cs[c], cs[c + 1]):
                            f = cf[t]
                            if visited[f] == stamp:
                                continue
                            visited[f] = stamp
                            row = tp[f]
                            d = point_triangle_dist_sq(
                                px, py, pz,
                                row[0], row[1], row[2],
                                row[3], row[4], row[5],
                                row[6], row[7], row[8])
                            if d < best:
                                best = d
        out[s] = best
    return out
