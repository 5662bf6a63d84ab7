# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# distutils: language = c++
"""Compiled backend: greedy contraction loop and nearest-face queries.

Formula-for-formula mirror of meshforge._scalar and meshforge._purepy; the
build disables FP contraction so both backends produce bit-identical
results.  Edit those files and this one together.
"""

import heapq

import numpy as np

from libc.math cimport fabs, floor, sqrt
from libcpp.algorithm cimport sort as cpp_sort
from libcpp.vector cimport vector

ctypedef long long i64

cdef double INF = float("inf")


# -- shared scalar kernels (see _scalar.py) ----------------------------------

cdef inline double qeval(const double* q, double x, double y, double z) noexcept nogil:
    cdef double r = (q[0] * x * x + q[4] * y * y + q[7] * z * z + q[9]
                     + 2.0 * (q[1] * x * y + q[2] * x * z + q[5] * y * z
                              + q[3] * x + q[6] * y + q[8] * z))
    return r if r > 0.0 else 0.0


cdef inline void place_pair(const double* q,
                            double v1x, double v1y, double v1z,
                            double v2x, double v2y, double v2z,
                            int policy,
                            double* ox, double* oy, double* oz,
                            double* ocost) noexcept nogil:
    cdef double a11, a12, a13, a22, a23, a33, b0, b1, b2
    cdef double det, r0, r1, r2, norm, scale, rx, ry, rz, x, y, z
    cdef double mx, my, mz, e1, e2, em
    if policy != 2:
        a11 = q[0]
        a12 = q[1]
        a13 = q[2]
        a22 = q[4]
        a23 = q[5]
        a33 = q[7]
        b0 = q[3]
        b1 = q[6]
        b2 = q[8]
        det = (a11 * (a22 * a33 - a23 * a23)
               - a12 * (a12 * a33 - a23 * a13)
               + a13 * (a12 * a23 - a22 * a13))
        r0 = fabs(a11) + fabs(a12) + fabs(a13)
        r1 = fabs(a12) + fabs(a22) + fabs(a23)
        r2 = fabs(a13) + fabs(a23) + fabs(a33)
        norm = r0
        if r1 > norm:
            norm = r1
        if r2 > norm:
            norm = r2
        scale = norm * norm * norm
        if scale < 1.0:
            scale = 1.0
        if fabs(det) > 1e-10 * scale:
            rx = -b0
            ry = -b1
            rz = -b2
            x = (rx * (a22 * a33 - a23 * a23)
                 - a12 * (ry * a33 - a23 * rz)
                 + a13 * (ry * a23 - a22 * rz)) / det
            y = (a11 * (ry * a33 - a23 * rz)
                 - rx * (a12 * a33 - a23 * a13)
                 + a13 * (a12 * rz - ry * a13)) / det
            z = (a11 * (a22 * rz - ry * a23)
                 - a12 * (a12 * rz - ry * a13)
                 + rx * (a12 * a23 - a22 * a13)) / det
            ox[0] = x
            oy[0] = y
            oz[0] = z
            ocost[0] = qeval(q, x, y, z)
            return
    mx = 0.5 * (v1x + v2x)
    my = 0.5 * (v1y + v2y)
    mz = 0.5 * (v1z + v2z)
    if policy == 1:
        ox[0] = mx
        oy[0] = my
        oz[0] = mz
        ocost[0] = qeval(q, mx, my, mz)
        return
    e1 = qeval(q, v1x, v1y, v1z)
    e2 = qeval(q, v2x, v2y, v2z)
    em = qeval(q, mx, my, mz)
    if e1 <= e2 and e1 <= em:
        ox[0] = v1x
        oy[0] = v1y
        oz[0] = v1z
        ocost[0] = e1
        return
    if e2 <= em:
        ox[0] = v2x
        oy[0] = v2y
        oz[0] = v2z
        ocost[0] = e2
        return
    ox[0] = mx
    oy[0] = my
    oz[0] = mz
    ocost[0] = em


cdef inline double point_segment_dist_sq(double px, double py, double pz,
                                         double ax, double ay, double az,
                                         double bx, double by, double bz) noexcept nogil:
    cdef double dx = bx - ax
    cdef double dy = by - ay
    cdef double dz = bz - az
    cdef double dd = dx * dx + dy * dy + dz * dz
    cdef double t, ex, ey, ez
    if dd <= 0.0:
        t = 0.0
    else:
        t = ((px - ax) * dx + (py - ay) * dy + (pz - az) * dz) / dd
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    ex = ax + t * dx - px
    ey = ay + t * dy - py
    ez = az + t * dz - pz
    return ex * ex + ey * ey + ez * ez


cdef double point_triangle_dist_sq(double px, double py, double pz,
                                   double ax, double ay, double az,
                                   double bx, double by, double bz,
                                   double cx, double cy, double cz) noexcept nogil:
    cdef double abx = bx - ax
    cdef double aby = by - ay
    cdef double abz = bz - az
    cdef double acx = cx - ax
    cdef double acy = cy - ay
    cdef double acz = cz - az
    cdef double nx = aby * acz - abz * acy
    cdef double ny = abz * acx - abx * acz
    cdef double nz = abx * acy - aby * acx
    cdef double nn = nx * nx + ny * ny + nz * nz
    cdef double ab2 = abx * abx + aby * aby + abz * abz
    cdef double ac2 = acx * acx + acy * acy + acz * acz
    cdef double d1, d2, d3, d4, d5, d6, va, vb, vc, v, w, denom
    cdef double apx, apy, apz, bpx, bpy, bpz, cpx, cpy, cpz
    cdef double ex, ey, ez, best
    if nn <= 1e-28 * (ab2 * ac2):
        d1 = point_segment_dist_sq(px, py, pz, ax, ay, az, bx, by, bz)
        d2 = point_segment_dist_sq(px, py, pz, ax, ay, az, cx, cy, cz)
        d3 = point_segment_dist_sq(px, py, pz, bx, by, bz, cx, cy, cz)
        best = d1
        if d2 < best:
            best = d2
        if d3 < best:
            best = d3
        return best

    apx = px - ax
    apy = py - ay
    apz = pz - az
    d1 = abx * apx + aby * apy + abz * apz
    d2 = acx * apx + acy * apy + acz * apz
    if d1 <= 0.0 and d2 <= 0.0:
        return apx * apx + apy * apy + apz * apz

    bpx = px - bx
    bpy = py - by
    bpz = pz - bz
    d3 = abx * bpx + aby * bpy + abz * bpz
    d4 = acx * bpx + acy * bpy + acz * bpz
    if d3 >= 0.0 and d4 <= d3:
        return bpx * bpx + bpy * bpy + bpz * bpz

    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        v = d1 / (d1 - d3)
        ex = ax + v * abx - px
        ey = ay + v * aby - py
        ez = az + v * abz - pz
        return ex * ex + ey * ey + ez * ez

    cpx = px - cx
    cpy = py - cy
    cpz = pz - cz
    d5 = abx * cpx + aby * cpy + abz * cpz
    d6 = acx * cpx + acy * cpy + acz * cpz
    if d6 >= 0.0 and d5 <= d6:
        return cpx * cpx + cpy * cpy + cpz * cpz

    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        w = d2 / (d2 - d6)
        ex = ax + w * acx - px
        ey = ay + w * acy - py
        ez = az + w * acz - pz
        return ex * ex + ey * ey + ez * ez

    va = d3 * d6 - d5 * d4
    if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        ex = bx + w * (cx - bx) - px
        ey = by + w * (cy - by) - py
        ez = bz + w * (cz - bz) - pz
        return ex * ex + ey * ey + ez * ez

    denom = 1.0 / (va + vb + vc)
    v = vb * denom
    w = vc * denom
    ex = ax + abx * v + acx * w - px
    ey = ay + aby * v + acy * w - py
    ez = az + abz * v + acz * w - pz
    return ex * ex + ey * ey + ez * ez


# -- greedy contraction loop --------------------------------------------------

def simplify_loop(double[:, ::1] positions0, long long[:, ::1] faces0,
                  double[:, ::1] quadrics0, long long[:, ::1] pairs,
                  long long target_faces, int policy):
    cdef Py_ssize_t n0 = positions0.shape[0]
    cdef Py_ssize_t nfaces = faces0.shape[0]
    cdef Py_ssize_t npairs = pairs.shape[0]
    cdef Py_ssize_t cap = 2 * n0 if n0 > 0 else 1

    pos_np = np.zeros((cap, 3), dtype=np.float64)
    pos_np[:n0] = np.asarray(positions0)
    quad_np = np.zeros((cap, 10), dtype=np.float64)
    quad_np[:n0] = np.asarray(quadrics0)
    faces_np = np.asarray(faces0).copy()
    alive_np = np.zeros(cap, dtype=np.uint8)
    alive_np[:n0] = 1
    gen_np = np.zeros(cap, dtype=np.int64)
    face_alive_np = np.ones(nfaces, dtype=np.uint8) if nfaces else \
        np.zeros(0, dtype=np.uint8)
    face_seen_np = np.zeros(nfaces, dtype=np.int64)
    nbr_seen_np = np.zeros(cap, dtype=np.int64)

    cdef double[:, ::1] pos = pos_np
    cdef double[:, ::1] quad = quad_np
    cdef long long[:, ::1] fcs = faces_np.reshape(-1, 3)
    cdef unsigned char[::1] alive = alive_np
    cdef long long[::1] gen = gen_np
    cdef unsigned char[::1] face_alive = face_alive_np
    cdef long long[::1] face_seen = face_seen_np
    cdef long long[::1] nbr_seen = nbr_seen_np

    cdef vector[vector[i64]] inc
    cdef vector[vector[i64]] padj
    inc.resize(cap)
    padj.resize(cap)

    cdef Py_ssize_t f, t, idx
    cdef i64 a, b, c
    for f in range(nfaces):
        a = fcs[f, 0]
        b = fcs[f, 1]
        c = fcs[f, 2]
        inc[a].push_back(f)
        if b != a:
            inc[b].push_back(f)
        if c != a and c != b:
            inc[c].push_back(f)

    heap = []
    cdef double qs[10]
    cdef double px, py, pz, cost, qx, qy, qz, cost2
    cdef i64 i, j, k, x, gi, gj
    cdef Py_ssize_t p
    for p in range(npairs):
        i = pairs[p, 0]
        j = pairs[p, 1]
        padj[i].push_back(j)
        padj[j].push_back(i)
        for t in range(10):
            qs[t] = quad[i, t] + quad[j, t]
        place_pair(qs, pos[i, 0], pos[i, 1], pos[i, 2],
                   pos[j, 0], pos[j, 1], pos[j, 2], policy,
                   &px, &py, &pz, &cost)
        heap.append((cost, i, j, 0, 0, px, py, pz))
    heapq.heapify(heap)

    rec_a = []
    rec_b = []
    rec_cost = []
    rec_pos = []
    rec_was_edge = []
    removed_flat = []
    removed_off = [0]

    cdef i64 live_faces = nfaces
    cdef i64 nv = n0
    cdef i64 stamp = 0
    cdef int was_edge, has_i, has_j
    cdef vector[i64] touched
    cdef vector[i64] nbrs
    cdef i64 corner

    while live_faces > target_faces and len(heap) > 0:
        item = heapq.heappop(heap)
        cost = item[0]
        i = item[1]
        j = item[2]
        gi = item[3]
        gj = item[4]
        if alive[i] == 0 or alive[j] == 0:
            continue
        if gi != gen[i] or gj != gen[j]:
            for t in range(10):
                qs[t] = quad[i, t] + quad[j, t]
            place_pair(qs, pos[i, 0], pos[i, 1], pos[i, 2],
                       pos[j, 0], pos[j, 1], pos[j, 2], policy,
                       &px, &py, &pz, &cost)
            heapq.heappush(heap, (cost, i, j, gen[i], gen[j], px, py, pz))
            continue
        px = item[5]
        py = item[6]
        pz = item[7]

        k = nv
        nv += 1
        pos[k, 0] = px
        pos[k, 1] = py
        pos[k, 2] = pz
        for t in range(10):
            quad[k, t] = quad[i, t] + quad[j, t]
        alive[k] = 1

        stamp += 1
        touched.clear()
        for t in range(<Py_ssize_t> inc[i].size()):
            f = inc[i][t]
            if face_alive[f] and face_seen[f] != stamp:
                face_seen[f] = stamp
                touched.push_back(f)
        for t in range(<Py_ssize_t> inc[j].size()):
            f = inc[j][t]
            if face_alive[f] and face_seen[f] != stamp:
                face_seen[f] = stamp
                touched.push_back(f)
        cpp_sort(touched.begin(), touched.end())

        was_edge = 0
        for t in range(<Py_ssize_t> touched.size()):
            f = touched[t]
            has_i = 0
            has_j = 0
            for idx in range(3):
                if fcs[f, idx] == i:
                    has_i = 1
                elif fcs[f, idx] == j:
                    has_j = 1
            if has_i and has_j:
                was_edge = 1
            for idx in range(3):
                if fcs[f, idx] == i or fcs[f, idx] == j:
                    fcs[f, idx] = k
            a = fcs[f, 0]
            b = fcs[f, 1]
            c = fcs[f, 2]
            if a == b or b == c or a == c:
                face_alive[f] = 0
                live_faces -= 1
                removed_flat.append(f)
            else:
                inc[k].push_back(f)

        # bump generations of the new vertex's mesh neighbors
        stamp += 1
        for t in range(<Py_ssize_t> inc[k].size()):
            f = inc[k][t]
            if face_alive[f] == 0:
                continue
            for idx in range(3):
                corner = fcs[f, idx]
                if corner != k and nbr_seen[corner] != stamp:
                    nbr_seen[corner] = stamp
                    gen[corner] += 1

        alive[i] = 0
        alive[j] = 0
        rec_a.append(i)
        rec_b.append(j)
        rec_cost.append(cost)
        rec_pos.append((px, py, pz))
        rec_was_edge.append(was_edge)
        removed_off.append(len(removed_flat))

        # recost every surviving candidate pair against the new vertex
        stamp += 1
        nbrs.clear()
        for t in range(<Py_ssize_t> padj[i].size()):
            x = padj[i][t]
            if alive[x] and nbr_seen[x] != stamp:
                nbr_seen[x] = stamp
                nbrs.push_back(x)
        for t in range(<Py_ssize_t> padj[j].size()):
            x = padj[j][t]
            if alive[x] and nbr_seen[x] != stamp:
                nbr_seen[x] = stamp
                nbrs.push_back(x)
        cpp_sort(nbrs.begin(), nbrs.end())
        for t in range(<Py_ssize_t> nbrs.size()):
            x = nbrs[t]
            padj[x].push_back(k)
            padj[k].push_back(x)
            for idx in range(10):
                qs[idx] = quad[x, idx] + quad[k, idx]
            place_pair(qs, pos[x, 0], pos[x, 1], pos[x, 2],
                       pos[k, 0], pos[k, 1], pos[k, 2], policy,
                       &qx, &qy, &qz, &cost2)
            heapq.heappush(heap, (cost2, x, k, gen[x], gen[k], qx, qy, qz))

    return {
        "rec_a": np.array(rec_a, dtype=np.int64),
        "rec_b": np.array(rec_b, dtype=np.int64),
        "rec_cost": np.array(rec_cost, dtype=np.float64),
        "rec_pos": np.array(rec_pos, dtype=np.float64).reshape(-1, 3),
        "rec_was_edge": np.array(rec_was_edge, dtype=np.uint8),
        "removed_flat": np.array(removed_flat, dtype=np.int64),
        "removed_off": np.array(removed_off, dtype=np.int64),
        "faces": faces_np,
        "face_alive": face_alive_np,
        "reached": live_faces <= target_faces,
    }


# -- nearest-face queries ------------------------------------------------------

def min_sq_distances(double[:, ::1] points, double[:, ::1] tri_pts,
                     long long[::1] cell_start, long long[::1] cell_faces,
                     origin, double cell, dims):
    cdef double ox = origin[0]
    cdef double oy = origin[1]
    cdef double oz = origin[2]
    cdef long long nx = dims[0]
    cdef long long ny = dims[1]
    cdef long long nz = dims[2]
    cdef Py_ssize_t npts = points.shape[0]
    cdef Py_ssize_t nfaces = tri_pts.shape[0]
    visited_np = np.zeros(nfaces, dtype=np.int64)
    out_np = np.empty(npts, dtype=np.float64)
    cdef long long[::1] visited = visited_np
    cdef double[::1] out = out_np
    cdef long long max_ring = nx
    if ny > max_ring:
        max_ring = ny
    if nz > max_ring:
        max_ring = nz

    cdef Py_ssize_t s
    cdef long long cx, cy, cz, r, gx, gy, gz, x0, x1, y0, y1, z0, z1, cidx, t2
    cdef i64 fidx, stamp
    cdef double px, py, pz, best, d
    cdef double lo_x, hi_x, lo_y, hi_y, lo_z, hi_z, margin, m2
    cdef int on_x, on_y

    with nogil:
        for s in range(npts):
            px = points[s, 0]
            py = points[s, 1]
            pz = points[s, 2]
            cx = <long long> floor((px - ox) / cell)
            cy = <long long> floor((py - oy) / cell)
            cz = <long long> floor((pz - oz) / cell)
            if cx < 0:
                cx = 0
            elif cx > nx - 1:
                cx = nx - 1
            if cy < 0:
                cy = 0
            elif cy > ny - 1:
                cy = ny - 1
            if cz < 0:
                cz = 0
            elif cz > nz - 1:
                cz = nz - 1
            best = INF
            stamp = s + 1
            for r in range(max_ring + 1):
                if r > 0 and best < INF:
                    lo_x = ox + (cx - (r - 1)) * cell
                    hi_x = ox + (cx + r) * cell
                    lo_y = oy + (cy - (r - 1)) * cell
                    hi_y = oy + (cy + r) * cell
                    lo_z = oz + (cz - (r - 1)) * cell
                    hi_z = oz + (cz + r) * cell
                    if (px >= lo_x and px <= hi_x and py >= lo_y
                            and py <= hi_y and pz >= lo_z and pz <= hi_z):
                        margin = px - lo_x
                        if hi_x - px < margin:
                            margin = hi_x - px
                        if py - lo_y < margin:
                            margin = py - lo_y
                        if hi_y - py < margin:
                            margin = hi_y - py
                        if pz - lo_z < margin:
                            margin = pz - lo_z
                        if hi_z - pz < margin:
                            margin = hi_z - pz
                        m2 = margin * margin
                        if best <= m2:
                            break
                x0 = cx - r
                if x0 < 0:
                    x0 = 0
                x1 = cx + r
                if x1 > nx - 1:
                    x1 = nx - 1
                y0 = cy - r
                if y0 < 0:
                    y0 = 0
                y1 = cy + r
                if y1 > ny - 1:
                    y1 = ny - 1
                z0 = cz - r
                if z0 < 0:
                    z0 = 0
                z1 = cz + r
                if z1 > nz - 1:
                    z1 = nz - 1
                for gx in range(x0, x1 + 1):
                    on_x = 1 if (gx == cx - r or gx == cx + r) else 0
                    for gy in range(y0, y1 + 1):
                        on_y = 1 if (gy == cy - r or gy == cy + r) else 0
                        for gz in range(z0, z1 + 1):
                            if r > 0 and not (on_x or on_y
                                              or gz == cz - r or gz == cz + r):
                                continue
                            cidx = (gx * ny + gy) * nz + gz
                            for t2 in range(cell_start[cidx],
                                            cell_start[cidx + 1]):
                                fidx = cell_faces[t2]
                                if visited[fidx] == stamp:
                                    continue
                                visited[fidx] = stamp
                                d = point_triangle_dist_sq(
                                    px, py, pz,
                                    tri_pts[fidx, 0], tri_pts[fidx, 1],
                                    tri_pts[fidx, 2], tri_pts[fidx, 3],
                                    tri_pts[fidx, 4], tri_pts[fidx, 5],
                                    tri_pts[fidx, 6], tri_pts[fidx, 7],
                                    tri_pts[fidx, 8])
                                if d < best:
                                    best = d
            out[s] = best
    return out_np
