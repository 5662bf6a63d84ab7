"""Scalar float kernels shared by both backends.

Expression order in this module is load-bearing: meshforge._core duplicates
these formulas term for term (and is compiled with FP contraction disabled)
so the compiled and pure-Python backends produce bit-identical results.
Edit both files together.
"""

from __future__ import annotations

import math

EPS_DEGENERATE = 1e-12  # cross-norm threshold, relative to squared max edge
EPS_SINGULAR = 1e-10    # |det A| threshold, relative to max(1, ||A||_inf^3)

POLICY_OPTIMAL = 0
POLICY_MIDPOINT_FALLBACK = 1
POLICY_SUBSET_ONLY = 2

_INV_2_53 = 1.0 / 9007199254740992.0  # 2^-53
_M64 = (1 << 64) - 1


def triangle_plane(ax, ay, az, bx, by, bz, cx, cy, cz):
    """Unit plane (a, b, c, d) of a CCW triangle, or None if degenerate.

    Degeneracy: cross-product norm <= EPS_DEGENERATE times the squared
    longest edge.
    """
    e1x = bx - ax
    e1y = by - ay
    e1z = bz - az
    e2x = cx - ax
    e2y = cy - ay
    e2z = cz - az
    nx = e1y * e2z - e1z * e2y
    ny = e1z * e2x - e1x * e2z
    nz = e1x * e2y - e1y * e2x
    nn = math.sqrt(nx * nx + ny * ny + nz * nz)
    d1 = e1x * e1x + e1y * e1y + e1z * e1z
    d2 = e2x * e2x + e2y * e2y + e2z * e2z
    e3x = e2x - e1x
    e3y = e2y - e1y
    e3z = e2z - e1z
    d3 = e3x * e3x + e3y * e3y + e3z * e3z
    longest = d1
    if d2 > longest:
        longest = d2
    if d3 > longest:
        longest = d3
    if nn <= EPS_DEGENERATE * longest:
        return None
    a = nx / nn
    b = ny / nn
    c = nz / nn
    d = -(a * ax + b * ay + c * az)
    return (a, b, c, d)


def quadric_eval(q, x, y, z):
    """v^T Q v at the homogenized point (x, y, z, 1), clamped to >= 0.

    q is the upper triangle of the symmetric 4x4 form, row-major:
    [q0 q1 q2 q3; . q4 q5 q6; . . q7 q8; . . . q9].
    """
    r = (q[0] * x * x + q[4] * y * y + q[7] * z * z + q[9]
         + 2.0 * (q[1] * x * y + q[2] * x * z + q[5] * y * z
                  + q[3] * x + q[6] * y + q[8] * z))
    return r if r > 0.0 else 0.0


def place_pair(q, v1x, v1y, v1z, v2x, v2y, v2z, policy):
    """Merged-vertex position and cost for a pair quadric.

    Returns (x, y, z, cost).  With POLICY_OPTIMAL the minimizer of the
    quadratic form is used when the 3x3 block is safely invertible, else
    the best of {v1, v2, midpoint} (ties broken in that order).
    POLICY_MIDPOINT_FALLBACK replaces that subset fallback with the plain
    midpoint; POLICY_SUBSET_ONLY never solves the system.
    """
    if policy != POLICY_SUBSET_ONLY:
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
        r0 = abs(a11) + abs(a12) + abs(a13)
        r1 = abs(a12) + abs(a22) + abs(a23)
        r2 = abs(a13) + abs(a23) + abs(a33)
        norm = r0
        if r1 > norm:
            norm = r1
        if r2 > norm:
            norm = r2
        scale = norm * norm * norm
        if scale < 1.0:
            scale = 1.0
        if abs(det) > EPS_SINGULAR * scale:
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
            return (x, y, z, quadric_eval(q, x, y, z))
    mx = 0.5 * (v1x + v2x)
    my = 0.5 * (v1y + v2y)
    mz = 0.5 * (v1z + v2z)
    if policy == POLICY_MIDPOINT_FALLBACK:
        return (mx, my, mz, quadric_eval(q, mx, my, mz))
    e1 = quadric_eval(q, v1x, v1y, v1z)
    e2 = quadric_eval(q, v2x, v2y, v2z)
    em = quadric_eval(q, mx, my, mz)
    if e1 <= e2 and e1 <= em:
        return (v1x, v1y, v1z, e1)
    if e2 <= em:
        return (v2x, v2y, v2z, e2)
    return (mx, my, mz, em)


def point_segment_dist_sq(px, py, pz, ax, ay, az, bx, by, bz):
    """Squared distance from a point to a closed segment (degenerates to a point)."""
    dx = bx - ax
    dy = by - ay
    dz = bz - az
    dd = dx * dx + dy * dy + dz * dz
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


def point_triangle_dist_sq(px, py, pz, ax, ay, az, bx, by, bz, cx, cy, cz):
    """Squared distance from a point to a closed triangle.

    Region-based closest-point search; degenerate triangles fall back to
    the minimum over the three edge segments.
    """
    abx = bx - ax
    aby = by - ay
    abz = bz - az
    acx = cx - ax
    acy = cy - ay
    acz = cz - az
    nx = aby * acz - abz * acy
    ny = abz * acx - abx * acz
    nz = abx * acy - aby * acx
    nn = nx * nx + ny * ny + nz * nz
    ab2 = abx * abx + aby * aby + abz * abz
    ac2 = acx * acx + acy * acy + acz * acz
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


def uniform01(seed, counter):
    """Counter-based uniform in [0, 1): splitmix64-style finalizer over
    (seed, counter), 53-bit mantissa.  Fixed for reproducible reports."""
    z = ((seed & _M64) * 0x9E3779B97F4A7C15
         + (counter & _M64) * 0xBF58476D1CE4E5B9 + 0xD1B54A32D192ED03) & _M64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _M64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _M64
    z ^= z >> 31
    return (z >> 11) * _INV_2_53


def sphere_screen_error(px, py, pz, radius, eye_x, eye_y, eye_z,
                        fwd_x, fwd_y, fwd_z, fov_y, viewport_height, near):
    """Pixels subtended by a sphere of the given radius under perspective.

    err = radius * viewport_height / (2 tan(fov_y / 2) * depth), with depth
    clamped to the near distance.  A positive-radius sphere that reaches
    the near region returns +inf; a zero radius is 0 at any camera.
    """
    if radius <= 0.0:
        return 0.0
    depth = (px - eye_x) * fwd_x + (py - eye_y) * fwd_y + (pz - eye_z) * fwd_z
    if depth - radius <= near:
        return math.inf
    d = depth if depth > near else near
    return radius * viewport_height / (2.0 * math.tan(0.5 * fov_y) * d)
