#!/usr/bin/env python3
"""Benchmark the compiled core against the pure-Python backend.

Times the greedy contraction loop and the sampled-deviation query path on
sphere meshes of increasing size, and verifies that both backends produce
identical output while they are at it.

    python3 benchmarks/bench_backends.py [--subdiv 5] [--samples 20000]
"""

import argparse
import sys
import time

from meshforge import SimplifyConfig, sampled_deviation, simplify
from meshforge._backend import available_backends
from meshforge.shapes import icosphere


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--subdiv", type=int, default=5,
                        help="icosphere subdivision level (default 5 = 20480 faces)")
    parser.add_argument("--samples", type=int, default=20000)
    args = parser.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled core not built; nothing to compare", file=sys.stderr)
        return 1

    mesh = icosphere(args.subdiv)
    target = mesh.face_count // 20
    config = SimplifyConfig(target_faces=target)
    print(f"mesh: icosphere(subdiv={args.subdiv}) "
          f"{mesh.vertex_count} vertices, {mesh.face_count} faces")
    print(f"simplify target: {target} faces; "
          f"deviation: {args.samples} samples, symmetric\n")

    rows = []
    results = {}
    for backend in ("cython", "python"):
        result, t_simplify = timed(lambda: simplify(mesh, config, backend=backend))
        results[backend] = result
        report, t_metric = timed(lambda: sampled_deviation(
            mesh, result.mesh, samples=args.samples, seed=42, symmetric=True,
            backend=backend))
        rows.append((backend, t_simplify, t_metric, report))

    identical = (results["cython"].records == results["python"].records
                 and results["cython"].mesh == results["python"].mesh)
    header = f"{'backend':<10}{'simplify [s]':>14}{'deviation [s]':>15}"
    print(header)
    print("-" * len(header))
    for backend, t_s, t_m, _ in rows:
        print(f"{backend:<10}{t_s:>14.3f}{t_m:>15.3f}")
    cy, py = rows[0], rows[1]
    print(f"\nspeedup: simplify {py[1] / cy[1]:.1f}x, "
          f"deviation {py[2] / cy[2]:.1f}x")
    print(f"outputs bit-identical across backends: {identical}")
    return 0 if identical else 2


if __name__ == "__main__":
    sys.exit(main())
