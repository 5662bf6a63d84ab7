"""meshforge command line: simplify, build-tree, extract, flythrough, compare.

Standard output carries machine-readable results only (one JSON document,
or nothing when the result goes to a file); diagnostics go to stderr.
Exit codes: 0 ok, 1 I/O, 2 parse, 3 target unreachable (outputs still
written), 4 bad tree/log, 5 zero-area mesh.

Every command that writes files also writes `<primary output>.manifest.json`
recording the full parameter set, so a run can be reproduced from its
manifest alone.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .errors import (InconsistentLogError, MeshForgeError, ObjParseError,
                     TreeLoadError, ZeroAreaMeshError)
from .mesh import cleanup, load_obj, save_obj
from .metrics import sampled_deviation
from .simplifier import (SimplifyConfig, log_from_text, log_to_text,
                         replay_log, simplify)
from .vertex_tree import (build_tree, extract_at_error, load_tree, save_tree,
                          tree_to_json)
from .view_dependent import (FLYTHROUGH_CSV_HEADER, AdaptParams, flythrough,
                             load_camera_path, screen_error_dump)

EXIT_OK = 0
EXIT_IO = 1
EXIT_PARSE = 2
EXIT_UNREACHABLE = 3
EXIT_BAD_TREE = 4
EXIT_ZERO_AREA = 5

_PLACEMENT_NAMES = {
    "optimal": "optimal",
    "subset": "subset-only",
    "midpoint": "midpoint-fallback-only",
}


def _fail(code: int, message: str) -> int:
    print(f"meshforge: {message}", file=sys.stderr)
    return code


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_manifest(primary_output: str, command: str, parameters: dict,
                    inputs: list[str], outputs: list[str],
                    wall_time_s: float) -> None:
    manifest = {
        "tool": "meshforge",
        "version": __version__,
        "command": command,
        "parameters": parameters,
        "inputs": inputs,
        "outputs": outputs,
        "wall_time_s": wall_time_s,
    }
    with open(primary_output + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")


def _print_json(doc: dict) -> None:
    print(json.dumps(doc))


def _jsonable_float(v: float):
    if v != v or v in (float("inf"), float("-inf")):
        return repr(v)
    return v


# -- commands ----------------------------------------------------------------

def cmd_simplify(args) -> int:
    started = time.perf_counter()
    mesh = load_obj(_read_text(args.input))
    config = SimplifyConfig(
        target_faces=args.target_faces,
        pair_threshold=args.pair_threshold,
        placement_policy=_PLACEMENT_NAMES[args.placement],
    )
    result = simplify(mesh, config)
    _write_text(args.output, save_obj(result.mesh))
    outputs = [args.output]
    if args.log:
        _write_text(args.log, log_to_text(result.records))
        outputs.append(args.log)
    _write_manifest(args.output, "simplify", {
        "input": args.input,
        "target_faces": args.target_faces,
        "pair_threshold": args.pair_threshold,
        "placement": args.placement,
        "output": args.output,
        "log": args.log,
    }, [args.input], outputs, time.perf_counter() - started)
    _print_json({
        "vertices_before": mesh.vertex_count,
        "faces_before": mesh.face_count,
        "vertices_after": result.mesh.vertex_count,
        "faces_after": result.mesh.face_count,
        "contractions": len(result.records),
        "total_cost": result.total_cost,
        "reached_target": result.reached_target,
    })
    if not result.reached_target:
        return _fail(EXIT_UNREACHABLE,
                     "candidate pairs exhausted above the target face count")
    return EXIT_OK


def cmd_build_tree(args) -> int:
    started = time.perf_counter()
    mesh = load_obj(_read_text(args.input))
    if args.log is not None:
        records = log_from_text(_read_text(args.log))
        replay_log(mesh, records)  # InconsistentLogError -> exit 4
    else:
        config = SimplifyConfig(
            target_faces=args.target_faces,
            pair_threshold=args.pair_threshold,
            placement_policy=_PLACEMENT_NAMES[args.placement],
        )
        records = simplify(mesh, config).records
    tree = build_tree(mesh, records)
    if args.json:
        _write_text(args.output, json.dumps(tree_to_json(tree)))
    else:
        with open(args.output, "wb") as fh:
            fh.write(save_tree(tree))
    _write_manifest(args.output, "build-tree", {
        "input": args.input,
        "log": args.log,
        "target_faces": args.target_faces,
        "pair_threshold": args.pair_threshold,
        "placement": args.placement,
        "json": args.json,
        "output": args.output,
    }, [p for p in (args.input, args.log) if p], [args.output],
        time.perf_counter() - started)
    _print_json({
        "leaves": tree.leaf_count,
        "nodes": tree.node_count,
        "roots": len(tree.roots),
        "records": len(records),
    })
    return EXIT_OK


def cmd_extract(args) -> int:
    started = time.perf_counter()
    with open(args.input, "rb") as fh:
        tree = load_tree(fh.read())
    mesh = extract_at_error(tree, args.error)
    _write_text(args.output, save_obj(mesh))
    _write_manifest(args.output, "extract", {
        "input": args.input,
        "error": _jsonable_float(args.error),
        "output": args.output,
    }, [args.input], [args.output], time.perf_counter() - started)
    _print_json({"vertices": mesh.vertex_count, "faces": mesh.face_count})
    return EXIT_OK


def cmd_flythrough(args) -> int:
    started = time.perf_counter()
    with open(args.input, "rb") as fh:
        tree = load_tree(fh.read())
    try:
        path = load_camera_path(_read_text(args.path))
    except ValueError as exc:
        return _fail(EXIT_PARSE, str(exc))
    params = AdaptParams(tau=args.tau, tau_silhouette=args.tau_sil,
                         hysteresis=args.hysteresis,
                         max_ops_per_frame=args.max_ops)
    stats, front = flythrough(tree, path, params)
    rows = [FLYTHROUGH_CSV_HEADER] + [s.csv_row() for s in stats]
    _write_text(args.output, "\n".join(rows) + "\n")
    outputs = [args.output]
    if args.debug_dump:
        cam = path[-1][1]
        errors = screen_error_dump(tree, cam)
        doc = {
            "frame": len(path) - 1,
            "camera": {
                "eye": list(cam.eye), "forward": list(cam.forward),
                "up": list(cam.up), "fov_y": cam.fov_y,
                "viewport_height": cam.viewport_height, "near": cam.near,
            },
            "errors": [_jsonable_float(e) for e in errors],
        }
        _write_text(args.debug_dump, json.dumps(doc))
        outputs.append(args.debug_dump)
    _write_manifest(args.output, "flythrough", {
        "input": args.input,
        "path": args.path,
        "tau": _jsonable_float(args.tau),
        "tau_silhouette": _jsonable_float(args.tau_sil)
        if args.tau_sil is not None else None,
        "hysteresis": args.hysteresis,
        "max_ops": args.max_ops,
        "output": args.output,
        "debug_dump": args.debug_dump,
    }, [args.input, args.path], outputs, time.perf_counter() - started)
    _print_json({
        "frames": len(stats),
        "final_active": len(front.active),
        "final_triangles": stats[-1].triangles,
    })
    return EXIT_OK


def cmd_compare(args) -> int:
    mesh_a = load_obj(_read_text(args.mesh_a))
    mesh_b = load_obj(_read_text(args.mesh_b))
    report = sampled_deviation(mesh_a, mesh_b, samples=args.samples,
                               seed=args.seed, symmetric=args.symmetric)
    print(report.to_json())
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meshforge",
        description="Quadric-error mesh simplification and LOD hierarchies")
    parser.add_argument("--version", action="version",
                        version=f"meshforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simplify",
                       help="greedy pair contraction to a target face count")
    p.add_argument("input", help="input OBJ path")
    p.add_argument("--target-faces", type=int, required=True)
    p.add_argument("--pair-threshold", type=float, default=0.0,
                   help="non-edge pair distance threshold (0 = edges only)")
    p.add_argument("--placement", choices=sorted(_PLACEMENT_NAMES),
                   default="optimal")
    p.add_argument("-o", "--output", required=True, help="simplified OBJ path")
    p.add_argument("--log", help="write the contraction log here")
    p.set_defaults(func=cmd_simplify)

    p = sub.add_parser("build-tree", help="build and save a vertex tree")
    p.add_argument("input", help="input OBJ path")
    p.add_argument("--log", help="use this contraction log instead of simplifying")
    p.add_argument("--target-faces", type=int, default=0,
                   help="simplification target when no log is given")
    p.add_argument("--pair-threshold", type=float, default=0.0)
    p.add_argument("--placement", choices=sorted(_PLACEMENT_NAMES),
                   default="optimal")
    p.add_argument("-o", "--output", required=True, help="output .vtree path")
    p.add_argument("--json", action="store_true",
                   help="write the JSON export instead of the binary format")
    p.set_defaults(func=cmd_build_tree)

    p = sub.add_parser("extract", help="extract a mesh at a fixed error")
    p.add_argument("input", help="input .vtree path")
    p.add_argument("--error", type=float, required=True,
                   help="squared-length error budget ('inf' accepted)")
    p.add_argument("-o", "--output", required=True, help="output OBJ path")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("flythrough",
                       help="adapt an active front along a camera path")
    p.add_argument("input", help="input .vtree path")
    p.add_argument("--path", required=True, help="camera path JSON")
    p.add_argument("--tau", type=float, required=True,
                   help="split threshold in pixels")
    p.add_argument("--tau-sil", type=float, default=None,
                   help="silhouette split threshold (default: tau)")
    p.add_argument("--hysteresis", type=float, default=0.0)
    p.add_argument("--max-ops", type=int, default=None,
                   help="split/merge budget per frame")
    p.add_argument("-o", "--output", required=True, help="stats CSV path")
    p.add_argument("--debug-dump",
                   help="write per-node screen errors at the final pose")
    p.set_defaults(func=cmd_flythrough)

    p = sub.add_parser("compare", help="sampled deviation between two meshes")
    p.add_argument("mesh_a", help="source OBJ path")
    p.add_argument("mesh_b", help="target OBJ path")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--symmetric", action="store_true")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "error", None) is not None and args.error != args.error:
        return _fail(EXIT_PARSE, "--error must be a number or 'inf'")
    try:
        return args.func(args)
    except ObjParseError as exc:
        return _fail(EXIT_PARSE, f"OBJ parse error: {exc}")
    except (TreeLoadError, InconsistentLogError) as exc:
        return _fail(EXIT_BAD_TREE, str(exc))
    except ZeroAreaMeshError as exc:
        return _fail(EXIT_ZERO_AREA, str(exc))
    except OSError as exc:
        return _fail(EXIT_IO, str(exc))
    except (ValueError, MeshForgeError) as exc:
        return _fail(EXIT_PARSE, str(exc))


if __name__ == "__main__":
    sys.exit(main())
