"""meshforge: quadric-error mesh simplification, vertex-tree LOD
hierarchies, view-dependent refinement, and deviation metrics."""

__version__ = "0.1.0"

from ._backend import available_backends, backend_name
from .errors import (DeadVertexError, DegenerateTriangleError,
                     InconsistentLogError, MeshForgeError, ObjParseError,
                     PairExplosionError, TreeChecksumError, TreeLoadError,
                     TreeStructureError, TreeVersionError, ZeroAreaMeshError)
from .mesh import Adjacency, Mesh, bounding_radius, cleanup, load_obj, save_obj
from .metrics import DeviationReport, point_triangle_distance, sampled_deviation
from .simplifier import (ContractionRecord, SimplifyConfig, SimplifyResult,
                         SimplifyState, log_from_text, log_to_text,
                         replay_log, select_pairs, simplify)
from .vertex_tree import (VertexNode, VertexTree, build_tree, extract_at_error,
                          full_resolution, load_tree, save_tree, tree_to_json)
from .view_dependent import (ActiveFront, AdaptParams, Camera, adapt,
                             flythrough, is_silhouette, render_set,
                             screen_space_error)

__all__ = [
    "__version__",
    "available_backends", "backend_name",
    "Mesh", "Adjacency", "load_obj", "save_obj", "cleanup", "bounding_radius",
    "ContractionRecord", "SimplifyConfig", "SimplifyResult", "SimplifyState",
    "simplify", "select_pairs", "replay_log", "log_to_text", "log_from_text",
    "VertexTree", "VertexNode", "build_tree", "full_resolution",
    "extract_at_error", "save_tree", "load_tree", "tree_to_json",
    "Camera", "AdaptParams", "ActiveFront", "adapt", "render_set",
    "flythrough", "screen_space_error", "is_silhouette",
    "DeviationReport", "point_triangle_distance", "sampled_deviation",
    "MeshForgeError", "ObjParseError", "DegenerateTriangleError",
    "PairExplosionError", "DeadVertexError", "InconsistentLogError",
    "TreeLoadError", "TreeVersionError", "TreeChecksumError",
    "TreeStructureError", "ZeroAreaMeshError",
]
