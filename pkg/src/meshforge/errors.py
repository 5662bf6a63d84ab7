"""Exception types shared across the toolkit."""


class MeshForgeError(Exception):
    """Base class for all toolkit errors."""


class ObjParseError(MeshForgeError):
    """Malformed OBJ input; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DegenerateTriangleError(MeshForgeError):
    """Triangle too close to collinear to define a plane."""


class PairExplosionError(MeshForgeError):
    """Distance threshold admits too many candidate pairs for the model scale."""


class DeadVertexError(MeshForgeError):
    """Contraction requested on a vertex that was already merged away."""


class InconsistentLogError(MeshForgeError):
    """Contraction log references an unknown or dead vertex id."""


class TreeLoadError(MeshForgeError):
    """Base class for tree deserialization failures."""


class TreeVersionError(TreeLoadError):
    """Unsupported tree file version."""


class TreeChecksumError(TreeLoadError):
    """Truncated stream or checksum mismatch."""


class TreeStructureError(TreeLoadError):
    """Stored tree violates a structural invariant."""


class ZeroAreaMeshError(MeshForgeError):
    """Surface sampling requested on a mesh with no positive-area faces."""
