"""Backend selection: compiled core if importable, pure Python otherwise.

Both backends expose the same two entry points and must produce
bit-identical results (see _scalar.py for the shared formulas):

  simplify_loop(positions, faces, quadrics, pairs, target_faces, policy)
      -> dict with keys rec_a, rec_b, rec_cost (R,), rec_pos (R, 3),
         rec_was_edge (R,) u8, removed_flat (L,), removed_off (R + 1,),
         faces (F, 3) final corners, face_alive (F,) u8, reached bool.
         Created vertex ids are implicit: original_count + record index.

  min_sq_distances(points, tri_pts, cell_start, cell_faces, origin, cell,
                   dims) -> (S,) squared distances to the nearest triangle.

The environment variable MESHFORGE_BACKEND=python|cython forces a choice
(cython fails loudly if the extension is missing).
"""

from __future__ import annotations

import os

_FORCED = os.environ.get("MESHFORGE_BACKEND", "").strip().lower() or None

try:
    from . import _core  # type: ignore[attr-defined]
except ImportError:
    _core = None


def available_backends() -> list[str]:
    names = ["python"]
    if _core is not None:
        names.insert(0, "cython")
    return names


def backend_name() -> str:
    """Name of the backend get_impl() resolves to by default."""
    if _FORCED is not None:
        return _FORCED
    return "cython" if _core is not None else "python"


def get_impl(name: str | None = None):
    """Resolve a backend module by name (None = default selection)."""
    if name is None:
        name = _FORCED
    if name is None:
        if _core is not None:
            return _core
        name = "python"
    if name == "cython":
        if _core is None:
            raise RuntimeError("compiled backend requested but meshforge._core "
                               "is not built")
        return _core
    if name == "python":
        from . import _purepy
        return _purepy
    raise ValueError(f"unknown backend {name!r} (expected 'cython' or 'python')")
