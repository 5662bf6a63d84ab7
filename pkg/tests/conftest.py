import numpy as np
import pytest

from meshforge import Mesh, shapes


@pytest.fixture
def tetra():
    return shapes.tetrahedron()


@pytest.fixture
def box():
    return shapes.cube()


@pytest.fixture
def octa():
    return shapes.octahedron()


@pytest.fixture(scope="session")
def ico3():
    return shapes.icosphere(3)


@pytest.fixture(scope="session")
def fixture_meshes():
    return {
        "tetrahedron": shapes.tetrahedron(),
        "cube": shapes.cube(),
        "octahedron": shapes.octahedron(),
        "icosphere3": shapes.icosphere(3),
    }


def random_mesh(rng: np.random.RandomState, max_vertices: int = 12) -> Mesh:
    """Small random triangle soup (valid indices, possibly messy geometry)."""
    n = rng.randint(4, max_vertices + 1)
    positions = rng.uniform(-1.0, 1.0, size=(n, 3))
    nfaces = rng.randint(2, 2 * n)
    faces = []
    for _ in range(nfaces):
        tri = rng.choice(n, size=3, replace=False)
        faces.append(tuple(int(v) for v in tri))
    return Mesh(positions, faces)
