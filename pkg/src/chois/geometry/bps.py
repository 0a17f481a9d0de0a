"""Basis point set features: fixed random probes encoding object shape."""

import numpy as np

from chois import rng
from chois.errors import EmptyBasis, EmptyMesh, InvalidK
from chois.geometry.mesh import closest_points_on_mesh


class BasisPointSet:
    """Seeded uniform sample inside a ball of the given radius."""

    def __init__(self, points, radius, seed):
        self.points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        self.radius = float(radius)
        self.seed = int(seed)

    def __len__(self):
        return len(self.points)


def sample_basis_points(count, radius=1.0, seed=0):
    """Uniform points inside the ball (radial cube-root transform)."""
    if count == 0:
        raise EmptyBasis("basis point count must be >= 1")
    if count < 0 or radius <= 0:
        raise ValueError("count must be positive and radius > 0")
    gen = rng.stream(seed, "basis-points")
    directions = gen.normal(size=(count, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * gen.uniform(0.0, 1.0, size=count) ** (1.0 / 3.0)
    return BasisPointSet(directions * radii[:, None], radius, seed)


class BPSFeature:
    """Directional offsets basis point -> nearest mesh surface point."""

    def __init__(self, deltas):
        self.deltas = np.asarray(deltas, dtype=np.float64).reshape(-1, 3)

    def flat(self):
        return self.deltas.ravel()

    def distances(self):
        return np.linalg.norm(self.deltas, axis=1)


def compute_bps(mesh, basis):
    """delta[i] = nearest_surface_point(basis[i]) - basis[i]."""
    if mesh.num_faces == 0:
        raise EmptyMesh("cannot encode an empty mesh")
    nearest, _, _ = closest_points_on_mesh(mesh, basis.points)
    return BPSFeature(nearest - basis.points)


class RestKeypoints:
    """Subset of nearest-neighbor surface points outlining the rest shape."""

    def __init__(self, points, seed):
        self.points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        self.seed = int(seed)

    def __len__(self):
        return len(self.points)


def select_rest_keypoints(mesh, basis, k=100, seed=0):
    """Seeded choice without replacement among the basis' nearest surface points."""
    if k > len(basis):
        raise InvalidK(f"k={k} exceeds basis size {len(basis)}")
    nearest, _, _ = closest_points_on_mesh(mesh, basis.points)
    gen = rng.stream(seed, "rest-keypoints")
    idx = gen.choice(len(basis), size=k, replace=False)
    idx = np.sort(idx)
    return RestKeypoints(nearest[idx], seed)
