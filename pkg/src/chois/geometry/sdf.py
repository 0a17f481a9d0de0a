"""Voxelized signed distance fields with trilinear queries."""

import numpy as np

from chois import rng
from chois.errors import OpenMeshError
from chois.geometry.mesh import closest_points_on_mesh, inside_mesh, ray_crossing_counts


class SDFGrid:
    """Node-centered signed distances; negative inside the surface."""

    def __init__(self, origin, voxel, values):
        self.origin = np.asarray(origin, dtype=np.float64)
        self.voxel = float(voxel)
        self.values = np.asarray(values, dtype=np.float64)
        self.dims = self.values.shape


def check_watertight(mesh, probes=64, seed=0):
    """Parity of ray crossings must agree across three axes for every probe."""
    lo, hi = mesh.bounds()
    pad = 0.05 * (hi - lo).max() + 1e-3
    gen = rng.stream(seed, "watertight-probes")
    pts = gen.uniform(lo - pad, hi + pad, size=(probes, 3))
    dirs = np.array(
        [[1.0, 0.013, 0.0077], [0.011, 1.0, 0.019], [0.0091, 0.017, 1.0]]
    )
    parities = []
    for d in dirs:
        counts = ray_crossing_counts(mesh, pts, d / np.linalg.norm(d))
        parities.append(counts % 2)
    parities = np.stack(parities)
    return bool((parities == parities[0]).all())


def build_sdf(mesh, voxel=0.02, padding=0.10, watertight_probes=64):
    """Signed distance on a padded node grid around the mesh.

    Raises OpenMeshError when ray-parity probes disagree (open surface).
    """
    if not check_watertight(mesh, probes=watertight_probes):
        raise OpenMeshError("mesh failed the ray-parity watertightness check")
    lo, hi = mesh.bounds()
    origin = lo - padding
    extent = (hi - lo) + 2.0 * padding
    dims = np.maximum(np.ceil(extent / voxel).astype(int) + 1, 2)
    xs = origin[0] + voxel * np.arange(dims[0])
    ys = origin[1] + voxel * np.arange(dims[1])
    zs = origin[2] + voxel * np.arange(dims[2])
    gx, gy, gz = np.meshgrid(xs, ys, zs, indexing="ij")
    nodes = np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=1)
    _, dist, _ = closest_points_on_mesh(mesh, nodes)
    sign = np.where(inside_mesh(mesh, nodes), -1.0, 1.0)
    return SDFGrid(origin, voxel, (sign * dist).reshape(dims))


def query_sdf(grid, points):
    """Trilinear interpolation; out-of-grid points clamp to the boundary.

    Returns (distances, clamped_mask).
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    frac = (pts - grid.origin) / grid.voxel
    upper = np.asarray(grid.dims) - 1
    clamped = (frac < 0.0).any(axis=1) | (frac > upper).any(axis=1)
    frac = np.clip(frac, 0.0, upper)
    i0 = np.minimum(frac.astype(int), upper - 1)
    t = frac - i0
    x0, y0, z0 = i0[:, 0], i0[:, 1], i0[:, 2]
    v = grid.values
    c000 = v[x0, y0, z0]
    c100 = v[x0 + 1, y0, z0]
    c010 = v[x0, y0 + 1, z0]
    c110 = v[x0 + 1, y0 + 1, z0]
    c001 = v[x0, y0, z0 + 1]
    c101 = v[x0 + 1, y0, z0 + 1]
    c011 = v[x0, y0 + 1, z0 + 1]
    c111 = v[x0 + 1, y0 + 1, z0 + 1]
    tx, ty, tz = t[:, 0], t[:, 1], t[:, 2]
    c00 = c000 * (1 - tx) + c100 * tx
    c10 = c010 * (1 - tx) + c110 * tx
    c01 = c001 * (1 - tx) + c101 * tx
    c11 = c011 * (1 - tx) + c111 * tx
    c0 = c00 * (1 - ty) + c10 * ty
    c1 = c01 * (1 - ty) + c11 * ty
    return c0 * (1 - tz) + c1 * tz, clamped
