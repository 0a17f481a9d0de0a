"""Continuous 6D rotation representation and rigid point transforms.

A 6D rotation stores the first two columns of the matrix (column-major);
decoding Gram-Schmidts them back onto SO(3), so any 6 values with a nonzero
first column yield a valid rotation.
"""

import numpy as np

from chois.errors import DegenerateRotation
from chois.core import tensor as T


def rot6d_to_matrix(r6):
    """Decode (...,6) -> (...,3,3) via Gram-Schmidt; always lands on SO(3)."""
    r6 = np.asarray(r6, dtype=np.float64)
    a1 = r6[..., 0:3]
    a2 = r6[..., 3:6]
    n1 = np.linalg.norm(a1, axis=-1, keepdims=True)
    if np.any(n1 < 1e-12):
        raise DegenerateRotation("first column of 6D rotation has zero norm")
    b1 = a1 / n1
    a2p = a2 - (b1 * a2).sum(axis=-1, keepdims=True) * b1
    n2 = np.linalg.norm(a2p, axis=-1, keepdims=True)
    if np.any(n2 < 1e-12):
        raise DegenerateRotation("6D rotation columns are parallel")
    b2 = a2p / n2
    b3 = np.cross(b1, b2)
    return np.stack([b1, b2, b3], axis=-1)  # columns


def matrix_to_rot6d(matrix):
    """First two columns, column-major: (...,3,3) -> (...,6)."""
    m = np.asarray(matrix, dtype=np.float64)
    return np.concatenate([m[..., :, 0], m[..., :, 1]], axis=-1)


def rot6d_to_matrix_tensor(r6, eps=1e-8):
    """Differentiable decode of a (...,6) tensor to (...,3,3).

    Uses an epsilon-guarded normalization so raw network output is safe.
    """
    a1 = r6[..., 0:3]
    a2 = r6[..., 3:6]
    n1 = T.sqrt(T.add(T.tsum(T.mul(a1, a1), axis=-1, keepdims=True), eps))
    b1 = T.div(a1, n1)
    proj = T.tsum(T.mul(b1, a2), axis=-1, keepdims=True)
    a2p = T.sub(a2, T.mul(proj, b1))
    n2 = T.sqrt(T.add(T.tsum(T.mul(a2p, a2p), axis=-1, keepdims=True), eps))
    b2 = T.div(a2p, n2)
    b3 = _cross_tensor(b1, b2)
    cols = [T.reshape(b, b.shape + (1,)) for b in (b1, b2, b3)]
    return T.concat(cols, axis=-1)


def _cross_tensor(u, v):
    ux, uy, uz = u[..., 0:1], u[..., 1:2], u[..., 2:3]
    vx, vy, vz = v[..., 0:1], v[..., 1:2], v[..., 2:3]
    cx = T.sub(T.mul(uy, vz), T.mul(uz, vy))
    cy = T.sub(T.mul(uz, vx), T.mul(ux, vz))
    cz = T.sub(T.mul(ux, vy), T.mul(uy, vx))
    return T.concat([cx, cy, cz], axis=-1)


def transform_points(rotation, translation, points):
    """Apply p' = R p + d rowwise to (...,3) points."""
    r = np.asarray(rotation, dtype=np.float64)
    d = np.asarray(translation, dtype=np.float64)
    pts = np.asarray(points, dtype=np.float64)
    return pts @ r.T + d


def yaw_matrix(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_about_axis(axis, angle):
    """Rodrigues rotation about a unit axis."""
    axis = np.asarray(axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis)
    k = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def align_vectors(src, dst):
    """Smallest rotation taking unit-ish vector src to dst."""
    a = np.asarray(src, dtype=np.float64)
    b = np.asarray(dst, dtype=np.float64)
    a = a / np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if nb < 1e-12:
        return np.eye(3)
    b = b / nb
    c = np.clip(a @ b, -1.0, 1.0)
    axis = np.cross(a, b)
    n = np.linalg.norm(axis)
    if n < 1e-12:
        if c > 0:
            return np.eye(3)
        # opposite: rotate half-turn about any perpendicular axis
        perp = np.cross(a, [1.0, 0.0, 0.0])
        if np.linalg.norm(perp) < 1e-6:
            perp = np.cross(a, [0.0, 1.0, 0.0])
        return rotation_about_axis(perp, np.pi)
    return rotation_about_axis(axis / n, np.arctan2(n, c))
