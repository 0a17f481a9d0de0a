"""Triangle meshes: OBJ subset loading, closest-point and ray queries."""

import numpy as np

from chois.errors import EmptyMesh
from chois.logcfg import get_logger

log = get_logger(__name__)

_DEGENERATE_AREA = 1e-14


class TriMesh:
    """Vertices (V,3) in meters and triangular faces (F,3), 0-based."""

    def __init__(self, vertices, faces):
        self.vertices = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
        self.faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
        if self.faces.size and self.faces.max() >= len(self.vertices):
            raise ValueError("face index exceeds vertex count")

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def num_faces(self):
        return len(self.faces)

    def triangle_corners(self):
        """Returns (A, B, C) arrays of shape (F, 3)."""
        v = self.vertices
        f = self.faces
        return v[f[:, 0]], v[f[:, 1]], v[f[:, 2]]

    def face_areas(self):
        a, b, c = self.triangle_corners()
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    def bounds(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def surface_centroid(self):
        """Area-weighted centroid of the triangle surface."""
        a, b, c = self.triangle_corners()
        areas = self.face_areas()
        centers = (a + b + c) / 3.0
        return (centers * areas[:, None]).sum(axis=0) / areas.sum()

    def recentered(self):
        """Copy with the surface centroid moved to the origin."""
        return TriMesh(self.vertices - self.surface_centroid(), self.faces)

    def transformed(self, rotation, translation):
        r = np.asarray(rotation, dtype=np.float64)
        t = np.asarray(translation, dtype=np.float64)
        return TriMesh(self.vertices @ r.T + t, self.faces)

    def drop_degenerate_faces(self):
        keep = self.face_areas() > _DEGENERATE_AREA
        return TriMesh(self.vertices, self.faces[keep])


def load_obj(path):
    """Parse the `v`/`f` OBJ subset; other directives are skipped with a warning.

    Faces with more than three corners are fan-triangulated. Indices are
    1-based per the format; `f v/vt/vn` forms use the vertex index only.
    """
    vertices = []
    faces = []
    skipped = set()
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            tag = parts[0]
            if tag == "v":
                if len(parts) < 4:
                    raise ValueError(f"{path}:{lineno}: malformed vertex line")
                vertices.append([float(parts[1]), float(parts[2]), float(parts[3])])
            elif tag == "f":
                idx = [int(p.split("/")[0]) for p in parts[1:]]
                if len(idx) < 3:
                    raise ValueError(f"{path}:{lineno}: face needs at least 3 indices")
                for k in range(1, len(idx) - 1):
                    faces.append([idx[0] - 1, idx[k] - 1, idx[k + 1] - 1])
            else:
                skipped.add(tag)
    if skipped:
        log.warning("%s: ignored OBJ directives: %s", path, ", ".join(sorted(skipped)))
    if not faces:
        raise EmptyMesh(f"{path}: no triangular faces")
    return TriMesh(np.array(vertices), np.array(faces)).drop_degenerate_faces()


def save_obj(path, mesh, extra_lines=()):
    with open(path, "w") as fh:
        for v in mesh.vertices:
            fh.write(f"v {v[0]!r} {v[1]!r} {v[2]!r}\n")
        for f in mesh.faces:
            fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")
        for line in extra_lines:
            fh.write(line + "\n")


# ---------------------------------------------------------------------------
# closest-point queries (exact, all faces)
# ---------------------------------------------------------------------------

def closest_point_on_triangles(points, tri_a, tri_b, tri_c):
    """Closest point on each triangle for each query point.

    points (N,3); tri_* (F,3). Returns (N,F,3) closest points. Vectorized
    region classification following the standard barycentric case analysis.
    """
    p = points[:, None, :]
    a = tri_a[None, :, :]
    ab = (tri_b - tri_a)[None, :, :]
    ac = (tri_c - tri_a)[None, :, :]
    ap = p - a
    d1 = np.einsum("fk,nfk->nf", tri_b - tri_a, ap)
    d2 = np.einsum("fk,nfk->nf", tri_c - tri_a, ap)

    bp = p - tri_b[None, :, :]
    d3 = np.einsum("fk,nfk->nf", tri_b - tri_a, bp)
    d4 = np.einsum("fk,nfk->nf", tri_c - tri_a, bp)
    cp = p - tri_c[None, :, :]
    d5 = np.einsum("fk,nfk->nf", tri_b - tri_a, cp)
    d6 = np.einsum("fk,nfk->nf", tri_c - tri_a, cp)

    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2

    with np.errstate(divide="ignore", invalid="ignore"):
        # interior (face region)
        denom = va + vb + vc
        v_int = np.where(denom != 0.0, vb / denom, 0.0)
        w_int = np.where(denom != 0.0, vc / denom, 0.0)
        out = a + v_int[..., None] * ab + w_int[..., None] * ac

        # edge BC
        t_bc = np.where((d4 - d3) + (d5 - d6) != 0.0, (d4 - d3) / ((d4 - d3) + (d5 - d6)), 0.0)
        on_bc = tri_b[None] + t_bc[..., None] * (tri_c - tri_b)[None]
        cond_bc = (va <= 0.0) & ((d4 - d3) >= 0.0) & ((d5 - d6) >= 0.0)
        out = np.where(cond_bc[..., None], on_bc, out)

        # edge AC
        t_ac = np.where(d2 - d6 != 0.0, d2 / (d2 - d6), 0.0)
        on_ac = a + t_ac[..., None] * ac
        cond_ac = (vb <= 0.0) & (d2 >= 0.0) & (d6 <= 0.0)
        out = np.where(cond_ac[..., None], on_ac, out)

        # edge AB
        t_ab = np.where(d1 - d3 != 0.0, d1 / (d1 - d3), 0.0)
        on_ab = a + t_ab[..., None] * ab
        cond_ab = (vc <= 0.0) & (d1 >= 0.0) & (d3 <= 0.0)
        out = np.where(cond_ab[..., None], on_ab, out)

    # vertices (highest priority)
    out = np.where(((d6 >= 0.0) & (d5 <= d6))[..., None], tri_c[None], out)
    out = np.where(((d3 >= 0.0) & (d4 <= d3))[..., None], tri_b[None], out)
    out = np.where(((d1 <= 0.0) & (d2 <= 0.0))[..., None], tri_a[None], out)
    return out


def closest_points_on_mesh(mesh, points, chunk=2048):
    """Nearest surface point for each query point.

    Returns (closest (N,3), distance (N,), face index (N,)).
    """
    if mesh.num_faces == 0:
        raise EmptyMesh("mesh has no faces")
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    a, b, c = mesh.triangle_corners()
    closest = np.empty_like(points)
    dists = np.empty(len(points))
    face_idx = np.empty(len(points), dtype=np.int64)
    for start in range(0, len(points), chunk):
        sl = slice(start, start + chunk)
        cand = closest_point_on_triangles(points[sl], a, b, c)
        d2 = ((cand - points[sl, None, :]) ** 2).sum(axis=2)
        best = d2.argmin(axis=1)
        rows = np.arange(len(best))
        closest[sl] = cand[rows, best]
        dists[sl] = np.sqrt(d2[rows, best])
        face_idx[sl] = best
    return closest, dists, face_idx


# ---------------------------------------------------------------------------
# ray casting (for inside/outside classification)
# ---------------------------------------------------------------------------

def ray_crossing_counts(mesh, origins, direction, eps=1e-12):
    """Number of triangle crossings along ``direction`` from each origin."""
    origins = np.asarray(origins, dtype=np.float64).reshape(-1, 3)
    d = np.asarray(direction, dtype=np.float64)
    a, b, c = mesh.triangle_corners()
    e1 = b - a
    e2 = c - a
    pvec = np.cross(d, e2)  # (F,3)
    det = np.einsum("fk,fk->f", e1, pvec)
    valid = np.abs(det) > eps
    inv_det = np.where(valid, 1.0 / np.where(valid, det, 1.0), 0.0)

    counts = np.zeros(len(origins), dtype=np.int64)
    chunk = 4096
    for start in range(0, len(origins), chunk):
        o = origins[start : start + chunk]
        tvec = o[:, None, :] - a[None, :, :]  # (N,F,3)
        u = np.einsum("nfk,fk->nf", tvec, pvec) * inv_det[None, :]
        qvec = np.cross(tvec, e1[None, :, :])
        v = np.einsum("nfk,k->nf", qvec, d) * inv_det[None, :]
        t = np.einsum("nfk,fk->nf", qvec, e2) * inv_det[None, :]
        hit = (
            valid[None, :]
            & (u >= 0.0)
            & (v >= 0.0)
            & (u + v <= 1.0)
            & (t > eps)
        )
        counts[start : start + chunk] = hit.sum(axis=1)
    return counts


def inside_mesh(mesh, points, directions=None):
    """Inside/outside by majority parity vote over three ray directions.

    Directions are slightly tilted off-axis to dodge edge-aligned rays.
    """
    if directions is None:
        directions = np.array(
            [
                [1.0, 0.0172, 0.00731],
                [0.0119, 1.0, 0.0257],
                [0.00653, 0.0181, 1.0],
            ]
        )
    votes = np.zeros(len(np.atleast_2d(points)), dtype=np.int64)
    for d in directions:
        counts = ray_crossing_counts(mesh, points, d / np.linalg.norm(d))
        votes += counts % 2
    return votes >= 2
