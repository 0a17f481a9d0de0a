"""Procedural watertight meshes used by the synthetic object library."""

import numpy as np

from chois.geometry.mesh import TriMesh


def box(sx, sy, sz):
    """Axis-aligned box centered at the origin."""
    hx, hy, hz = sx / 2.0, sy / 2.0, sz / 2.0
    v = np.array(
        [
            [-hx, -hy, -hz],
            [hx, -hy, -hz],
            [hx, hy, -hz],
            [-hx, hy, -hz],
            [-hx, -hy, hz],
            [hx, -hy, hz],
            [hx, hy, hz],
            [-hx, hy, hz],
        ]
    )
    # outward-facing triangles, two per side
    f = np.array(
        [
            [0, 2, 1], [0, 3, 2],  # bottom
            [4, 5, 6], [4, 6, 7],  # top
            [0, 1, 5], [0, 5, 4],  # -y
            [2, 3, 7], [2, 7, 6],  # +y
            [1, 2, 6], [1, 6, 5],  # +x
            [3, 0, 4], [3, 4, 7],  # -x
        ]
    )
    return TriMesh(v, f)


def frustum(r_bottom, r_top, height, segments=24):
    """Truncated cone around +z, base at -height/2; watertight with cap fans."""
    hz = height / 2.0
    ang = 2.0 * np.pi * np.arange(segments) / segments
    bottom_ring = np.stack([r_bottom * np.cos(ang), r_bottom * np.sin(ang), np.full(segments, -hz)], axis=1)
    top_ring = np.stack([r_top * np.cos(ang), r_top * np.sin(ang), np.full(segments, hz)], axis=1)
    verts = [bottom_ring, top_ring, np.array([[0.0, 0.0, -hz]]), np.array([[0.0, 0.0, hz]])]
    v = np.concatenate(verts, axis=0)
    bc = 2 * segments      # bottom center
    tc = 2 * segments + 1  # top center
    faces = []
    for i in range(segments):
        j = (i + 1) % segments
        bi, bj = i, j
        ti, tj = segments + i, segments + j
        faces.append([bi, bj, tj])
        faces.append([bi, tj, ti])
        faces.append([bc, bj, bi])  # bottom cap (faces -z)
        faces.append([tc, ti, tj])  # top cap (faces +z)
    return TriMesh(v, np.array(faces))


def cylinder(radius, height, segments=24):
    return frustum(radius, radius, height, segments)


def icosphere(radius, subdivisions=2):
    """Subdivided icosahedron projected to the sphere."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    v = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=np.float64,
    )
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    f = [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ]
    verts = [tuple(p) for p in v]
    index = {p: i for i, p in enumerate(verts)}

    def midpoint(i, j):
        p = np.asarray(verts[i]) + np.asarray(verts[j])
        p /= np.linalg.norm(p)
        key = tuple(np.round(p, 12))
        if key not in index:
            index[key] = len(verts)
            verts.append(key)
        return index[key]

    for _ in range(subdivisions):
        nxt = []
        for a, b, c in f:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            nxt += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        f = nxt
    v = np.asarray(verts, dtype=np.float64) * radius
    return TriMesh(v, np.array(f))


def merge(meshes):
    """Concatenate meshes into one triangle soup (parts stay closed)."""
    verts = []
    faces = []
    offset = 0
    for m in meshes:
        verts.append(m.vertices)
        faces.append(m.faces + offset)
        offset += m.num_vertices
    return TriMesh(np.concatenate(verts), np.concatenate(faces))


def lamp(base_radius=0.16, base_height=0.05, pole_radius=0.025, pole_height=0.95,
         shade_r_bottom=0.17, shade_r_top=0.10, shade_height=0.28, segments=20):
    """Floor-lamp-like compound: base disk, pole, shade; parts separated by
    tiny gaps so ray-parity inside tests stay unambiguous."""
    gap = 1e-4
    parts = []
    z = 0.0
    b = cylinder(base_radius, base_height, segments)
    parts.append(b.transformed(np.eye(3), [0, 0, z + base_height / 2.0]))
    z += base_height + gap
    p = cylinder(pole_radius, pole_height, segments)
    parts.append(p.transformed(np.eye(3), [0, 0, z + pole_height / 2.0]))
    z += pole_height + gap
    s = frustum(shade_r_bottom, shade_r_top, shade_height, segments)
    parts.append(s.transformed(np.eye(3), [0, 0, z + shade_height / 2.0]))
    return merge(parts)
