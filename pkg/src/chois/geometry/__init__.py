"""Object geometry: meshes, BPS features, signed distance fields, rotations."""

from chois.geometry.bps import (
    BasisPointSet,
    BPSFeature,
    RestKeypoints,
    compute_bps,
    sample_basis_points,
    select_rest_keypoints,
)
from chois.geometry.mesh import (
    TriMesh,
    closest_points_on_mesh,
    inside_mesh,
    load_obj,
    ray_crossing_counts,
    save_obj,
)
from chois.geometry.primitives import box, cylinder, frustum, icosphere, lamp, merge
from chois.geometry.rotation import (
    align_vectors,
    matrix_to_rot6d,
    rot6d_to_matrix,
    rot6d_to_matrix_tensor,
    rotation_about_axis,
    transform_points,
    yaw_matrix,
)
from chois.geometry.sdf import SDFGrid, build_sdf, check_watertight, query_sdf

__all__ = [
    "BPSFeature",
    "BasisPointSet",
    "RestKeypoints",
    "SDFGrid",
    "TriMesh",
    "align_vectors",
    "box",
    "build_sdf",
    "check_watertight",
    "closest_points_on_mesh",
    "compute_bps",
    "cylinder",
    "frustum",
    "icosphere",
    "inside_mesh",
    "lamp",
    "load_obj",
    "matrix_to_rot6d",
    "merge",
    "query_sdf",
    "ray_crossing_counts",
    "rot6d_to_matrix",
    "rot6d_to_matrix_tensor",
    "rotation_about_axis",
    "sample_basis_points",
    "save_obj",
    "select_rest_keypoints",
    "transform_points",
    "yaw_matrix",
]
