"""Motion data layout, the masked condition block, the 13-joint skeleton.

Per-frame layouts (widths fixed across the package):
  human pose  X_t : 13 joint positions (39) + 13 local 6D rotations (78) = 117
  object pose O_t : centroid position (3) + relative rotation, row-major (9) = 12
  contact     H_t : left hand, right hand in [0,1]                         = 2
  sample      tau_t = [X_t | O_t | H_t]                                    = 131
  condition   S_t   = [O_t | X_t] slots, zero-padded                       = 129

Axes: z is up (floor at z = 0), +y is the rest-pose facing direction.
"""

import json

import numpy as np

from chois.errors import InvalidWaypointFrame, MalformedCondition, ShapeError
from chois.geometry.mesh import closest_points_on_mesh
from chois.geometry.rotation import matrix_to_rot6d, rot6d_to_matrix, yaw_matrix

NUM_JOINTS = 13
POSE_DIM = 117          # 13*3 + 13*6
OBJ_DIM = 12
CONTACT_DIM = 2
SAMPLE_DIM = POSE_DIM + OBJ_DIM + CONTACT_DIM  # 131
COND_DIM = OBJ_DIM + POSE_DIM                  # 129
WAYPOINT_SPACING = 30
FPS = 30

JOINT_NAMES = [
    "root", "spine", "head",
    "l_shoulder", "l_hand", "r_shoulder", "r_hand",
    "l_hip", "l_knee", "l_toe", "r_hip", "r_knee", "r_toe",
]
PARENTS = [-1, 0, 1, 1, 3, 1, 5, 0, 7, 8, 0, 10, 11]

ROOT, SPINE, HEAD = 0, 1, 2
L_SHOULDER, L_HAND, R_SHOULDER, R_HAND = 3, 4, 5, 6
L_HIP, L_KNEE, L_TOE, R_HIP, R_KNEE, R_TOE = 7, 8, 9, 10, 11, 12

REST_ROOT_HEIGHT = 0.90

# bone offsets from parent in the rest pose (meters); the root entry is unused
REST_OFFSETS = np.array(
    [
        [0.00, 0.00, 0.00],    # root
        [0.00, 0.00, 0.25],    # spine
        [0.00, 0.00, 0.30],    # head
        [0.18, 0.00, 0.22],    # l_shoulder
        [0.05, 0.00, -0.55],   # l_hand
        [-0.18, 0.00, 0.22],   # r_shoulder
        [-0.05, 0.00, -0.55],  # r_hand
        [0.10, 0.00, -0.05],   # l_hip
        [0.00, 0.00, -0.42],   # l_knee
        [0.00, 0.14, -0.43],   # l_toe
        [-0.10, 0.00, -0.05],  # r_hip
        [0.00, 0.00, -0.42],   # r_knee
        [0.00, 0.14, -0.43],   # r_toe
    ]
)


class Skeleton:
    """Fixed tree of 13 joints with constant rest-pose bone offsets."""

    def __init__(self, names=None, parents=None, offsets=None):
        self.names = list(names or JOINT_NAMES)
        self.parents = list(parents or PARENTS)
        self.offsets = np.array(offsets if offsets is not None else REST_OFFSETS, dtype=np.float64)

    @property
    def num_joints(self):
        return len(self.names)

    def bone_lengths(self):
        return np.linalg.norm(self.offsets[1:], axis=1)

    def edges(self):
        return [(self.parents[j], j) for j in range(1, self.num_joints)]


DEFAULT_SKELETON = Skeleton()


def forward_kinematics(skeleton, root_pos, rotations6d):
    """Compose local 6D rotations down the tree; returns (J,3) joint positions."""
    rot = rot6d_to_matrix(np.asarray(rotations6d, dtype=np.float64).reshape(-1, 6))
    n = skeleton.num_joints
    pos = np.zeros((n, 3))
    glob = np.zeros((n, 3, 3))
    pos[0] = np.asarray(root_pos, dtype=np.float64)
    glob[0] = rot[0]
    for j in range(1, n):
        p = skeleton.parents[j]
        glob[j] = glob[p] @ rot[j]
        pos[j] = pos[p] + glob[p] @ skeleton.offsets[j]
    return pos


# ---------------------------------------------------------------------------
# array views over the fixed layouts
# ---------------------------------------------------------------------------

def x_positions(X):
    """(T,117) -> (T,13,3) view of global joint positions."""
    X = np.asarray(X)
    return X[..., : NUM_JOINTS * 3].reshape(X.shape[:-1] + (NUM_JOINTS, 3))

def x_rotations6d(X):
    """(T,117) -> (T,13,6) view of local joint rotations."""
    X = np.asarray(X)
    return X[..., NUM_JOINTS * 3 :].reshape(X.shape[:-1] + (NUM_JOINTS, 6))

def o_positions(O):
    return np.asarray(O)[..., :3]

def o_rotations(O):
    O = np.asarray(O)
    return O[..., 3:].reshape(O.shape[:-1] + (3, 3))


class InteractionSample:
    """One paired human-object sequence: X (T,117), O (T,12), H (T,2)."""

    def __init__(self, X, O, H):
        self.X = np.asarray(X, dtype=np.float64)
        self.O = np.asarray(O, dtype=np.float64)
        self.H = np.asarray(H, dtype=np.float64)
        if not (len(self.X) == len(self.O) == len(self.H)):
            raise ShapeError("X, O, H must share the same number of frames")
        if self.X.shape[1:] != (POSE_DIM,) or self.O.shape[1:] != (OBJ_DIM,) or self.H.shape[1:] != (CONTACT_DIM,):
            raise ShapeError(
                f"bad widths: X{self.X.shape} O{self.O.shape} H{self.H.shape}"
            )

    @property
    def T(self):
        return len(self.X)

    def copy(self):
        return InteractionSample(self.X.copy(), self.O.copy(), self.H.copy())


def pack(sample):
    """InteractionSample -> (T,131) array."""
    return np.concatenate([sample.X, sample.O, sample.H], axis=1)


def unpack(tau):
    """(T,131) array -> InteractionSample."""
    tau = np.asarray(tau, dtype=np.float64)
    if tau.ndim != 2 or tau.shape[1] != SAMPLE_DIM:
        raise ShapeError(f"expected (T,{SAMPLE_DIM}), got {tau.shape}")
    return InteractionSample(
        tau[:, :POSE_DIM],
        tau[:, POSE_DIM : POSE_DIM + OBJ_DIM],
        tau[:, POSE_DIM + OBJ_DIM :],
    )


# ---------------------------------------------------------------------------
# condition block
# ---------------------------------------------------------------------------

def intermediate_waypoint_frames(T):
    """The complete set of intermediate slots: multiples of 30 below T-1."""
    return [f for f in range(WAYPOINT_SPACING, T - 1, WAYPOINT_SPACING)]


class ConditionBlock:
    """Zero-padded (T,129) conditioning tensor; see module docstring."""

    def __init__(self, data):
        self.data = np.asarray(data, dtype=np.float64)
        if self.data.ndim != 2 or self.data.shape[1] != COND_DIM:
            raise ShapeError(f"expected (T,{COND_DIM}), got {self.data.shape}")

    @property
    def T(self):
        return len(self.data)

    def init_object(self):
        return self.data[0, :OBJ_DIM]

    def init_human(self):
        return self.data[0, OBJ_DIM:]

    def waypoints_xy(self):
        return [(f, self.data[f, 0], self.data[f, 1]) for f in intermediate_waypoint_frames(self.T)]

    def final_xyz(self):
        return self.data[-1, 0:3]

    def validate(self):
        if self.T < 2:
            raise MalformedCondition("condition block needs at least 2 frames")
        if not np.any(self.data[0]):
            raise MalformedCondition("frame-0 initial-state slots are empty")
        return self


def build_condition_block(init_human, init_object, waypoints_xy, final_xyz, T):
    """Lay out initial states and sparse waypoints; everything else is zero.

    ``waypoints_xy`` must cover exactly the frames {30, 60, ...} below T-1.
    """
    if T < 2:
        raise InvalidWaypointFrame(f"T={T} leaves no room for a final waypoint")
    init_human = np.asarray(init_human, dtype=np.float64).reshape(POSE_DIM)
    init_object = np.asarray(init_object, dtype=np.float64).reshape(OBJ_DIM)
    final_xyz = np.asarray(final_xyz, dtype=np.float64).reshape(3)

    expected = intermediate_waypoint_frames(T)
    got = [int(f) for f, _, _ in waypoints_xy]
    for f in got:
        if f % WAYPOINT_SPACING != 0 or f >= T - 1 or f <= 0:
            raise InvalidWaypointFrame(
                f"waypoint frame {f} is not an intermediate multiple of {WAYPOINT_SPACING} below T-1={T - 1}"
            )
    if got != expected:
        raise InvalidWaypointFrame(f"waypoint frames {got} != required {expected}")

    S = np.zeros((T, COND_DIM))
    S[0, :OBJ_DIM] = init_object
    S[0, OBJ_DIM:] = init_human
    for f, x, y in waypoints_xy:
        S[int(f), 0] = x
        S[int(f), 1] = y
    S[T - 1, 0:3] = final_xyz
    return ConditionBlock(S)


def condition_from_sample(sample):
    """Self-consistent condition block read off a sample's own tracks."""
    frames = intermediate_waypoint_frames(sample.T)
    pos = o_positions(sample.O)
    way = [(f, pos[f, 0], pos[f, 1]) for f in frames]
    return build_condition_block(sample.X[0], sample.O[0], way, pos[-1], sample.T)


# ---------------------------------------------------------------------------
# contact labels
# ---------------------------------------------------------------------------

def hand_positions(X):
    """(T,117) -> (T,2,3): left and right hand joint positions."""
    return x_positions(X)[:, [L_HAND, R_HAND], :]


def toe_positions(X):
    return x_positions(X)[:, [L_TOE, R_TOE], :]


def hand_object_distances(X, O, mesh):
    """Distance from each hand to the posed mesh surface, per frame: (T,2).

    Hands are pulled back into the rest frame of each frame's object pose,
    so one rest-pose mesh serves every query.
    """
    hands = hand_positions(X)            # (T,2,3)
    rot = o_rotations(O)                 # (T,3,3)
    pos = o_positions(O)                 # (T,3)
    local = np.einsum("tji,thj->thi", rot, hands - pos[:, None, :])
    _, dist, _ = closest_points_on_mesh(mesh, local.reshape(-1, 3))
    return dist.reshape(hands.shape[:2])


def derive_contact_labels(X, O, mesh, threshold=0.05):
    """1 where the hand is strictly closer than ``threshold`` to the surface."""
    dist = hand_object_distances(X, O, mesh)
    return (dist < threshold).astype(np.float64)


# ---------------------------------------------------------------------------
# window canonicalization
# ---------------------------------------------------------------------------

class PlanarTransform:
    """Floor-preserving rigid transform: yaw about z plus an xy offset.

    canonical = R @ (p - t); world = R^T @ p + t. The z coordinate passes
    through untouched so floor-relative quantities survive the round trip.
    """

    def __init__(self, yaw, txy, degenerate_facing=False):
        self.yaw = float(yaw)
        self.t = np.array([txy[0], txy[1], 0.0])
        self.R = yaw_matrix(self.yaw)
        self.degenerate_facing = bool(degenerate_facing)

    def is_identity(self, tol=1e-12):
        return abs(self.yaw) < tol and np.abs(self.t).max() < tol

    def to_canonical_points(self, pts):
        return (np.asarray(pts) - self.t) @ self.R.T

    def to_world_points(self, pts):
        return np.asarray(pts) @ self.R + self.t

    def to_canonical_rot(self, R):
        return self.R @ R

    def to_world_rot(self, R):
        return self.R.T @ R


def _apply_planar(X, O, fn_pts, fn_rot):
    Xp = X.copy()
    Op = O.copy()
    pos = x_positions(Xp)
    pos[:] = fn_pts(pos.reshape(-1, 3)).reshape(pos.shape)
    r6 = x_rotations6d(Xp)
    root_R = rot6d_to_matrix(r6[:, 0, :])
    r6[:, 0, :] = matrix_to_rot6d(fn_rot(root_R))
    opos = o_positions(Op)
    opos[:] = fn_pts(opos)
    orot = o_rotations(Op)
    orot[:] = fn_rot(orot)
    return Xp, Op


def canonicalize_window(X, O):
    """Re-express a window with the frame-0 root at the xy origin, facing +y.

    Returns (X', O', PlanarTransform); the transform's inverse restores the
    inputs. Facing is the root rotation's +y column projected to the floor;
    a near-vertical facing falls back to +y and flags the transform.
    """
    X = np.asarray(X, dtype=np.float64)
    O = np.asarray(O, dtype=np.float64)
    root0 = x_positions(X)[0, ROOT]
    R0 = rot6d_to_matrix(x_rotations6d(X)[0, ROOT])
    fwd = R0[:, 1]
    fx, fy = fwd[0], fwd[1]
    degenerate = bool(np.hypot(fx, fy) < 1e-6)
    yaw = 0.0 if degenerate else float(np.arctan2(fx, fy))
    tr = PlanarTransform(yaw, (root0[0], root0[1]), degenerate)
    Xc, Oc = _apply_planar(X, O, tr.to_canonical_points, tr.to_canonical_rot)
    return Xc, Oc, tr


def uncanonicalize_window(X, O, transform):
    """Inverse of :func:`canonicalize_window` for the same transform."""
    return _apply_planar(
        np.asarray(X, dtype=np.float64),
        np.asarray(O, dtype=np.float64),
        transform.to_world_points,
        transform.to_world_rot,
    )


# ---------------------------------------------------------------------------
# sequence files
# ---------------------------------------------------------------------------

def save_sequence(path, sample, text=None, fps=FPS):
    doc = {
        "fps": fps,
        "T": sample.T,
        "joint_names": JOINT_NAMES,
        "X": sample.X.tolist(),
        "O": sample.O.tolist(),
        "H": sample.H.tolist(),
    }
    if text is not None:
        doc["text"] = text
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_sequence(path):
    """Returns (InteractionSample, text-or-None)."""
    with open(path) as fh:
        doc = json.load(fh)
    sample = InteractionSample(np.array(doc["X"]), np.array(doc["O"]), np.array(doc["H"]))
    return sample, doc.get("text")
