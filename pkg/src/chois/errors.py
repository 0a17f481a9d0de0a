"""Exception types shared across the package."""


class ChoisError(Exception):
    """Base class for all package-specific errors."""


class ShapeError(ChoisError):
    """Tensor or array shape does not match the operation's contract."""


class MissingGradError(ChoisError):
    """Gradient requested for a tensor that was not on the recorded graph."""


class EmptyBasis(ChoisError):
    """Basis point set with zero points."""


class EmptyMesh(ChoisError):
    """Mesh with no usable faces."""


class InvalidK(ChoisError):
    """Keypoint count exceeds the basis size."""


class OpenMeshError(ChoisError):
    """Mesh failed the watertightness check required for signed distances."""


class DegenerateRotation(ChoisError):
    """6D rotation with a zero first column cannot be orthonormalized."""


class InvalidWaypointFrame(ChoisError):
    """Waypoint frame index violates the 30-frame spacing contract."""


class InvalidStep(ChoisError):
    """Diffusion step index outside [1, N] (or embedding index outside [0, N))."""


class InvalidSchedule(ChoisError):
    """Noise schedule with fewer than two steps or malformed betas."""


class ParseError(ChoisError):
    """Command text outside the templated grammar."""

    def __init__(self, message, token=None):
        super().__init__(message)
        self.token = token


class InfeasibleScenario(ChoisError):
    """Scenario waypoints unreachable at the walking-speed cap."""


class EmptyLibrary(ChoisError):
    """Dataset generation requested with no object meshes."""


class Unreachable(ChoisError):
    """No collision-free path between the given cells."""


class InvalidEndpoint(ChoisError):
    """Path endpoint lies in an occupied or out-of-bounds cell."""


class DegeneratePath(ChoisError):
    """Zero-length path cannot be parameterized."""


class MalformedCondition(ChoisError):
    """Condition block is missing required slots."""


class NumericalError(ChoisError):
    """NaN or non-finite values encountered during sampling."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step
