"""Error taxonomy shared by all imcflab modules.

Plain ``ValueError`` is used for malformed arguments; the classes here mark
conditions that arise from the geometry or the dynamics themselves, so batch
drivers can tell a bad input apart from a run that genuinely broke down.
"""


class ImcflabError(Exception):
    """Base class for domain errors raised by imcflab."""


class DegenerateShapeError(ImcflabError):
    """A radial profile produced a non-star-shaped embedding (some r <= 0)."""


class DegenerateMeshError(ImcflabError):
    """A mesh element collapsed below the resolvable area/length threshold."""


class CurvatureCollapseError(ImcflabError):
    """Mean curvature fell to (or below) the configured floor at some vertex."""

    def __init__(self, message, vertex=None, value=None):
        super().__init__(message)
        self.vertex = vertex
        self.value = value


class StarShapeLossError(ImcflabError):
    """A flow step drove some radius to r <= 0."""


class NumericalBlowupError(ImcflabError):
    """A nonfinite quantity appeared during time integration."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class HypothesisViolationError(ImcflabError):
    """A check's geometric hypothesis (e.g. H > 0 everywhere) does not hold."""


class InsufficientDataError(ImcflabError):
    """A fit or check was asked to run on too few samples."""


class SolverFailureError(ImcflabError):
    """An iterative solver failed to reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateSpectrumError(ImcflabError):
    """No usable spectral gap above the constant mode was found."""


class DataError(ImcflabError):
    """A time series handed to a check contains unusable values."""
