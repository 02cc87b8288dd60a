"""
Error types raised by the estimators, band builders and I/O layer
"""


class TikbandError(ValueError):
    """Base class for every domain error raised by tikband"""


class InvalidGridError(TikbandError):
    """Grid bounds are not ordered or the point count is too small"""


class DimensionMismatchError(TikbandError):
    """Array shapes disagree with the grids they are attached to"""


class NonPositiveParameterError(TikbandError):
    """A regularization parameter or bandwidth is not strictly positive"""


class EmptySampleError(TikbandError):
    """An estimator received no observations"""


class DegenerateSampleError(TikbandError):
    """The sample cannot identify the estimator (too small, constant instrument)"""


class InvalidGammaError(TikbandError):
    """The band level gamma is outside (0, 1)"""


class NonPsdError(TikbandError):
    """A covariance matrix has materially negative eigenvalues"""


class DegenerateBandError(TikbandError):
    """The band half-width collapsed to zero (zero envelope or zero covariance)"""


class ProcessIndexError(TikbandError):
    """The residual process index is not supported for the model"""


class DataFormatError(TikbandError):
    """An input file is missing columns, has unparseable cells or too few rows"""
