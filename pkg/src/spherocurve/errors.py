"""Exception types shared across the library."""


class SpherocurveError(Exception):
    """Base class for geometry errors raised by this package."""


class DensityError(SpherocurveError):
    """A sample or frame grid is too coarse for the requested operation."""


class CoverError(SpherocurveError):
    """A matrix is not special-orthogonal, or a lift base does not project
    onto the first frame."""


class OrderError(SpherocurveError):
    """Derivative order above the supported maximum (3)."""


class ZeroVectorError(SpherocurveError):
    """A curve sample has (near-)zero norm where a direction is needed."""


class ChartError(SpherocurveError):
    """A coordinate chart precondition (positive chart coordinate) fails."""


class ImmersionError(SpherocurveError):
    """The curve speed vanishes where an immersion is required."""


class DegeneracyError(SpherocurveError):
    """Derivative vectors are linearly dependent beyond tolerance."""


class JacobiError(SpherocurveError):
    """A log-derivative matrix has a non-positive subdiagonal entry."""


class ConvexityError(SpherocurveError):
    """Local convexity fails where it is required."""


class ConditionLError(SpherocurveError):
    """A curve pair violates the speed/curvature coupling condition."""


class ResolutionError(SpherocurveError):
    """Intersection roots cannot be separated at the working grid density."""


class CellError(SpherocurveError):
    """A matrix does not lie in the required factorization cell."""


class EmptyFeasibleError(SpherocurveError):
    """No closed hemisphere contains the curve."""


class PoleError(SpherocurveError):
    """The curve passes through (or too close to) the projection pole."""


class RangeError(SpherocurveError):
    """A numeric parameter is outside its legal range."""
