"""Exception types raised across the package.

Every error carries a stable ``code`` string so callers that reach the
library through the command line (exit status 2 plus a message on stderr)
or through foreign-language wrappers can dispatch on it without parsing
prose.
"""


class GeoBiasError(Exception):
    """Base class for all errors raised by this package."""

    code = "geobias_error"


class InvalidLocation(GeoBiasError):
    """A coordinate pair is non-finite or the latitude is out of range."""

    code = "invalid_location"


class UndefinedBearing(GeoBiasError):
    """Initial bearing is undefined (coincident points or a pole origin)."""

    code = "undefined_bearing"


class ProjectionDomainError(GeoBiasError):
    """Point lies outside the domain of the local planar projection."""

    code = "projection_domain"


class InvalidRadius(GeoBiasError):
    """Angular radius outside (0, pi/2)."""

    code = "invalid_radius"


class ParseError(GeoBiasError):
    """Malformed input row or document; message names the offending row."""

    code = "parse_error"


class InsufficientData(GeoBiasError):
    """Fewer data points than the operation requires."""

    code = "insufficient_data"


class NoScoreableROI(GeoBiasError):
    """Every candidate region was excluded by the scoreability rule."""

    code = "no_scoreable_roi"


class InvalidScale(GeoBiasError):
    """Grid cell size outside (0, pi)."""

    code = "invalid_scale"


class InvalidLag(GeoBiasError):
    """Ring width outside (0, pi)."""

    code = "invalid_lag"


class InvalidSectorCount(GeoBiasError):
    """Sector count below 2."""

    code = "invalid_sector_count"


class OutOfRangeValue(GeoBiasError):
    """A mark falls outside the histogram's outer bin edges."""

    code = "out_of_range_value"


class LayoutError(GeoBiasError):
    """Two histograms do not share one bin layout."""

    code = "layout_error"


class DivergenceUndefined(GeoBiasError):
    """KL divergence is infinite: q assigns zero mass where p does not."""

    code = "divergence_undefined"


class EmptyPartition(GeoBiasError):
    """A partitioning produced no patches."""

    code = "empty_partition"


class AggregationError(GeoBiasError):
    """Local scores and weights disagree in length or weights do not sum to 1."""

    code = "aggregation_error"


class InsufficientPoints(GeoBiasError):
    """Too few points in a marked pattern for autocorrelation moments."""

    code = "insufficient_points"


class DegeneratePattern(GeoBiasError):
    """Marked pattern has zero mark variance, so Moran's I is undefined."""

    code = "degenerate_pattern"


class DegenerateInput(GeoBiasError):
    """Performance values carry no dispersion to score."""

    code = "degenerate_input"


class EmptyInput(GeoBiasError):
    """An operation received no usable values."""

    code = "empty_input"


class UsageError(GeoBiasError):
    """Invalid configuration or command-line usage."""

    code = "usage_error"


class HyperparameterWarning(UserWarning):
    """Chosen hyperparameters leave regions too sparse for stable scores."""
