"""Exception types shared across the package."""


class SketchInvertError(Exception):
    """Base class for all package errors."""


class BlankImageError(SketchInvertError):
    """Raised when an image contains no foreground content."""


class UnknownAttributeError(SketchInvertError):
    """Raised when an annotation uses a name outside the attribute vocabulary."""


class BrokenPairError(SketchInvertError):
    """Raised when a sketch has no photo with the same instance id in paired mode."""


class AnnotationParseError(SketchInvertError):
    """Raised when an attribute annotation file cannot be parsed."""


class ShapeError(SketchInvertError):
    """Raised when an input has an incompatible shape or size."""


class BatchTooSmallError(SketchInvertError):
    """Raised when a batch statistic needs more rows than were given."""


class NumericalDivergenceError(SketchInvertError):
    """Raised when training produces a non-finite loss."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


class DegenerateFeatureError(SketchInvertError):
    """Raised when a feature vector cannot be normalised (near-zero norm)."""


class EmptyGalleryError(SketchInvertError):
    """Raised when retrieval is attempted against an empty gallery."""


class InvalidKError(SketchInvertError):
    """Raised when a rank cutoff k is not a positive integer."""


class InvalidWeightsError(SketchInvertError):
    """Raised when preference weights do not form a convex combination."""


class CheckpointError(SketchInvertError):
    """Raised when a checkpoint file is missing, corrupt or incompatible."""


class ConfigError(SketchInvertError):
    """Raised when a config file or value is malformed."""
