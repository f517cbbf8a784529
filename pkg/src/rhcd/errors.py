"""Exception hierarchy shared across pipeline stages.

The CLI maps these onto exit codes: validation/input problems exit 2,
network failures exit 3, classifier backend failures exit 4.
"""


class PipelineError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PipelineError):
    """Invalid input data or parameters."""


class OsmParseError(ValidationError):
    """Malformed OSM XML; message carries the source line when known."""


class DanglingReferenceError(ValidationError):
    """A way references a node id that does not exist in the document."""


class GridMismatchError(ValidationError):
    """Two rasters/masks that must share a grid geometry do not."""


class UnsupportedFormatError(ValidationError):
    """A raster file uses a feature outside the supported subset."""


class NetworkError(PipelineError):
    """Catalog endpoint or asset fetch failed after retries."""


class ClassifierBackendError(PipelineError):
    """External classifier subprocess misbehaved."""


class SceneSpecError(ValidationError):
    """Synthetic scene specification is inconsistent."""
