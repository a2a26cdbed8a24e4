"""Exception hierarchy shared by every degspec module."""


class DegspecError(Exception):
    """Base class for all degspec errors."""


class DimensionError(DegspecError, ValueError):
    """Shapes, ranks or codimensions do not fit together."""


class ParameterError(DegspecError, ValueError):
    """A numeric parameter is out of its allowed range."""


class CapabilityError(DegspecError):
    """The object does not carry the data needed for the request."""


class NonDominantError(DegspecError, ValueError):
    """A map is (or became) non-dominant."""


class ModelSpecError(DegspecError, ValueError):
    """Unknown built-in model name or parameter out of range."""


class ModelDataError(DegspecError):
    """Model data is inconsistent (e.g. cone generators do not span)."""


class NotAmpleError(DegspecError, ValueError):
    """A class expected to be ample has non-positive top self-intersection."""


class IngestionError(DegspecError, ValueError):
    """Malformed JSON input."""
