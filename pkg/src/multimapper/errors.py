"""Exception types shared across the package.

Every error raised on purpose derives from MultimapperError so callers
(CLI, service) can map the whole family to one exit path.
"""


class MultimapperError(Exception):
    """Base class for all deliberate package errors."""


class InvalidLensAxis(MultimapperError):
    """A coordinate-lens axis index is outside the point dimension."""


class DegenerateLens(MultimapperError):
    """PCA lens requested more directions than the data's rank supports."""


class LensSizeMismatch(MultimapperError):
    """Lens file row count differs from the point count."""


class ParseError(MultimapperError):
    """A CSV cell or a config string could not be parsed."""


class InvalidOverlap(MultimapperError):
    """Cover overlap fraction g is outside [0, 1)."""


class BrickCoverDimension(MultimapperError):
    """Brick covers are defined for 2-dimensional lenses only."""


class UnsupportedScheme(MultimapperError):
    """Operation is not defined for this cover scheme."""


class UnknownBin(MultimapperError):
    """A selector referenced a bin id missing from the cover."""


class CoverageError(MultimapperError):
    """Some lens value is contained in no bin of the cover."""


class UnknownNode(MultimapperError):
    """A request referenced a node id missing from the complex."""


class CorruptSession(MultimapperError):
    """A session file failed to load or verify."""
