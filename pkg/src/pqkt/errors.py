"""Exception hierarchy."""


class PQKTError(Exception):
    """Base class for all errors raised by the engine."""


class ShapeError(PQKTError, ValueError):
    """Array or field dimensions do not match."""


class UnsupportedOrderError(PQKTError, ValueError):
    """Requested jet order exceeds the supported maximum."""


class DegenerateMetricError(PQKTError, ArithmeticError):
    """A matrix that must be inverted is singular or badly conditioned."""


class FrameConstructionError(PQKTError):
    """No adapted frame could be built at a point."""


class SlotMismatchError(PQKTError, ValueError):
    """Contraction slots are invalid for the tensor."""


class NonSkewError(PQKTError, ValueError):
    """Input expected to be skew-symmetric is not."""


class NotParaquaternionicError(PQKTError):
    """A connection does not preserve the paraquaternionic bundle."""


class NoPQKTStructureError(PQKTError):
    """The structure does not admit a PQKT connection at the point."""


class UnsupportedDimensionError(PQKTError):
    """Operation requires n >= 2 (dimension at least 8)."""


class NonPositiveFactorError(PQKTError, ValueError):
    """A conformal factor is not positive on the sample region."""


class ModelConstructionError(PQKTError):
    """A catalog model could not be built from its parameters."""


class ManifestError(PQKTError, ValueError):
    """A manifest could not be parsed; ``where`` locates the problem."""

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)
