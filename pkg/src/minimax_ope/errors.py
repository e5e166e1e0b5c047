"""Exception hierarchy for the package."""


class OPEError(ValueError):
    """Base class for all library errors."""


class NegativeWeight(OPEError):
    pass


class NotNormalized(OPEError):
    pass


class DimensionMismatch(OPEError):
    pass


class InvalidInstance(OPEError):
    pass


class InfiniteRatioObserved(OPEError):
    """An observed action has zero behavior probability."""


class InfiniteRatioOutsideS(OPEError):
    """An action outside the plug-in set has an infinite likelihood ratio."""


class TooLarge(OPEError):
    pass


class DegenerateInterval(OPEError):
    pass


class ZeroDenominator(OPEError):
    pass


class NonPositiveInput(OPEError):
    pass


class NonSquareK(OPEError):
    pass


class MalformedCsv(OPEError):
    pass


class InsufficientMovies(OPEError):
    pass


class ConfigParse(OPEError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownSubcommand(OPEError):
    pass
