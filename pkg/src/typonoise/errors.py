"""Exception types raised across the package."""


class TyponoiseError(Exception):
    """Base class for all package errors."""


class CharacterNotInLayout(TyponoiseError, KeyError):
    pass


class NoNeighborError(TyponoiseError, ValueError):
    pass


class ModelFormatError(TyponoiseError, ValueError):
    pass


class ModelVersionError(ModelFormatError):
    pass


class EmptyDistributionError(TyponoiseError, ValueError):
    pass


class RateUnreachableError(TyponoiseError, ValueError):
    def __init__(self, requested: float, max_rate: float):
        self.requested = requested
        self.max_rate = max_rate
        super().__init__(
            f"error rate {requested:.6g} is unreachable; maximum achievable rate is {max_rate:.6g}"
        )


class AlignmentViolation(TyponoiseError, ValueError):
    pass


class NoEditsError(TyponoiseError, ValueError):
    pass


class EmptySuggestionError(TyponoiseError, ValueError):
    pass


class EmptyCorpusError(TyponoiseError, ValueError):
    pass


class DatasetFormatError(TyponoiseError, ValueError):
    def __init__(self, message: str, index: int | None = None):
        self.index = index
        if index is not None:
            message = f"document {index}: {message}"
        super().__init__(message)
