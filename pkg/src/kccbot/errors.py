"""Exception types shared across the package."""


class KccBotError(Exception):
    """Base class for all kccbot errors."""


class InvalidSpec(KccBotError):
    """A fetch spec field fails its format check."""


class NetworkError(KccBotError):
    """The remote endpoint could not be reached."""

    def __init__(self, message: str, spec=None):
        super().__init__(message)
        self.spec = spec


class ParseError(KccBotError):
    """A payload could not be parsed into records."""

    def __init__(self, message: str, spec=None):
        super().__init__(message)
        self.spec = spec


class HeaderMismatch(KccBotError):
    """A CSV header is missing required columns."""

    def __init__(self, missing: list[str]):
        super().__init__(f"missing columns: {', '.join(missing)}")
        self.missing = list(missing)


class EmptyCorpus(KccBotError):
    """No usable documents remain after normalization."""


class DomainError(KccBotError):
    """A numeric argument is outside its mathematical domain."""


class SessionCorrupt(KccBotError):
    """A dialogue session violates its state invariants."""


class ServiceUnready(KccBotError):
    """The gateway has no index loaded yet."""


class InsufficientData(KccBotError):
    """Not enough documents to build the requested evaluation split."""


class EmptyTestSet(KccBotError):
    """An evaluation was requested over zero test pairs."""
