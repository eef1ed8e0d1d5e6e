class MultiCharlierError(ValueError):
    """Base class for every error raised by this package."""


class ParameterError(MultiCharlierError):
    """Parameters or operation preconditions are violated."""


class TruncationError(MultiCharlierError):
    """A coefficient or state was requested above the series cutoff."""


class ConfigError(MultiCharlierError):
    """Run configuration or CLI input is invalid."""


class VerificationError(MultiCharlierError):
    """Independent computation routes disagree."""
