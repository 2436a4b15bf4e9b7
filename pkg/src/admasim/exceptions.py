"""Shared exception types."""


class SingularChannelError(ValueError):
    """The channel matrix of a user set is (numerically) rank deficient.

    `pair` identifies the most correlated user pair (0-based indices within
    the offending set) when it could be determined.
    """

    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        super().__init__(message)
        self.pair = pair


class ConfigError(ValueError):
    """Invalid campaign / objective configuration."""
