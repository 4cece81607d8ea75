"""Root of the domain exception hierarchy."""


class BianchiKError(Exception):
    """Base exception for every domain error raised by the engine."""

    pass
