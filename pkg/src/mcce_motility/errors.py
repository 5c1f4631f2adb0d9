"""Exception types raised by the library.

Every domain error carries a stable ``code`` (the class name) so the CLI can
emit machine-readable error records.
"""


class MotilityError(Exception):
    """Base class for domain errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class FrameFormatError(MotilityError):
    """A frame file is missing, undecodable, or inconsistent with its sequence."""


class DimensionMismatch(MotilityError, ValueError):
    pass


class SequenceTooShort(MotilityError, ValueError):
    pass


class NoPeriodicity(MotilityError):
    """No qualifying local minimum of the interval curve lies in range."""


class EmptyRange(MotilityError):
    """The interval curve has no points inside the search bounds."""


class EmptyCurve(MotilityError):
    """The sequence is too short for every candidate interval."""


class ParseError(MotilityError, ValueError):
    pass
