"""Exception types shared across the toolkit."""


class TowerkitError(Exception):
    """Base class for all toolkit errors."""


class ParseError(TowerkitError, ValueError):
    """Malformed word or expression text.

    ``position`` is the 0-based character offset where parsing failed.
    """

    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        super().__init__(f"{message} (at position {position})")


class RankError(TowerkitError, ValueError):
    """A generator index lies outside the ambient free group."""


class CapMismatchError(TowerkitError, ValueError):
    """Binary series operation on series with different truncation caps."""


class ResourceLimitError(TowerkitError, RuntimeError):
    """A configured size bound (terms, word length, cap ceiling) would be exceeded."""


class PreconditionError(TowerkitError, ValueError):
    """An operation's documented precondition does not hold."""


class UnsupportedMatrixError(TowerkitError, ValueError):
    """A boundary matrix left the monomial (0 or +-g) regime."""


class TransportError(TowerkitError, ValueError):
    """Witness transport to a subsequence cannot be carried out."""
