"""Shared exception types.

Every error that crosses a module boundary lives here so the CLI can map
them to exit codes uniformly (2 = bad configuration, 3 = undecidable floor,
4 = cap violation).
"""

from __future__ import annotations


class BracketLabError(Exception):
    """Base class for all library errors."""


class PrecisionCapExceeded(BracketLabError):
    """A refinement was requested beyond the hard precision cap."""


class FloorUndecidable(BracketLabError):
    """The enclosure straddles an integer at the precision cap.

    This signals that the argument may *be* an integer up to 2^-cap; bracket
    semantics depend discontinuously on floors, so we never guess.
    The optional ``path`` names the offending subexpression.
    """

    def __init__(self, message: str, path: tuple[str, ...] = ()):
        super().__init__(message if not path else f"{message} (at {'/'.join(path)})")
        self.path = path


class DomainError(BracketLabError):
    """An argument lies outside an operation's stated domain."""


class ParseError(BracketLabError):
    """Input text does not conform to the grammar.

    Carries the byte offset of the failure and the set of token kinds that
    would have been accepted there.
    """

    def __init__(self, offset: int, expected: frozenset[str], found: str = ""):
        self.offset = offset
        self.expected = frozenset(expected)
        self.found = found
        exp = ", ".join(sorted(self.expected))
        what = f"found {found!r}" if found else "unexpected end of input"
        super().__init__(f"parse error at byte {offset}: {what}; expected one of: {exp}")


class CodingGap(BracketLabError):
    """A word value fell in no cell of the coding."""


class OrderCapExceeded(BracketLabError):
    """Differentiation order above the cap."""


class SignChange(BracketLabError):
    """A function changed sign on a probe grid where a constant sign was required."""


class EmptyInput(BracketLabError):
    """An operation received an empty point set or sequence."""


class BudgetTooSmall(BracketLabError):
    """The evaluation budget left more than half the mass unclassified."""


class ZeroPolynomial(BracketLabError):
    """The zero polynomial has no meaningful sup-norm ratios."""


class HTooLarge(BracketLabError):
    """Requested block length exceeds the word length."""


class DegenerateCurve(BracketLabError):
    """A complexity curve is constant and admits no growth fit."""


class TooShort(BracketLabError):
    """Not enough samples for the requested statistic."""


class LimitExceeded(BracketLabError):
    """A sieve or enumeration limit above the supported maximum."""


class DomainWarning(UserWarning):
    """Positivity of a log/div argument could not be confirmed at the probes."""


class RegimeWarning(UserWarning):
    """Parameters are outside the regime the short-interval estimates target."""
