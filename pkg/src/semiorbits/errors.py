"""Exception hierarchy shared across the package.

Every error carries an ``exit_code`` used by the command line front end:
2 for usage/parse problems, 3 for violated mathematical preconditions,
4 for resource guards (size caps, explosion guards).
"""


class SemiorbitsError(Exception):
    """Base class for all package errors."""

    exit_code = 3


class CompositeModulus(SemiorbitsError):
    """The characteristic passed for a field is not prime."""


class DegreeOutOfRange(SemiorbitsError):
    """Extension degree outside the supported range (1 <= s <= 16)."""

    exit_code = 4


class TooLarge(SemiorbitsError):
    """A size cap was exceeded (field size, graph size, ...)."""

    exit_code = 4


class ZeroElement(SemiorbitsError):
    """Zero was passed where a unit of the field is required."""


class ZeroArgument(SemiorbitsError):
    """Zero was passed where a nonzero integer is required."""


class OutOfRange(SemiorbitsError):
    """An integer argument lies outside its documented range."""


class ZeroPolynomial(SemiorbitsError):
    """The zero polynomial was passed where a nonzero one is required."""


class EmptySystem(SemiorbitsError):
    """A generator system must contain at least one polynomial."""


class DegreeTooSmall(SemiorbitsError):
    """A polynomial of degree >= 2 is required."""


class LetterOutOfRange(SemiorbitsError):
    """A word letter lies outside [1, k]."""


class DegenerateGenerator(SemiorbitsError):
    """A generator dropped below degree 2 after reduction mod p."""


class ExplosionGuard(SemiorbitsError):
    """An exhaustive enumeration would exceed its guard."""

    exit_code = 4


class Truncated(SemiorbitsError):
    """An orbit hit its cap, so the requested quantity is not exact."""


class HypothesisViolated(SemiorbitsError):
    """The hypothesis of a counting statement does not hold for the input."""


class EmptyReport(SemiorbitsError):
    """Summary statistics were requested for a report with no usable rows."""


class SpecialGenerator(SemiorbitsError):
    """A generator is linearly conjugate to a monomial or Chebyshev form."""


class PolynomialParseError(SemiorbitsError):
    """Polynomial text could not be parsed; ``position`` is the offset."""

    exit_code = 2

    def __init__(self, message, position):
        super().__init__("%s at position %d" % (message, position))
        self.position = position


class ConfigError(SemiorbitsError):
    """An experiment configuration violates a documented guard."""

    exit_code = 4
