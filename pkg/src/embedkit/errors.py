"""Exception hierarchy shared by all embedkit modules."""


class EmbedkitError(Exception):
    """Base class for all errors raised by embedkit."""


class SingularPoint(EmbedkitError, ValueError):
    """A weight was evaluated on its singular set with a negative exponent."""


class QuadratureFailure(EmbedkitError, ArithmeticError):
    """The quadrature error estimate could not be pushed below tolerance."""


class NonIntegrableWeight(QuadratureFailure):
    """The weight is not integrable on the requested cube."""


class NonIntegrableDual(NonIntegrableWeight):
    """``w^{-1/(p-1)}`` is not integrable on the requested cube."""


class DegenerateAbscissa(EmbedkitError, ValueError):
    pass


class WindowTooLarge(EmbedkitError, ValueError):
    pass


class UnsupportedQuery(EmbedkitError, ValueError):
    """No characterization covers this combination of parameters."""


class ResolutionTooLow(EmbedkitError, ValueError):
    """The grid cannot resolve the requested frequency band."""


class AtomOutsideDomain(EmbedkitError, ValueError):
    pass


class SpecError(EmbedkitError, ValueError):
    """Malformed JSON or dict input."""
