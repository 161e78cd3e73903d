"""Exception hierarchy.

Two families: :class:`InputDomainError` for mathematically invalid or
inapplicable requests (CLI exit status 1) and :class:`NumericalError` for
failures of the numerical machinery itself (exit status 2).  Every exception
carries a stable ``code`` equal to its class name, used in machine-readable
CLI output.
"""


class RileySlopesError(Exception):
    """Base class for all package errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class InputDomainError(RileySlopesError):
    """The request is invalid or inapplicable on mathematical grounds."""


class NumericalError(RileySlopesError):
    """The numerical machinery failed to produce a certified answer."""


# -- domain errors ----------------------------------------------------------

class NotTwoBridge(InputDomainError):
    """(p, q) does not describe a 2-bridge knot."""


class NotAKnot(InputDomainError):
    """A continued fraction evaluates to a 2-component link or is degenerate."""


class DegenerateEntry(InputDomainError):
    """A zero entry appeared in an assembled continued fraction."""


class EvenSlopeComponent(InputDomainError):
    """The t = -1 system needs a slope offset with odd numerator and denominator."""


class EvenD(InputDomainError):
    """A longitude scaling exponent must be odd and nonzero."""


class TorusKnot(InputDomainError):
    """The left-orderability pipeline does not apply to torus knots."""


class Inadmissible(InputDomainError):
    """(t, u) lies outside every admissibility region for real conjugation."""


class ZeroT(InputDomainError):
    """Evaluation requested at t = 0, outside the Laurent domain."""


class NoRealSeed(InputDomainError):
    """No real seed point exists on the requested locus."""


class OutOfRange(InputDomainError):
    """Requested slope lies outside the span observed along the branch."""


class NonPositiveArgument(InputDomainError):
    """((t - 1/t)^2 - u) * B^2 <= 0: no real solution of the slope equation here."""


class ZeroB(InputDomainError):
    """B(t, u) = 0: the slope equation degenerates (impossible on P = 0)."""


# -- numerical errors -------------------------------------------------------

class GuardDegenerate(NumericalError):
    """The guard partial derivative is below the floor at the seed (possible fold)."""


class CorrectorDiverged(NumericalError):
    """The Newton corrector failed to converge even at the minimum step size."""


class RecheckFailed(NumericalError):
    """A point failed residual revalidation at doubled precision."""
