"""Exception types shared across the package."""


class ScoremechError(Exception):
    """Base class for all package errors."""


class InvalidParameter(ScoremechError):
    """A configuration value is outside its admissible range."""


class MissingField(InvalidParameter):
    """A required configuration key is absent."""


class UnknownField(InvalidParameter):
    """A configuration contains a key that is not part of the schema."""


class DomainError(ScoremechError):
    """An argument lies outside the mathematical domain of an operation."""


class OutOfRange(DomainError):
    """A requested value cannot be attained anywhere on the feasible set."""


class NoRoot(ScoremechError):
    """A bracketing search found no sign change."""


class NoConvergence(ScoremechError):
    """An iterative routine failed to reach its tolerance."""


class NonMonotone(ScoremechError):
    """Tabulated data violates the required monotonicity."""


class SingularEndpoint(ScoremechError):
    """A closed-form endpoint limit does not exist for this environment."""


class BoundaryTie(ScoremechError):
    """A closed-form regime classification sits exactly on a boundary."""
