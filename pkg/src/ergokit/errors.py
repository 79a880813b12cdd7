"""Exception hierarchy shared by all ergokit modules."""


class ErgokitError(Exception):
    """Base class for all errors raised by ergokit."""


class ValidationError(ErgokitError, ValueError):
    """An input value violates a structural precondition (shape, Hermiticity,
    normalization, enum membership, ...)."""


class DomainError(ErgokitError, ValueError):
    """An input value is structurally fine but outside the mathematical
    domain of the operation (e.g. free energy at beta = 0)."""


class InvariantViolation(ErgokitError, RuntimeError):
    """A quantity that is guaranteed by construction came out wrong.

    Raised by runtime self-checks (bound containment at sample-emission
    time, negative ergotropy beyond tolerance, ...); indicates a bug, not
    bad user input.
    """
