"""Exception types raised across the package."""


class CifcError(Exception):
    """Base class for all errors raised by :mod:`cifc`."""


class InputError(CifcError, ValueError):
    """Malformed user input (tables, files, names)."""


class EvaluationError(CifcError):
    """A well-formed request that cannot be evaluated."""


# prob_core
class NegativeMass(InputError):
    pass


class MassNotOne(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class UnknownRole(InputError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class OverlappingSets(InputError):
    pass


class AlphabetMismatch(InputError):
    pass


class RoleCollision(InputError):
    pass


# channel_model
class RowNotStochastic(InputError):
    pass


class ParseError(InputError):
    pass


class SchemaViolation(InputError):
    pass


class UnknownName(InputError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


# rate_polytope
class UnknownVariable(InputError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class Unbounded(EvaluationError):
    pass


# bounds_engine
class FactorizationMismatch(EvaluationError):
    pass


class BadCoupling(EvaluationError):
    pass


class NotSemiDeterministic(EvaluationError):
    pass


class NotDeterministic(EvaluationError):
    pass


class UnsupportedBound(EvaluationError):
    pass


# coded_schemes
class EncoderNotCausal(InputError):
    """Encoder 2 output varies with the cognitive message."""
