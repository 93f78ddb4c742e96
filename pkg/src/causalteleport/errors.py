"""Exception types shared across the package."""


class CausalTeleportError(Exception):
    """Base class for all errors raised by this package."""


class LabelCollisionError(CausalTeleportError):
    """A space-label name occurs more than once where it must be unique."""


class UnknownLabelError(CausalTeleportError):
    """An operation referenced a label name the operator does not carry."""


class NotAPermutationError(CausalTeleportError):
    """A requested label order is not a permutation of the existing labels."""


class BadDimensionError(CausalTeleportError):
    """A dimension argument is not a positive integer or is out of range."""


class ShapeMismatchError(CausalTeleportError):
    """Matrix data does not have the shape implied by its labels."""


class DimMismatchError(CausalTeleportError):
    """Two operators disagree on the dimension of a shared label."""


class LabelMismatchError(CausalTeleportError):
    """An operator does not carry the label set required by the operation."""


class MalformedNetworkError(CausalTeleportError):
    """A factor network violates the one-contraction-per-label rule."""


class ContractTooLargeError(CausalTeleportError):
    """A contraction would materialize an intermediate above the size cap."""


class SpecMismatchError(CausalTeleportError):
    """A protocol spec is inconsistent with the process it is applied to."""


class InvalidInputError(CausalTeleportError):
    """A builder received ill-formed input data."""


class IndexOutOfRangeError(CausalTeleportError):
    """A Bell-basis index lies outside [0, d)."""


class BadStateError(CausalTeleportError):
    """A state vector is not normalized or has the wrong length."""


class ScenarioError(CausalTeleportError):
    """A scenario file failed to parse or failed schema validation."""
