"""Exception types shared across the toolkit.

The CLI maps these onto its exit-code contract: validation failures exit 1,
file/format problems exit 2, domain errors exit 3.
"""


class TermSyntaxError(Exception):
    """Raised when term text does not parse; carries the offending position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownLabelError(Exception):
    """A term label is neither a known name nor a taxonomy type."""


class UnknownTypeError(Exception):
    """A referenced type name is missing from the taxonomy."""


class FormatError(Exception):
    """A structured file is malformed or fails its schema invariants."""


class UnboundSlotError(Exception):
    """An action slot or link variable has no usable binding."""


class TypeMismatchError(Exception):
    """A bound asset's type does not descend from the slot's declared type."""


class InvalidInitialStateError(Exception):
    """The initial state term does not validate against the system model."""


class NoParentTypeError(Exception):
    """Abstraction was asked to lift a type that has no parent."""


class OverlappingSelectionError(Exception):
    """A merge selection contains overlapping activity spans."""


class NotInstantiableError(Exception):
    """A pattern entity has no matching system component."""

    def __init__(self, entity):
        super().__init__(f"no system component matches entity {entity!r}")
        self.entity = entity


class BoundTooSmallError(Exception):
    """The trace length bound is below the number of pattern activities."""


class ValidationFailedError(Exception):
    """A model or script failed validation; carries the violation list."""

    def __init__(self, violations):
        lines = "; ".join(str(v) for v in violations) or "validation failed"
        super().__init__(lines)
        self.violations = list(violations)


class DuplicateHashError(Exception):
    """The pattern store already holds a pattern with this content hash."""
