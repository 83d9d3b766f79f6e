"""
Exception hierarchy for the spreading toolkit.

Every numerical failure surfaces as a subclass of SpreadingError so the
command line can map it to an exit code without string matching.
"""


class SpreadingError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(SpreadingError, ValueError):
    """Kinetic parameters violate positivity or the monostable ordering."""


class DegenerateDenominatorError(SpreadingError, ZeroDivisionError):
    """A closed-form condition divides by a vanishing quantity."""


class ClassificationConflictError(SpreadingError):
    """Two mutually exclusive sufficient conditions fired together."""


class IntegrationError(SpreadingError):
    """An ODE integration failed or left the invariant box."""


class PoleError(SpreadingError, ZeroDivisionError):
    """Evaluation at a pole of a rational expression."""


class DomainError(SpreadingError):
    """Base class for mask construction and geometric query failures."""


class EmptyMaskError(DomainError):
    """A generator produced no inside cells."""


class DisconnectedMaskError(DomainError):
    """The inside region has more than one 4-connected component."""

    def __init__(self, components: int, detail: str = ""):
        self.components = components
        message = f"mask has {components} connected components"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class ResolutionError(DomainError):
    """Grid spacing too coarse for the requested geometry."""


class NotStronglyUnboundedError(DomainError):
    """Tube balls stop meeting the mask at truncation scale."""


class PreconditionError(DomainError, ValueError):
    """An input precondition failed: a state outside the unit box, a bad radius, anchor or direction."""


class UnreachableError(DomainError):
    """Two inside cells are not joined by a grid path."""


class BoundViolationError(SpreadingError):
    """A field left [0, 1] by more than the tolerance."""

    def __init__(self, species: str, cell, value: float, t: float):
        self.species = species
        self.cell = tuple(int(c) for c in cell)
        self.value = float(value)
        self.t = float(t)
        super().__init__(
            f"{species}={self.value:.3e} outside [0,1] at cell {self.cell}, t={self.t:.6g}"
        )


class LinearSolveError(SpreadingError):
    """Implicit diffusion solve failed or returned a large residual."""


class OrderingViolationError(SpreadingError):
    """Cooperative ordering of two runs was lost."""

    def __init__(self, violation: float, t: float):
        self.violation = float(violation)
        self.t = float(t)
        super().__init__(f"ordering violated by {self.violation:.3e} at t={self.t:.6g}")


class FrontAtEdgeError(SpreadingError):
    """A tracked front reached the truncation edge."""


class NonMonotonePredicateError(SpreadingError):
    """The wave-existence predicate is not monotone over the bracket."""

    def __init__(self, scan):
        self.scan = list(scan)
        pretty = ", ".join(f"c={c:.6g}:{'ok' if ok else 'fail'}" for c, ok in self.scan)
        super().__init__(f"wave predicate is not monotone over the bracket: {pretty}")


class InsufficientSamplesError(SpreadingError):
    """Too few samples for a regression."""


class EigenConvergenceError(SpreadingError):
    """Inverse iteration did not reach the requested tolerance."""


class RegimeMismatchError(SpreadingError, ValueError):
    """A construction was requested outside its parameter hypothesis."""


class ConfigError(SpreadingError, ValueError):
    """Invalid experiment configuration; message names the field path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class CorruptSnapshotError(SpreadingError):
    """Snapshot file with bad magic, version or size."""

    def __init__(self, path, reason: str):
        self.path = str(path)
        super().__init__(f"corrupt snapshot {self.path}: {reason}")
