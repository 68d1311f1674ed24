"""Exception hierarchy shared by all pachner modules."""


class PachnerError(Exception):
    """Base class for all library errors."""


class ValidationError(PachnerError):
    """Input does not describe a triangulated 2-sphere."""


class ParseError(PachnerError):
    """Malformed triangulation or certificate text."""


class UnknownVertex(PachnerError):
    pass


class UnknownEdge(PachnerError):
    pass


class UnknownTriangle(PachnerError):
    pass


class IllegalFlip(PachnerError):
    """Edge flip not applicable; .reason is 'missing-triangles' or 'diagonal-exists'."""

    def __init__(self, reason, message=None):
        self.reason = reason
        super().__init__(message or reason)


class IllegalMove(PachnerError):
    """2-move not applicable; .reason is 'degree-not-3' or 'triangle-exists'."""

    def __init__(self, reason, message=None):
        self.reason = reason
        super().__init__(message or reason)


class ReplayError(PachnerError):
    """Certificate replay broke down; .step is the failing move index."""

    def __init__(self, step, reason):
        self.step = step
        self.reason = reason
        super().__init__(f"step {step}: {reason}")


class NotStacked(PachnerError):
    pass


class NotStacked0(PachnerError):
    """Sphere is not stacked with dual-tree degrees at most three."""


class NotPathDual(PachnerError):
    pass


class NotFlag(PachnerError):
    pass


class NotProper(PachnerError):
    pass


class NotQuadDisc(PachnerError):
    """Region is not the hub-and-diagonal quadrilateral disc expected here."""


class IsGamma(PachnerError):
    """Input is the double cone, which the requested operation excludes."""


class BadSize(PachnerError):
    pass


class SizeLimit(PachnerError):
    """Requested size exceeds the configured enumeration cap."""


class UnsupportedSize(PachnerError):
    pass


class PreconditionFailed(PachnerError):
    pass


class PredicateFailed(PachnerError):
    pass


class InternalBound(PachnerError):
    """A termination guard tripped; indicates a defect, never ignored."""
