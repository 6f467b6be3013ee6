"""Exception hierarchy.

Domain errors (the input is outside the algorithm's reach) derive from
:class:`RecolorDomainError`; format problems from :class:`GraphFormatError`;
broken internal invariants from :class:`InternalInvariantError`.
"""


class RecolorError(Exception):
    pass


class GraphFormatError(RecolorError, ValueError):
    """Input could not be parsed or describes a non-simple graph."""


class RecolorDomainError(RecolorError):
    pass


class NotChordal(RecolorDomainError):
    def __init__(self, hole=None):
        self.hole = hole
        msg = "graph is not chordal"
        if hole:
            msg += f" (induced cycle {hole})"
        super().__init__(msg)


class KTooSmall(RecolorDomainError):
    pass


class InvalidColoring(RecolorDomainError, ValueError):
    pass


class StateSpaceTooLarge(RecolorDomainError):
    pass


class NoProperColoring(RecolorDomainError):
    pass


class Disconnected(RecolorDomainError):
    pass


class InfeasibleSpec(RecolorDomainError, ValueError):
    pass


class VertexNotInSubtree(RecolorError, KeyError):
    pass


class InternalInvariantError(RecolorError, AssertionError):
    """A lemma precondition or post-condition failed; indicates a bug."""


class PropernessViolation(InternalInvariantError):
    pass
