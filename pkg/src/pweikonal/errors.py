"""Exception types shared by all modules."""


class PWError(Exception):
    """Base class for library errors."""


class NotRectilinear(PWError):
    """A boundary edge is not axis-parallel in the rotated frame."""


class SelfIntersecting(PWError):
    pass


class HypothesisHViolated(PWError):
    pass


class NotAPartition(PWError):
    pass


class NonManifoldEdge(PWError):
    pass


class UnsupportedBasisIndex(PWError):
    pass


class Infeasible(PWError):
    """The domain is too small to host the requested inner approximation."""


class OutsideBuiltShells(PWError):
    pass


class TooLarge(PWError):
    """An exhaustive search would exceed the configured node budget."""


class NotGridAligned(PWError):
    pass


class EmptyCandidateSet(PWError):
    pass
