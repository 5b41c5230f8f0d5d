"""Domain exceptions.

Every exception carries a ``details`` dict so the CLI can turn it into a
machine-readable error record without knowing the concrete class.
"""


class CircleMapError(Exception):
    """Base class for all domain errors raised by this package."""

    def __init__(self, message="", **details):
        super().__init__(message or self.__class__.__name__)
        self.details = details

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self), **self.details}


class NonMonotoneMap(CircleMapError):
    pass


class AmbiguousClass(CircleMapError):
    pass


class RationalDetected(CircleMapError):
    def __init__(self, k):
        super().__init__(f"Gauss orbit hit a rational at step {k}", k=k)
        self.k = k


class RationalRotation(CircleMapError):
    def __init__(self, p, q):
        super().__init__(f"rotation number is exactly {p}/{q}", p=p, q=q)
        self.p = p
        self.q = q


class BracketFailure(CircleMapError):
    pass


class NewtonDivergence(CircleMapError):
    pass


class DegenerateTip(CircleMapError):
    pass


class NoConvergence(CircleMapError):
    def __init__(self, residual, iterations):
        super().__init__(
            f"no convergence after {iterations} iterations (residual {residual:.3e})",
            residual=residual,
            iterations=iterations,
        )
        self.residual = residual
        self.iterations = iterations


class HitCriticalOrbit(CircleMapError):
    def __init__(self, k):
        super().__init__(f"orbit hits the critical point at step {k}", k=k)
        self.k = k


class PeriodicOrbit(CircleMapError):
    def __init__(self, q):
        super().__init__(f"orbit of 0 returns to 0 at time {q}", q=q)
        self.q = q


class CoverFailure(CircleMapError):
    pass


class WrongBranch(CircleMapError):
    pass


class InsufficientLevels(CircleMapError):
    pass


class HypothesisViolated(CircleMapError):
    pass


class ExtraPreimage(CircleMapError):
    pass


class NotCritical(CircleMapError):
    pass


class RootFindingFailure(CircleMapError):
    pass


class BranchAmbiguity(CircleMapError):
    pass


class CommutationFailure(CircleMapError):
    def __init__(self, max_defect):
        super().__init__(f"H_a o G does not commute with a translation (defect {max_defect:.3e})",
                         max_defect=max_defect)
        self.max_defect = max_defect


class InconclusiveReport(CircleMapError):
    pass


class DegenerateNodes(CircleMapError):
    pass
