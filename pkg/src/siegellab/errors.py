"""Exception types shared across the library."""


class SiegelLabError(Exception):
    """Base class for all library errors."""


class DomainError(SiegelLabError):
    """An input lies outside the mathematical domain of the operation."""


class NearSingularValue(SiegelLabError):
    """The target point is too close to a singular value for a clean inverse branch."""


class NoConvergence(SiegelLabError):
    """An iterative solver failed to converge."""


class SmallDivisorBlowup(SiegelLabError):
    """A small divisor |lambda^k - lambda| fell below the double precision floor."""


class DegenerateOrbit(SiegelLabError):
    """Orbit points coincide with the reference center; winding is undefined."""


class SingularValueOnBoundary(SiegelLabError):
    """A singular value sits on (or too close to) the curve being lifted."""


class LiftDidNotClose(SiegelLabError):
    """Analytic continuation around the boundary has monodromy (degree > 1)."""


class ExperimentDegenerate(SiegelLabError):
    """Too few pullback chains completed to report statistics."""


class DegenerateInterval(SiegelLabError):
    """A circle arc interval is empty or covers the whole circle."""


class PointOnSlit(SiegelLabError):
    """A query point lies on the removed arc of the slit sphere."""


class Disconnected(SiegelLabError):
    """No lattice path joins the two query points inside the domain."""


class CriticalCycle(SiegelLabError):
    """A node of local degree > 1 lies on a cycle; the ramification lcm diverges."""


class NotDivisible(SiegelLabError):
    """Local degree does not divide the ramification value of the image node."""

    def __init__(self, node, message=None):
        self.node = node
        super().__init__(message or f"local degree does not divide nu at image of node {node!r}")


class EvalAtZero(SiegelLabError):
    """The symmetric model is undefined at the origin."""
