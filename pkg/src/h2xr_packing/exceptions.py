"""Exception hierarchy shared by the geometry, group and optimizer layers."""


class PackingError(Exception):
    """Base class for every error raised by this package."""


class InvalidPointError(PackingError, ValueError):
    """A coordinate tuple does not lie on the upper hyperboloid sheet."""


class NonHyperbolicSignatureError(PackingError, ValueError):
    """The rotation orders (2, p1, p2) describe a Euclidean or spherical group."""


class NoConvergenceError(PackingError, RuntimeError):
    """An iterative root finder ran out of iterations."""


class UnsolvedCaseError(PackingError, RuntimeError):
    """No admissible optimum was found for a packing case."""


class OverlapError(PackingError, RuntimeError):
    """Two balls of a candidate packing intersect.

    ``word`` names the group element whose image of the kernel point lies
    too close, ``distance`` is that distance and ``required`` the minimum
    admissible distance (the ball diameter).
    """

    def __init__(self, word: str, distance: float, required: float):
        self.word = word
        self.distance = distance
        self.required = required
        super().__init__(
            f"overlap with image under {word}: distance {distance:.8f} < {required:.8f}"
        )
