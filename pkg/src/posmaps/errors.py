"""Exception hierarchy shared by all modules."""


class PosMapsError(ValueError):
    """Base class for every error raised by this package."""


class NotHermitian(PosMapsError):
    pass


class NoConvergence(PosMapsError, RuntimeError):
    pass


class NotUnitary(PosMapsError):
    pass


class DimensionMismatch(PosMapsError):
    pass


class NotRankOneProjector(PosMapsError):
    pass


class NotNormalized(PosMapsError):
    pass


class NotSymmetry(PosMapsError):
    pass


class NotReducible(PosMapsError):
    """Raised when a bipartite operator is not locally equivalent to the swap.

    ``reason`` is one of ``"partial-transpose not rank-one"`` or
    ``"not maximally entangled"``.
    """

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail
        msg = reason if not detail else f"{reason}: {detail}"
        super().__init__(msg)


class OutOfRange(PosMapsError):
    pass


class SingularSum(PosMapsError):
    pass


class NotCanonical(PosMapsError):
    pass


class ResidualTooLarge(PosMapsError):
    pass


class WeightViolation(PosMapsError):
    pass
