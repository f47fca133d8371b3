"""Exception types shared across the package."""


class IntDensityError(Exception):
    """Base class for all library-specific failures."""


class HorizonError(IntDensityError):
    """A query needs bits at or beyond a stream's evaluation horizon."""


class InsufficientElementsError(IntDensityError):
    """A set holds fewer elements below its horizon than requested."""


class DomainError(IntDensityError):
    """A sampler was queried outside its declared domain."""


class InjectivityError(IntDensityError):
    """Two inputs of a sampler produced the same value."""


class PrefixInconsistencyError(IntDensityError):
    """Two decoded strings disagree at a shared position."""

    def __init__(self, position: int, first_code: int, second_code: int):
        self.position = position
        self.first_code = first_code
        self.second_code = second_code
        super().__init__(
            f"codes {first_code} and {second_code} disagree at bit {position}"
        )


class InvalidTableError(IntDensityError):
    """A step-witness table violates one of its representation invariants."""
