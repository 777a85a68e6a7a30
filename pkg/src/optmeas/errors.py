"""Exception and warning classes raised by optmeas."""


class OptMeasError(Exception):
    """Base class for all package errors."""


class ValidationError(OptMeasError, ValueError):
    """An object violates one of its structural invariants."""

    def __init__(self, invariant: str, residual: float, message: str = ""):
        self.invariant = invariant
        self.residual = float(residual)
        super().__init__(message or f"{invariant} violated (residual {residual:.3e})")


class NotHermitian(ValidationError):
    def __init__(self, residual: float):
        super().__init__("hermitian", residual)


class NotPsd(ValidationError):
    def __init__(self, residual: float):
        super().__init__("psd", residual)


class TraceNotOne(ValidationError):
    def __init__(self, residual: float):
        super().__init__("unit_trace", residual)


class NotComplete(ValidationError):
    def __init__(self, residual: float):
        super().__init__("completeness", residual)


class DimensionMismatch(OptMeasError, ValueError):
    pass


class GridMismatch(OptMeasError, ValueError):
    pass


class OutOfDomain(OptMeasError, ValueError):
    pass


class StatesEqual(OptMeasError, ValueError):
    pass


class OutcomeImpossible(OptMeasError, ValueError):
    pass


class SearchSpaceTooLarge(OptMeasError, RuntimeError):
    pass


class MultiParameterUnsupported(OptMeasError, ValueError):
    pass


class RankDeficientAverage(OptMeasError, ValueError):
    def __init__(self, kernel_dim: int):
        self.kernel_dim = int(kernel_dim)
        super().__init__(
            f"prior-averaged state has a {kernel_dim}-dimensional kernel; "
            "restrict the family to its support first (see restrict_to_support)"
        )


class NotClassicalState(OptMeasError, ValueError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(
            f"family is not classical: states at grid indices {witness.indices} "
            f"have commutator norm {witness.commutator_norm:.3e}"
        )


class NotClassicalReference(OptMeasError, ValueError):
    pass


class WrongLoss(OptMeasError, ValueError):
    pass


class NotRefineable(OptMeasError, ValueError):
    pass


class StateConstant(OptMeasError, ValueError):
    pass


class MeasurementInformative(OptMeasError, ValueError):
    pass


class EstimatorsEqual(OptMeasError, ValueError):
    pass


class ProfilesDiffer(OptMeasError, ValueError):
    pass


class UnsupportedDimension(OptMeasError, ValueError):
    pass


class InvalidRange(OptMeasError, ValueError):
    pass


class OutcomeNeverOccurs(UserWarning):
    """An outcome has zero marginal probability under the prior."""


class EmptyClassicalSubset(UserWarning):
    """No two grid points commute; the classical subset is a single point."""
