"""Exception types raised by tensorcover."""


class TensorCoverError(Exception):
    """Base class for domain errors (CLI exit status 1)."""


class ShapeError(TensorCoverError, ValueError):
    pass


class ParameterError(TensorCoverError, ValueError):
    pass


class BudgetError(TensorCoverError):
    """A construction or problem would exceed its configured size cap."""


class NumericError(TensorCoverError, ArithmeticError):
    pass


class SymmetryError(TensorCoverError, ValueError):
    def __init__(self, max_deviation):
        self.max_deviation = float(max_deviation)
        super().__init__(
            f"tensor is not symmetric (max deviation {self.max_deviation:.3e})")


class HypothesisError(TensorCoverError, ValueError):
    """A composition lemma was applied outside its hypotheses."""


class DegenerateError(TensorCoverError):
    pass
