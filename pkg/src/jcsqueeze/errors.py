"""Exception types shared across the package."""


class NumericDomainError(ValueError):
    """An input or intermediate value falls outside the domain of a formula."""


class TruncationError(RuntimeError):
    """The Fock-space cutoff could not capture enough probability mass."""

    def __init__(self, message, tail_mass=float("nan"), cutoff=None):
        super().__init__(message)
        self.tail_mass = tail_mass
        self.cutoff = cutoff


class ConsistencyError(RuntimeError):
    """An internal cross-check between two computation paths disagreed."""
