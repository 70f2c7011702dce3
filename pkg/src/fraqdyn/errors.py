"""Exception hierarchy shared by all fraqdyn modules."""


class FraqdynError(Exception):
    """Base class for every error raised by fraqdyn."""


class DomainError(FraqdynError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class ConfigError(FraqdynError, ValueError):
    """A configuration file or override is malformed or violates a constraint."""


class SolverDivergence(FraqdynError, ArithmeticError):
    """The fractional integrator produced a non-finite or runaway state."""

    def __init__(self, step: int, time: float, state):
        self.step = step
        self.time = time
        self.state = state
        super().__init__(
            f"solution diverged at step {step} (t={time:.6g}); state={list(state)}"
        )
