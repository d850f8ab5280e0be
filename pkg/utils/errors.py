"""
Exception hierarchy for the Wishart moments engine.

Every error carries the process exit code the command line reports for it.
"""


class WishartError(Exception):
    """Base class for all engine errors"""

    exit_code = 1


class BadInputError(WishartError):
    """Invalid arguments, dimension mismatches, non-SPD matrices"""

    exit_code = 2


class HypothesisError(BadInputError):
    """A stated hypothesis or domain condition of a formula does not hold"""

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        message = f"hypothesis violated: {condition}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class CapExceededError(WishartError):
    """A configured size cap was exceeded"""

    exit_code = 3

    def __init__(self, what: str, value: int, cap: int):
        self.what = what
        self.value = value
        self.cap = cap
        super().__init__(f"{what}={value} exceeds cap {cap}")


class CheckFailedError(WishartError):
    exit_code = 1


class ConvergenceError(WishartError):
    exit_code = 1
