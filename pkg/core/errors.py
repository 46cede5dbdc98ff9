class UrnWalkError(Exception):
    """Base class of every error raised by the toolkit."""


class ContractViolation(UrnWalkError, ValueError):
    """A precondition of an operation does not hold."""


class SieveLimitError(UrnWalkError):
    """An arithmetic table larger than the configured ceiling was requested."""

    def __init__(self, requested: int, limit: int):
        self.requested = requested
        self.limit = limit
        super().__init__(f"requested {requested} exceeds sieve limit {limit}")


class UnsupportedEventError(UrnWalkError):
    pass


class SpecError(UrnWalkError):
    """Experiment document is missing, malformed or inconsistent."""


class InvariantViolation(UrnWalkError):
    pass
