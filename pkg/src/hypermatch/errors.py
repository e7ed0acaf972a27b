"""Exception types shared by every module."""


class InvalidInput(ValueError):
    """Malformed arguments: out-of-range positions, non-crossing tuples, bad files."""


class HypothesisUnmet(ValueError):
    """A precondition of a guaranteed-regime algorithm does not hold."""


class InvariantViolation(RuntimeError):
    """A step that should be impossible to fail did fail.

    ``state`` carries enough of the run to reproduce it.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = dict(state or {})

    def __str__(self):
        base = super().__str__()
        if not self.state:
            return base
        return f"{base} (state: {self.state!r})"
