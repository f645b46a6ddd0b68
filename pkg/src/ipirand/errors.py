"""Exception raised when an input violates an operation's precondition."""


class PreconditionError(ValueError):
    """Invalid input to an analysis or extraction step.

    The message starts with a short machine-friendly reason such as
    ``"empty series"`` or ``"too short"``, followed by details.
    """
