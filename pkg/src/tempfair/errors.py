"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An operation was called outside its precondition."""


class ResourceLimitError(RuntimeError):
    """An exhaustive search would exceed (or did exceed) its configured budget.

    Distinct from a negative answer: nothing can be concluded when this is raised.
    """


class InternalDefect(AssertionError):
    """A state that the underlying theorems rule out was reached."""
