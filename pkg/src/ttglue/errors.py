"""Exception types shared across the package."""


class TTGlueError(Exception):
    """Base class for all errors raised by ttglue."""


class UnknownPointError(TTGlueError, KeyError):
    """A subset or map mentions a point id the model does not contain."""

    def __init__(self, ids):
        self.ids = tuple(sorted(ids))
        super().__init__(f"unknown point id(s): {', '.join(self.ids)}")

    def __str__(self):
        return self.args[0]


class NotThomasonError(TTGlueError, ValueError):
    def __init__(self, subset):
        self.subset = tuple(sorted(subset))
        super().__init__(f"subset is not Thomason: {{{', '.join(self.subset)}}}")


class NotSpecializationClosedError(TTGlueError, ValueError):
    def __init__(self, subset):
        self.subset = tuple(sorted(subset))
        super().__init__(
            f"subset is not specialization-closed: {{{', '.join(self.subset)}}}"
        )


class AgreementFailure(TTGlueError):
    """Two formulas that must coincide on a coherent model disagree.

    Raised instead of silently picking one of the values; ``values`` holds
    both results keyed by formula name.
    """

    def __init__(self, message, values):
        self.values = values
        super().__init__(message)


class InvalidDatum(TTGlueError, ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid gluing datum: " + "; ".join(self.problems))


class PreconditionError(TTGlueError, ValueError):
    pass


class BoundExceeded(TTGlueError, ValueError):
    pass


class GroupError(TTGlueError, ValueError):
    pass
