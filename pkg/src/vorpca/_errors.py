"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid argument: bad shape, out-of-range rank, nonpositive tolerance..."""


class FormatError(ValueError):
    """Malformed matrix or labels file."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f"{':' if where else 'line '}{line}"
        super().__init__(f"{where}: {message}" if where else message)


class MonotonicityError(RuntimeError):
    """A solver objective increased beyond its slack.

    This signals an implementation bug rather than a property of the data.
    """
