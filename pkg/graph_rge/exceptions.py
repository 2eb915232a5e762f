# exceptions.py
"""Error hierarchy. Every error carries the process exit code the CLI uses."""

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


class RgeError(Exception):
    """Base error with a human-readable detail and an exit code."""

    exit_code = EXIT_DATA

    def __init__(self, detail: str, exit_code: int | None = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class UsageError(RgeError):
    exit_code = EXIT_USAGE


class DatasetFormatError(RgeError):
    """A mandatory dataset file is missing or unreadable."""


class DatasetParseError(RgeError):
    """A token could not be parsed as an integer."""

    def __init__(self, path, line_number: int, token: str):
        super().__init__(f"{path}:{line_number}: cannot parse {token!r} as an integer")
        self.line_number = line_number


class DatasetConsistencyError(RgeError):
    """Dataset files disagree with each other."""

    def __init__(self, detail: str, line_number: int | None = None):
        super().__init__(detail)
        self.line_number = line_number


class PreconditionError(RgeError):
    pass


class StratificationError(RgeError):
    def __init__(self, class_id: int, members: int, folds: int):
        super().__init__(
            f"class {class_id} has {members} members, fewer than the {folds} folds requested"
        )
        self.class_id = class_id


class InfeasibleTransportError(RgeError):
    exit_code = EXIT_NUMERICAL


class DimensionError(RgeError):
    exit_code = EXIT_NUMERICAL


class DegenerateLabelError(RgeError):
    """Training labels contain a single class."""


class NumericalError(RgeError):
    exit_code = EXIT_NUMERICAL


class BudgetExceeded(RgeError):
    """A wall-clock deadline passed in the middle of a computation."""
