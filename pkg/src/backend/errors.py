"""Exception hierarchy shared by every workbench module."""

from typing import Optional


class WorkbenchError(Exception):
    """Base class for all workbench failures."""


class InputError(WorkbenchError, ValueError):
    """Malformed input or a violated precondition."""


class GroupError(InputError):
    pass


class GraphError(InputError):
    pass


class GainError(InputError):
    pass


class MatroidError(InputError):
    pass


class ColouredError(InputError):
    pass


class GadgetError(InputError):
    pass


class FormulaError(InputError):
    """Lexical, grammar or construction-rule failure, with a source position when known."""

    def __init__(self, message: str, position: Optional[int] = None, rule: Optional[str] = None):
        self.position = position
        self.rule = rule
        self.bare_message = message
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


class FormatError(InputError):
    """A text file that does not follow its format."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BudgetExceeded(WorkbenchError, RuntimeError):
    """A search would go past a configured cap."""

    def __init__(self, cap_name: str, cap: int, attempted: int):
        self.cap_name = cap_name
        self.cap = cap
        self.attempted = attempted
        super().__init__(f"{cap_name} exceeded: needs {attempted}, cap is {cap}")


def check_budget(cap_name: str, cap: int, attempted: int) -> None:
    if attempted > cap:
        raise BudgetExceeded(cap_name, cap, attempted)
