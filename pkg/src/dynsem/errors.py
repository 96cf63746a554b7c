"""Exception hierarchy shared by every engine and the DSL front end."""

from __future__ import annotations


class DynsemError(Exception):
    """Base class. ``position`` is a ``(line, column)`` pair once known."""

    def __init__(self, message: str, position: tuple[int, int] | None = None):
        super().__init__(message)
        self.message = message
        self.position = position

    def __str__(self) -> str:
        if self.position is None:
            return self.message
        line, col = self.position
        return f"{line}:{col}: {self.message}"


class DomainError(DynsemError):
    """Unknown state, atom, dimension mismatch or mixed state spaces."""


class PreconditionError(DynsemError):
    """An operation was called on arguments violating one of its laws."""


class CapacityError(DynsemError):
    """A finite enumeration would exceed its size limit."""


class EvaluationError(DynsemError):
    pass


class ResolutionError(DynsemError):
    pass


class RankError(DynsemError):
    """Spanning set is empty, zero or linearly dependent."""


class CollapseError(DynsemError):
    pass


class ConditioningError(DynsemError):
    pass


class ParseError(DynsemError):
    def __init__(self, message: str, position: tuple[int, int], excerpt: str = ""):
        super().__init__(message, position)
        self.excerpt = excerpt

    def __str__(self) -> str:
        head = super().__str__()
        return f"{head}\n{self.excerpt}" if self.excerpt else head


class CompileError(DynsemError):
    pass
