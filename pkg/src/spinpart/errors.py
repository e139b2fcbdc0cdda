"""Shared exception types."""


class CapacityError(RuntimeError):
    """A request exceeds a configured enumeration or memory cap."""


class ParseError(ValueError):
    """An instance file was rejected. ``line_no`` is 1-based."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
