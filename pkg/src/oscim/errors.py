"""Package-level exception types."""


class SimulationDiverged(RuntimeError):
    """A dynamics backend produced a non-finite state."""


class GraphFormatError(ValueError):
    """A graph/problem file could not be parsed; carries a line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")
