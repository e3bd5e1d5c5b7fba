"""Exception types shared across the package."""


class DiagnosticError(RuntimeError):
    """A numerical self-check failed (refinement disagreement, solver breakdown).

    Raised instead of returning a silently inaccurate value.
    """


class SymbolParseError(ValueError):
    """Malformed symbol specification; carries the offending position."""

    def __init__(self, message: str, spec: str, position: int):
        self.spec = spec
        self.position = position
        super().__init__(f"col {position}: {message} (in {spec!r})")
