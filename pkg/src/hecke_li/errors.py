"""Exception hierarchy shared by all modules.

The CLI maps these to exit codes: usage/domain problems exit 1, internal
consistency failures exit 2, missing or oversized resources exit 3.
"""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of the operation."""


class ResourceLimitError(RuntimeError):
    """A request exceeds a configured memory/table bound, or a required
    precomputed table is missing.  The message says how to proceed."""


class InternalInconsistencyError(RuntimeError):
    """An invariant that should hold by construction failed (e.g. a trace
    came out non-integral).  Signals a bug, not bad input."""


class ZeroFileParseError(ValueError):
    """A zero-ordinate file is malformed; carries the offending line number."""

    def __init__(self, path, lineno, message):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


class NumericError(RuntimeError):
    """A numerical kernel failed to converge; carries diagnostics."""
