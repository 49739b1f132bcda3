class OscillabError(Exception):
    """Base class for every error raised by the services."""


class DomainError(OscillabError, ValueError):
    """A precondition or type invariant was violated by the caller."""


class PropertyViolation(OscillabError, ArithmeticError):
    """A construction produced a value that breaks a guaranteed property."""
