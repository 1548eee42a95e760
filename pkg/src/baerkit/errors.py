"""Exception types shared across the package."""


class BaerkitError(Exception):
    """Base class for all engine errors."""


class ParseError(BaerkitError):
    """Malformed word or presentation file; carries a 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapacityError(BaerkitError):
    """A job would exceed the configured monomial budget."""


class ClassUndeterminedError(BaerkitError):
    """Nilpotency class could not be detected; an explicit bound is needed."""


class CertificateError(BaerkitError):
    """A claimed nilpotency class bound failed verification."""


class ActionError(BaerkitError):
    """An action table does not define automorphisms of the acted group."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
