class FibautoError(Exception):
    """Base class for library errors."""


class ParseError(FibautoError):
    def __init__(self, message, position=None, line=None):
        self.position = position
        self.line = line
        where = ""
        if line is not None:
            where = f"line {line}: "
        elif position is not None:
            where = f"position {position}: "
        super().__init__(where + message)


class CompileError(FibautoError):
    """Unknown names, arity mismatches, free variables where none are allowed."""


class ResourceExhausted(FibautoError):
    """A state cap or time limit was hit; the question is undecided, not false."""


class StateLimitExceeded(ResourceExhausted):
    def __init__(self, cap):
        self.cap = cap
        super().__init__(f"state limit of {cap} exceeded")


class TimeLimitExceeded(ResourceExhausted):
    def __init__(self):
        super().__init__("time limit exceeded")


class VerificationError(FibautoError):
    """A guessed or loaded automaton failed its mechanical checks."""
