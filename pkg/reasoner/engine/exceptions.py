"""
Exceptions raised by the reasoning engine.
Views and management commands catch ReasonerError and report its message.
"""


class ReasonerError(Exception):
    """Base class for every engine failure"""


class ParseError(ReasonerError):
    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class ArityError(ReasonerError):
    pass


class RuleError(ReasonerError):
    pass


class TermNotFound(ReasonerError):
    pass


class NotStickyError(ReasonerError):
    def __init__(self, violation):
        self.violation = violation
        super().__init__(f"ruleset is not sticky: {violation}")


class UnsupportedQuery(ReasonerError):
    pass


class TcaError(ReasonerError):
    pass


class CounterOverflow(TcaError):
    pass


class ResourceLimitExceeded(ReasonerError):
    pass


class ChaseLimitExceeded(ResourceLimitExceeded):
    def __init__(self, message, trace=None):
        self.trace = trace
        super().__init__(message)


class RewritingLimitExceeded(ResourceLimitExceeded):
    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


class CountermodelBudgetExhausted(ResourceLimitExceeded):
    pass


class BudgetExpired(ResourceLimitExceeded):
    """The wall-clock deadline passed or the search was cancelled"""


class MergeError(ReasonerError):
    pass
