"""Exception hierarchy shared by every module of the package."""


class ModelError(ValueError):
    """Base class for invalid inputs (models, words, expressions)."""


class EmptySegment(ModelError):
    pass


class NoSegments(ModelError):
    pass


class UnknownSymbol(ModelError):
    pass


class DimensionMismatch(ModelError):
    pass


class AlphabetMismatch(ModelError):
    pass


class MalformedId(ModelError):
    pass


class NotLetterBounded(ModelError):
    pass


class UntrimmedGrammar(ModelError):
    pass


class UnassignedVariable(ModelError):
    pass


class UnknownTransition(ModelError):
    pass


class UnknownTargetState(ModelError):
    pass


class NotFlat(ModelError):
    pass


class MalformedCnf(ModelError):
    pass


class ParseError(ModelError):
    """Syntax error in one of the line-oriented text formats."""

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class VerificationMismatch(RuntimeError):
    """A solver-produced witness was rejected by the exact membership test.

    This signals an internal inconsistency and is never expected in practice.
    """
