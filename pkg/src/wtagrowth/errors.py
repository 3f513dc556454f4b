"""Exception hierarchy shared by every module."""


class WtaError(Exception):
    """Base class for all library errors."""


class ParseError(WtaError):
    """Malformed input text. ``pos`` is a 0-based character offset."""

    def __init__(self, message, pos=None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at offset {pos})"
        super().__init__(message)


class TreeSyntaxError(ParseError):
    pass


class UnknownSymbol(ParseError):
    pass


class ArityMismatch(ParseError):
    pass


class AlphabetMismatch(WtaError):
    pass


class NoNullarySymbol(WtaError):
    pass


class InvalidAddress(WtaError):
    pass


class NotTrimmed(WtaError):
    pass


class HeavyCyclePresent(WtaError):
    pass


class WitnessReconstructionFailed(WtaError):
    """An internal inconsistency between a detector and its witness."""


class InvalidRun(WtaError):
    pass


class CapExceeded(WtaError):
    pass


class NotUnambiguous(WtaError):
    pass


class OutputSizeCap(CapExceeded):
    pass


class AnnotationExplosion(CapExceeded):
    pass
