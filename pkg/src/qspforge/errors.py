"""Exception hierarchy. Every domain error derives from QSPForgeError."""


class QSPForgeError(ValueError):
    """Base class for all domain errors raised by qspforge."""


class NotHermitian(QSPForgeError):
    pass


class NegativeEigenvalue(QSPForgeError):
    pass


class AlphaTooSmall(QSPForgeError):
    pass


class NotContraction(QSPForgeError):
    pass


class BadBlockStructure(QSPForgeError):
    pass


class DimensionMismatch(QSPForgeError):
    pass


class BetaOutOfRange(QSPForgeError):
    pass


class AllZero(QSPForgeError):
    pass


class TooManyTerms(QSPForgeError):
    pass


class EntryOutOfRange(QSPForgeError):
    pass


class DimensionNotPowerOfTwo(QSPForgeError):
    pass


class XOutOfRange(QSPForgeError):
    pass


class NotUnitary(QSPForgeError):
    pass


class NotHermitianPayload(QSPForgeError):
    pass


class ConventionMismatch(QSPForgeError):
    pass


class NotAdmissible(QSPForgeError):
    pass


class NoConvergence(QSPForgeError):
    pass


class BadEps(QSPForgeError):
    pass


class PolynomialOverflow(QSPForgeError):
    pass


class InfeasibleDegree(QSPForgeError):
    pass


class ZeroProbability(QSPForgeError):
    pass


class LengthMismatch(QSPForgeError):
    pass


class ParseError(QSPForgeError):
    """Malformed input file. ``lineno`` is 1-based, or None for whole-file errors."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class IoError(QSPForgeError):
    pass
