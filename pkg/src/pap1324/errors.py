"""Exception types raised across the package."""


class Pap1324Error(Exception):
    """Base class for all package errors."""


# signatures and codec
class SignatureSyntaxError(Pap1324Error, ValueError):
    pass


class EmptySignature(Pap1324Error, ValueError):
    pass


class BlockedPrefix(Pap1324Error, ValueError):
    """A prefix value falls inside a bracket, so the prefix forces a 1324."""


class EncodingOverflow(Pap1324Error, ValueError):
    pass


class MalformedKey(Pap1324Error, ValueError):
    pass


# enumeration and reconstruction
class InsufficientPrimes(Pap1324Error, ValueError):
    pass


class ModulusClash(Pap1324Error, ValueError):
    pass


class BoundExceeded(Pap1324Error, ValueError):
    pass


class CheckFailed(Pap1324Error):
    """Check-prime residues disagree with the reconstructed series."""


class ParseError(Pap1324Error, ValueError):
    """Malformed series or manifest file; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# oracles and analysis
class SizeTooLarge(Pap1324Error, ValueError):
    pass


class DomainError(Pap1324Error, ValueError):
    pass


class SingularWindow(Pap1324Error, ArithmeticError):
    pass


class DegenerateSystem(Pap1324Error, ArithmeticError):
    pass


class InsufficientCoefficients(Pap1324Error, ValueError):
    pass


class MultipleRoot(Pap1324Error, ArithmeticError):
    pass


class NoPhysicalRoot(Pap1324Error):
    pass
