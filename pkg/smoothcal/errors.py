"""Exception hierarchy for smoothcal."""


class SmoothcalError(Exception):
    """Base class for every error raised by the package."""


class DomainError(SmoothcalError, ValueError):
    """An argument lies outside the domain of an operation."""


class NumericError(SmoothcalError, ArithmeticError):
    """A computation produced non-finite or otherwise unusable numbers."""


class InvalidDensityError(DomainError):
    """The reconstructed function is not a probability density on [0,1]."""


class SpectralValidityError(NumericError):
    """The covariance implied by a spectral density is not positive definite."""


class SizeError(DomainError):
    """A requested size exceeds what the generator supports."""


class InsufficientDataError(NumericError):
    """Too few usable points to fit a model."""


class RankError(NumericError):
    """A normal-equation system is singular or too badly conditioned."""


class TrigPolynomialError(DomainError):
    """rho(N) vanished, so the function is a trigonometric polynomial."""

    def __init__(self, N):
        super().__init__(f"rho({N}) = 0: trigonometric polynomial, smoothness ratio undefined")
        self.N = N


class CsvParseError(SmoothcalError):
    """Malformed CSV input, carrying the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(SmoothcalError):
    """Invalid experiment configuration."""

    def __init__(self, message, field_errors=None):
        self.field_errors = dict(field_errors or {})
        if self.field_errors:
            details = '; '.join(f"{name}: {', '.join(errs)}" for name, errs in sorted(self.field_errors.items()))
            message = f"{message} ({details})"
        super().__init__(message)
