import sys
import warnings

from Levinson.logger import levinson_logger


def error_message_detail(error, error_detail: sys):
    """
    Generate detailed error message including file name, line number, and error description.
    Falls back to the bare message when no exception is being handled.
    """
    _, _, exc_tb = error_detail.exc_info()
    if exc_tb is None:
        return str(error)
    file_name = exc_tb.tb_frame.f_code.co_filename
    error_message = (
        f"Error occurred in Levinson script: {file_name} "
        f"at line number: {exc_tb.tb_lineno} "
        f"error message: {str(error)}"
    )
    return error_message


class LevinsonException(Exception):
    """
    Base exception for Levinson-specific errors
    """
    exit_code = 2

    def __init__(self, error_message, error_detail: sys = sys):
        super().__init__(error_message)
        self.error_message = error_message_detail(error_message, error_detail)
        levinson_logger.error(self.error_message)

    def __str__(self):
        return self.error_message


class DomainError(LevinsonException):
    """Input outside the mathematical domain of an operation"""
    exit_code = 3


class ConfigurationError(LevinsonException):
    """Invalid run configuration"""
    exit_code = 3


class InterpolationDomainError(DomainError):
    """Tabulated potential evaluated outside its sample range"""
    pass


class NumericalToleranceError(LevinsonException):
    """A computed quantity missed its tolerance"""
    pass


class AccuracyError(NumericalToleranceError):
    """Quadrature did not converge; carries the achieved estimate"""
    def __init__(self, message, estimate=None, error_detail: sys = sys):
        super().__init__(message, error_detail)
        self.estimate = estimate


class RangeError(NumericalToleranceError):
    """Special function value outside floating point range"""
    pass


class StiffnessError(NumericalToleranceError):
    """Step size underflow in the radial integrator"""
    pass


class StartupAccuracyError(NumericalToleranceError):
    """Power-series start of the regular solution too inaccurate"""
    pass


class DegenerateMatchingError(NumericalToleranceError):
    """Both matching Wronskians vanished"""
    pass


class GridResolutionError(NumericalToleranceError):
    """Energy grid too coarse to follow a phase shift continuously"""
    def __init__(self, message, index=None, error_detail: sys = sys):
        super().__init__(message, error_detail)
        self.index = index


class ConditioningError(NumericalToleranceError):
    """Ill-conditioned zero-energy coefficient solve"""
    def __init__(self, message, condition=None, error_detail: sys = sys):
        super().__init__(message, error_detail)
        self.condition = condition


class TruncationError(NumericalToleranceError):
    """Partial-wave sum truncated while channels still contribute"""
    def __init__(self, message, residual=None, error_detail: sys = sys):
        super().__init__(message, error_detail)
        self.residual = residual


class RefinementError(NumericalToleranceError):
    """Node of the zero-energy solution not resolved by the sampling"""
    pass


class PathResolutionError(NumericalToleranceError):
    """Spectral flow partition refinement exhausted"""
    pass


class ResolutionError(NumericalToleranceError):
    """Finite box result not converged under box doubling"""
    pass


class TailModelWarning(UserWarning):
    """High-energy tail exponent far from the theoretical one"""
    pass


class AmbiguousThresholdWarning(UserWarning):
    """Growth coefficient too small to classify confidently"""
    pass


def warn(message, category):
    levinson_logger.warning(message)
    warnings.warn(message, category, stacklevel=3)
