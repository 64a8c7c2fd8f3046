"""
Error types raised by the numerical modules and the CLI
"""

from typing import Any, Dict

CONFIG_EXIT_CODE = 1
NUMERICAL_EXIT_CODE = 2


class SSHBathError(Exception):
    """Base class for every error the library raises on purpose."""

    exit_code: int = NUMERICAL_EXIT_CODE

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        """
        Machine-readable payload printed by the CLI.

        Returns:
            Dictionary with the error class name, message, exit code and details
        """
        payload: Dict[str, Any] = {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
        }
        for key, value in self.details.items():
            payload[key] = _jsonable(value)
        return payload


def _jsonable(value: Any) -> Any:
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    return str(value)


class ConfigError(SSHBathError):
    exit_code = CONFIG_EXIT_CODE


class MirageUndefined(SSHBathError):
    """The mirage continuation needs j1 > gamma_b / 2."""

    exit_code = CONFIG_EXIT_CODE


class NotMidgap(SSHBathError):
    """A midgap closed form was requested for an emitter with delta' != -i gamma_b / 2."""

    exit_code = CONFIG_EXIT_CODE


class DimensionTooLarge(SSHBathError):
    exit_code = CONFIG_EXIT_CODE


class OnPhaseBoundary(SSHBathError):
    pass


class OnBranchLoop(SSHBathError):
    pass


class DegenerateQuadratic(SSHBathError):
    pass


class NearSpectrum(SSHBathError):
    pass


class NoConvergence(SSHBathError):
    pass


class RootOnSpectrum(SSHBathError):
    pass


class WindowTooSmall(SSHBathError):
    pass


class SingularMatrix(SSHBathError):
    pass


class ContourTooLow(SSHBathError):
    pass


class AliasingDetected(SSHBathError):
    pass


class NoOscillationDetected(SSHBathError):
    pass


class ContourPinched(SSHBathError):
    pass


class PiZero(SSHBathError):
    pass


class StepUnderflow(SSHBathError):
    pass
