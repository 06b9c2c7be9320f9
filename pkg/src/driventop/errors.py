"""Exception types shared across the package."""

from __future__ import annotations


class DrivenTopError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(DrivenTopError):
    """Invalid or inconsistent user-supplied configuration."""


class NumericalError(DrivenTopError):
    """A numerical routine failed to meet its contract."""


class IntegrationError(NumericalError):
    """Adaptive ODE integration failed (step-size underflow or overflow)."""


class AddressabilityError(DrivenTopError):
    """Pulse compilation hit transitions too close in frequency to address."""


class StateDecompositionError(DrivenTopError):
    """A state lacks the spectral structure an analysis routine requires."""


class LineResolutionError(DrivenTopError):
    """A spectrum has too few resolved lines for the requested analysis."""
