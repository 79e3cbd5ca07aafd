"""Exception hierarchy shared by every module of the package."""

from typing import Dict, List, Optional


class CoexistenceError(Exception):
    """Base class for all errors raised by the simulator."""


class ParameterError(CoexistenceError, ValueError):
    """An argument or configuration value is outside its valid range."""


class DomainError(ParameterError):
    """A quantity is evaluated at a singular point (e.g. zero link distance)."""


class DivergenceError(ParameterError):
    """Path-loss exponent too small: aggregate interference on the plane diverges."""


class DegenerateTierError(CoexistenceError):
    """The serving tier has zero intensity, so no serving node exists."""


class RedrawBudgetExceeded(CoexistenceError):
    """Monte Carlo could not find an associable realization within its redraw budget."""


class GeodataError(CoexistenceError):
    """Geodata input is malformed or does not cover an entity that owns a share."""


class ScenarioValidationError(CoexistenceError):
    """
    Scenario file failed validation.

    Carries field-level messages, keyed by dotted field name (``scenario.rho_m``,
    ``entities[1].v_c``...).
    """

    def __init__(self, errors: Dict[str, List[str]], message: Optional[str] = None):
        self.errors = errors
        if message is None:
            parts = [f"{field}: {'; '.join(msgs)}" for field, msgs in sorted(errors.items())]
            message = "Invalid scenario: " + " | ".join(parts)
        super().__init__(message)
