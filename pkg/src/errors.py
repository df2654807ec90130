"""
Exception hierarchy shared by every fascovert module.

Callers that only care whether something went wrong catch `FasCovertError`;
the CLI maps `ConfigurationError` to exit code 1 and `OSError` to exit code 2.
"""

from __future__ import annotations

from typing import Any, Dict, Optional


class FasCovertError(Exception):
    """Base class for all fascovert errors."""


class InvalidInputError(FasCovertError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(FasCovertError, ValueError):
    """A scalar lies outside the domain of a mathematical function."""


class NumericalConsistencyError(FasCovertError):
    """A computed quantity contradicts a mathematical invariant beyond tolerance."""


class ConfigurationError(FasCovertError):
    """The scenario or experiment cannot be realized (e.g. the region is too small)."""


class DegenerateGeometryError(InvalidInputError):
    """Two antenna positions coincide where a direction between them is needed."""


class SolverError(FasCovertError):
    """A numerical solver failed to converge; `residuals` carries diagnostics."""

    def __init__(self, message: str, residuals: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.residuals: Dict[str, Any] = dict(residuals or {})


class InfeasibleSubproblemError(SolverError):
    """The convex subproblem was certified infeasible."""


class RankOneError(SolverError):
    """The penalty loop could not drive the covariance to rank one."""
