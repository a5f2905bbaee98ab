"""
Exception hierarchy for the numerical core.

Every error raised on purpose by :mod:`geometry` derives from
:class:`GeometryError`, so callers (the management commands in particular) can
tell input problems apart from programming errors.
"""
from __future__ import annotations

from typing import Any, Dict, Optional


class GeometryError(Exception):
    """Base class for all toolkit errors."""


class MeshError(GeometryError, ValueError):
    """A mesh failed to parse or is not a closed oriented triangle manifold."""

    def __init__(self, message: str, simplex: Optional[int] = None):
        super().__init__(message if simplex is None else f"{message} (simplex {simplex})")
        self.simplex = simplex


class FieldShapeError(GeometryError, ValueError):
    """A vertex or space-time field has the wrong length."""


class InadmissibleError(GeometryError):
    """A conformal factor is outside the requested curvature cone."""

    def __init__(self, message: str, margin: float = float("nan")):
        super().__init__(message)
        self.margin = margin


class OracleError(GeometryError):
    """A closed-form reference was requested on an unsupported surface."""


class SolverError(GeometryError):
    """
    The geodesic solver failed.

    ``best`` is the best iterate reached (a TimePath), ``report`` the last
    fully converged stage (a SolveReport) when continuation was under way.
    """

    def __init__(
        self,
        message: str,
        best: Any = None,
        report: Any = None,
        diagnostics: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.best = best
        self.report = report
        self.diagnostics = diagnostics or {}


class FlowError(GeometryError):
    """The flow integrator could not continue; ``trace`` holds the run so far."""

    def __init__(self, message: str, trace: Any = None):
        super().__init__(message)
        self.trace = trace
