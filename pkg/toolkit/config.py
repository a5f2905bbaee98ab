"""
Run configuration for the management commands.

Values are merged in three layers, later layers winning:

1. ``settings.CONFORMIX`` defaults (environment / ``.env``),
2. a JSON config file passed with ``--config``,
3. explicit command-line flags.

The merged dict is validated by :class:`RunConfig`; a validation failure is a
usage error.
"""
from __future__ import annotations

import json
import logging
import pathlib
from typing import Any, Dict, List, Literal, Mapping, Optional

import numpy as np
from django.conf import settings
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from geometry.conformal import NEGATIVE, POSITIVE
from geometry.fields import load_field
from geometry.surface import DiscreteSurface, build_icosphere, fixture_path, load_mesh
from geometry.utils import load_json

logger = logging.getLogger(__name__)

DEFAULT_ICOSPHERE_LEVEL = 2


class ConfigError(ValueError):
    """The run configuration could not be read or validated."""


class RunConfig(BaseModel):
    """Every knob a command can read; unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    command: str

    # surface
    icosphere: Optional[int] = Field(default=None, ge=0, le=8)
    mesh: Optional[str] = None
    curvature: Literal["angle_defect", "constant"] = "angle_defect"
    cone: Optional[Literal["positive", "negative"]] = None

    # inputs
    field: Optional[str] = None
    u0: Optional[str] = None
    u1: Optional[str] = None
    v0: Optional[str] = None
    shift: Optional[float] = None
    amplitude: float = Field(default=0.3, gt=0.0, le=5.0)
    seed: int = Field(default=0, ge=0)
    samples: int = Field(default=5, ge=1, le=1000)

    # geodesic solver
    epsilon_min: float = Field(default=1e-3, gt=0.0, le=1.0)
    time_nodes: int = Field(default=64, ge=2, le=4096)
    residual_tol: float = Field(default=1e-9, gt=0.0, lt=1.0)

    # oracle
    rate: float = Field(default=0.5, ge=-5.0, le=5.0)
    solve: bool = False

    # flow
    t_final: float = Field(default=5.0, gt=0.0, le=1e4)
    rtol: float = Field(default=1e-7, gt=0.0, lt=1.0)
    sample_every: int = Field(default=10, ge=1)
    sample_times: Optional[List[float]] = None
    convergence_tol: Optional[float] = Field(default=None, gt=0.0)

    # checks
    suite: Literal[
        "gaussbonnet", "gradF", "sectional", "triangle", "npc",
        "andrews", "geodesic-audit", "flow-monitors", "all",
    ] = "all"
    audit_constant: float = Field(default=10.0, gt=0.0)

    output_dir: str = "runs"

    @model_validator(mode="after")
    def _one_surface(self) -> "RunConfig":
        if self.icosphere is not None and self.mesh is not None:
            raise ValueError("give either icosphere or mesh, not both")
        if self.sample_times is not None and any(t <= 0.0 for t in self.sample_times):
            raise ValueError("sample times must be positive")
        return self

    # ── construction ────────────────────────────────────────────────────────

    @classmethod
    def defaults(cls) -> Dict[str, Any]:
        """settings.CONFORMIX, lower-cased and restricted to known fields."""
        known = cls.model_fields
        return {key.lower(): value for key, value in settings.CONFORMIX.items() if key.lower() in known}

    @classmethod
    def resolve(
        cls,
        command: str,
        flags: Mapping[str, Any],
        config_path: Optional[str] = None,
    ) -> "RunConfig":
        """
        Merge defaults, the JSON file at *config_path* and *flags*
        (``None`` flags are treated as not given).

        Raises
        ------
        ConfigError
            Unreadable config file or a value outside its documented range.
        """
        layers: Dict[str, Any] = cls.defaults()
        if config_path:
            try:
                data = load_json(config_path)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file {config_path} is not valid JSON: {exc}") from exc
            if data is None:
                raise ConfigError(f"config file {config_path} does not exist")
            if not isinstance(data, dict):
                raise ConfigError(f"config file {config_path} must hold a JSON object")
            layers.update(data)
        layers.update({key: value for key, value in flags.items() if value is not None})
        layers["command"] = command
        try:
            return cls.model_validate(layers)
        except ValidationError as exc:
            raise ConfigError(str(exc)) from exc

    # ── derived objects ─────────────────────────────────────────────────────

    def mesh_path(self) -> Optional[pathlib.Path]:
        """The mesh file, falling back to a bundled fixture of the same name."""
        if self.mesh is None:
            return None
        path = pathlib.Path(self.mesh)
        if path.exists():
            return path
        return fixture_path(path.name)

    def build_surface(self) -> DiscreteSurface:
        path = self.mesh_path()
        if path is None:
            level = DEFAULT_ICOSPHERE_LEVEL if self.icosphere is None else self.icosphere
            return build_icosphere(level)
        return load_mesh(path, curvature_mode=self.curvature)

    def resolved_cone(self, surface: DiscreteSurface) -> str:
        """The configured cone, or the one matching the sign of χ."""
        if self.cone is not None:
            return self.cone
        if surface.euler_characteristic > 0:
            return POSITIVE
        if surface.euler_characteristic < 0:
            return NEGATIVE
        raise ConfigError("χ = 0: no curvature cone is available on this surface")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def read_field(self, name: str, surface: DiscreteSurface) -> Optional[np.ndarray]:
        """Load the field file configured under *name*, or None."""
        path = getattr(self, name)
        return None if path is None else load_field(path, surface.vertex_count)

    def input_files(self) -> Dict[str, pathlib.Path]:
        """Every file this run reads, for the manifest."""
        files = {}
        mesh = self.mesh_path()
        if mesh is not None:
            files["mesh"] = mesh
        for name in ("field", "u0", "u1", "v0"):
            value = getattr(self, name)
            if value is not None:
                files[name] = pathlib.Path(value)
        return files

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")
