"""
Shared plumbing for the toolkit management commands.

A command subclasses :class:`ToolkitCommand`, adds its own flags in
``add_command_arguments`` and implements ``execute_run``, which writes its
artifacts and returns whether every asserted check passed.
"""
from __future__ import annotations

import logging
from typing import Any, Dict, Optional

import numpy as np
from django.core.management.base import BaseCommand, CommandError

from geometry.conformal import NEGATIVE, POSITIVE, admissible
from geometry.exceptions import FlowError, GeometryError, SolverError
from geometry.fields import random_admissible_field
from geometry.surface import CURVATURE_MODES, DiscreteSurface
from toolkit.config import ConfigError, RunConfig
from toolkit.reports import RunArtifacts

logger = logging.getLogger(__name__)

USAGE_ERROR = 1
ASSERTION_FAILURE = 2


class ToolkitCommand(BaseCommand):
    requires_system_checks = []

    def add_arguments(self, parser):
        surface = parser.add_argument_group("surface")
        surface.add_argument('--icosphere', type=int, default=None, help='Icosphere subdivision level (0-8)')
        surface.add_argument('--mesh', default=None, help='OFF/OBJ mesh path or bundled fixture name')
        surface.add_argument('--curvature', choices=CURVATURE_MODES, default=None,
                             help='Background curvature mode for loaded meshes')
        parser.add_argument('--cone', choices=[POSITIVE, NEGATIVE], default=None,
                            help='Curvature cone (default: sign of the Euler characteristic)')
        parser.add_argument('--config', dest='config_path', default=None, help='JSON run configuration')
        parser.add_argument('--output-dir', default=None, help='Directory for run artifacts')
        parser.add_argument('--seed', type=int, default=None, help='Seed for random fields')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    @property
    def command_name(self) -> str:
        return self.__module__.rsplit('.', 1)[-1]

    def execute_run(self, config: RunConfig, surface: DiscreteSurface, artifacts: RunArtifacts) -> bool:
        raise NotImplementedError

    def handle(self, *args, **options):
        flags = {name: options[name] for name in RunConfig.model_fields if name in options and name != 'command'}
        try:
            config = RunConfig.resolve(self.command_name, flags, options.get('config_path'))
            surface = config.build_surface()
        except (ConfigError, GeometryError, FileNotFoundError, ValueError) as exc:
            raise CommandError(str(exc), returncode=USAGE_ERROR) from exc

        artifacts = RunArtifacts(config)
        try:
            passed = self.execute_run(config, surface, artifacts)
        except (SolverError, FlowError) as exc:
            logger.error("%s failed: %s", self.command_name, exc)
            artifacts.write_report({"command": self.command_name, "error": str(exc), "pass": False})
            artifacts.write_manifest()
            raise CommandError(str(exc), returncode=ASSERTION_FAILURE) from exc
        except (ConfigError, GeometryError, FileNotFoundError, ValueError) as exc:
            raise CommandError(str(exc), returncode=USAGE_ERROR) from exc

        artifacts.write_manifest()
        if not passed:
            raise CommandError(
                f'{self.command_name}: assertions failed, see {artifacts.root}',
                returncode=ASSERTION_FAILURE,
            )
        self.stdout.write(self.style.SUCCESS(f'{self.command_name}: ok ({artifacts.root})'))

    # ── helpers shared by several commands ──────────────────────────────────

    @staticmethod
    def solver_options(config: RunConfig) -> Dict[str, Any]:
        return {
            "intervals": config.time_nodes,
            "epsilon_min": config.epsilon_min,
            "residual_tol": config.residual_tol,
        }

    @staticmethod
    def base_field(surface: DiscreteSurface, cone: str) -> np.ndarray:
        """u ≡ 0 when the background itself lies in *cone*."""
        zero = np.zeros(surface.vertex_count)
        ok, margin = admissible(surface, zero, cone)
        if not ok:
            raise ConfigError(
                f"the background metric is not in the {cone} cone (margin {margin:.3e}); pass the field explicitly"
            )
        return zero

    def field_or_random(
        self,
        config: RunConfig,
        name: str,
        surface: DiscreteSurface,
        cone: str,
        rng: np.random.Generator,
        base: Optional[np.ndarray] = None,
    ) -> np.ndarray:
        """The field configured under *name*, else a random admissible perturbation."""
        value = config.read_field(name, surface)
        if value is not None:
            return value
        base = self.base_field(surface, cone) if base is None else base
        return random_admissible_field(surface, rng, cone, base=base, amplitude=config.amplitude)

    def endpoints(self, config: RunConfig, surface: DiscreteSurface, cone: str, rng: np.random.Generator):
        """u0 from file or the background; u1 from file, u0 + shift, or a random perturbation of u0."""
        u0 = config.read_field('u0', surface)
        if u0 is None:
            u0 = self.base_field(surface, cone)
        u1 = config.read_field('u1', surface)
        if u1 is None:
            if config.shift is not None:
                u1 = u0 + config.shift
            else:
                u1 = random_admissible_field(surface, rng, cone, base=u0, amplitude=config.amplitude)
        return u0, u1

    @staticmethod
    def add_solver_arguments(parser):
        group = parser.add_argument_group("geodesic solver")
        group.add_argument('--epsilon-min', type=float, default=None, help='Final regularization parameter')
        group.add_argument('--time-nodes', type=int, default=None, help='Number of time intervals N')
        group.add_argument('--residual-tol', type=float, default=None, help='Newton residual tolerance')

    @staticmethod
    def add_endpoint_arguments(parser):
        parser.add_argument('--u0', default=None, help='Start field (default: u = 0)')
        parser.add_argument('--u1', default=None, help='End field (default: --shift or a random perturbation)')
        parser.add_argument('--shift', type=float, default=None, help='Use u1 = u0 + shift')
        parser.add_argument('--amplitude', type=float, default=None, help='Amplitude of random fields')
