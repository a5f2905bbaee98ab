"""
Distance between two conformal factors.
"""
import math

from geometry.conformal import POSITIVE
from geometry.diagnostics import nondegeneracy_bound
from geometry.geodesic_solver import solve_geodesic

from toolkit.management.base import ToolkitCommand


class Command(ToolkitCommand):
    help = 'Distance d(u0, u1) from the regularized geodesic solver'

    def add_command_arguments(self, parser):
        self.add_endpoint_arguments(parser)
        self.add_solver_arguments(parser)

    def execute_run(self, config, surface, artifacts):
        cone = config.resolved_cone(surface)
        u0, u1 = self.endpoints(config, surface, cone, config.rng())
        report = solve_geodesic(surface, u0, u1, cone, **self.solver_options(config))
        distance = report.extrapolated_distance
        result = {
            "surface": surface.summary(),
            "cone": cone,
            "distance": distance,
            "distance_at_epsilon_min": report.distance,
            "solve": report.summary(),
            "pass": True,
        }
        if cone == POSITIVE:
            result["nondegeneracy_bound"] = nondegeneracy_bound(surface, u0, u1)
        if config.shift is not None and config.u1 is None:
            expected = abs(config.shift) * math.sqrt(abs(surface.total_curvature))
            result["expected"] = expected
            result["relative_error"] = abs(distance - expected) / expected if expected else abs(distance)
        artifacts.write_report(result)

        self.stdout.write(f'{distance:.10g}')
        if "expected" in result:
            self.stdout.write(self.style.NOTICE(
                f'shift geodesic: expected {result["expected"]:.10g}, relative error {result["relative_error"]:.2e}'
            ))
        return True
