"""
Solve the regularized geodesic problem between two conformal factors and
audit the result.
"""
import numpy as np

from geometry.conformal import normalized_energy
from geometry.diagnostics import geodesic_audit
from geometry.geodesic_solver import COMPARISON_TOL, solve_geodesic
from geometry.path import conserved_functional, energy_density

from toolkit.management.base import ToolkitCommand


class Command(ToolkitCommand):
    help = 'Regularizable geodesic between two conformal factors'

    def add_command_arguments(self, parser):
        self.add_endpoint_arguments(parser)
        self.add_solver_arguments(parser)
        parser.add_argument('--audit-constant', type=float, default=None, help='Constant C of the audit tolerance')

    def execute_run(self, config, surface, artifacts):
        cone = config.resolved_cone(surface)
        u0, u1 = self.endpoints(config, surface, cone, config.rng())
        report = solve_geodesic(surface, u0, u1, cone, **self.solver_options(config))
        path = report.path
        audit = geodesic_audit(
            surface, path,
            epsilon=report.epsilon_reached,
            forcing_scale=float(np.abs(report.plan.f0).max()),
            audit_constant=config.audit_constant,
        )
        ordered = report.ordering_gap >= -COMPARISON_TOL

        density = energy_density(surface, path)
        first_moment = conserved_functional(surface, path, 1)
        F = [normalized_energy(surface, u) for u in path.nodes]
        artifacts.write_series(
            ["t", "energy_density", "velocity_moment", "F"],
            zip(path.times, density, first_moment, F),
        )
        artifacts.write_path('path', path)
        artifacts.write_report({
            "surface": surface.summary(),
            "solve": report.summary(),
            "audit": audit,
            "ordering": {"gap": report.ordering_gap, "tol": COMPARISON_TOL, "pass": ordered},
            "pass": bool(audit["pass"] and ordered),
        })

        self.stdout.write(self.style.NOTICE(
            f'epsilon {report.epsilon_reached:.3g}: residual {report.residual:.2e}, '
            f'{sum(report.newton_iterations)} Newton steps'
        ))
        self.stdout.write(f'distance: {report.distance:.10g} (extrapolated {report.extrapolated_distance:.10g})')
        if not audit["pass"]:
            failed = [name for name, ok in audit["checks"].items() if not ok]
            self.stdout.write(self.style.WARNING(f'audit failed: {", ".join(failed)}'))
        return bool(audit["pass"] and ordered)
