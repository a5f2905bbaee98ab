"""
Closed-form geodesics: constant shifts on any surface, pole-fixing
dilations on the round sphere.
"""
import math

import numpy as np

from geometry.conformal import POSITIVE
from geometry.diagnostics import geodesic_audit
from geometry.geodesic_solver import solve_geodesic
from geometry.oracle import DilationFamily, dilation_path, dilation_refinement, shift_geodesic
from geometry.path import geodesic_residual, path_length

from toolkit.management.base import ToolkitCommand

SHIFT_LENGTH_RTOL = 1e-9
SOLVER_SUP_TOL = 0.05
SOLVER_DISTANCE_RTOL = 0.03


class Command(ToolkitCommand):
    help = 'Compare discrete quantities against closed-form geodesics'

    def add_command_arguments(self, parser):
        parser.add_argument('--shift', type=float, default=None, help='Use the shift geodesic u0 + t c')
        parser.add_argument('--rate', type=float, default=None, help='Dilation rate (sphere only)')
        parser.add_argument('--solve', action='store_true', default=None,
                            help='Also solve between the dilation endpoints and compare')
        self.add_solver_arguments(parser)

    def execute_run(self, config, surface, artifacts):
        if config.shift is not None:
            return self._shift(config, surface, artifacts)
        return self._dilation(config, surface, artifacts)

    def _shift(self, config, surface, artifacts):
        cone = config.resolved_cone(surface)
        path = shift_geodesic(self.base_field(surface, cone), config.shift, config.time_nodes, cone)
        expected = abs(config.shift) * math.sqrt(abs(surface.total_curvature))
        length = path_length(surface, path)
        error = abs(length - expected) / max(expected, 1e-300)
        audit = geodesic_audit(surface, path, audit_constant=config.audit_constant)
        passed = bool(error <= SHIFT_LENGTH_RTOL and audit["pass"])
        artifacts.write_path('path', path)
        artifacts.write_report({
            "surface": surface.summary(),
            "oracle": "shift",
            "length": length,
            "expected": expected,
            "relative_error": error,
            "residual": float(np.abs(geodesic_residual(surface, path)).max()),
            "audit": audit,
            "pass": passed,
        })
        self.stdout.write(f'length {length:.10g}, expected {expected:.10g}')
        return passed

    def _dilation(self, config, surface, artifacts):
        family = DilationFamily.on(surface, config.rate)
        path = dilation_path(family, config.time_nodes)
        residual = float(np.abs(geodesic_residual(surface, path)).max())
        length = path_length(surface, path)
        expected = family.expected_speed
        refinement = dilation_refinement(surface, family.rate, path.intervals)
        report = {
            "surface": surface.summary(),
            "oracle": "dilation",
            "rate": family.rate,
            "level": refinement[0]["level"],
            "N": path.intervals,
            "residual": residual,
            "refinement": {
                "rows": refinement,
                "decreasing": all(b["residual"] < a["residual"] for a, b in zip(refinement, refinement[1:])),
            },
            "length": length,
            "expected": expected,
            "relative_error": abs(length - expected) / expected if expected else length,
            "audit": geodesic_audit(surface, path, audit_constant=config.audit_constant),
        }
        passed = True
        if config.solve:
            solved = solve_geodesic(surface, path.nodes[0], path.nodes[-1], POSITIVE, **self.solver_options(config))
            sup = float(np.abs(solved.path.nodes - path.nodes).max())
            distance_error = abs(solved.extrapolated_distance - expected) / expected if expected else 0.0
            passed = sup <= SOLVER_SUP_TOL and distance_error <= SOLVER_DISTANCE_RTOL
            report["solver"] = {
                "sup_difference": sup,
                "distance": solved.extrapolated_distance,
                "distance_relative_error": distance_error,
                "solve": solved.summary(),
            }
            artifacts.write_path('solver_path', solved.path)
        report["pass"] = bool(passed)
        artifacts.write_path('path', path)
        artifacts.write_report(report)

        self.stdout.write(
            f'level {report["level"]}, N={path.intervals}: residual {residual:.3e}, '
            f'length {length:.8g} (expected {expected:.8g})'
        )
        for row in refinement[1:]:
            self.stdout.write(f'  level {row["level"]}, N={row["N"]}: residual {row["residual"]:.3e}')
        if "solver" in report:
            self.stdout.write(self.style.NOTICE(
                f'solver sup difference {report["solver"]["sup_difference"]:.3e}, '
                f'distance error {report["solver"]["distance_relative_error"]:.2%}'
            ))
        return bool(passed)
