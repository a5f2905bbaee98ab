"""
Property checks on random admissible data.

Exposed on the command line as ``check`` (see :mod:`toolkit.cli`); the module
is named ``check_suite`` so Django's own ``check`` command stays available.
"""
import numpy as np

from geometry.conformal import POSITIVE
from geometry.diagnostics import (
    andrews_check,
    gauss_bonnet_check,
    geodesic_audit,
    gradient_check,
    npc_check,
    sectional_check,
    triangle_check,
)
from geometry.fields import random_admissible_field, random_smooth_field
from geometry.flow import flow_monitors, integrate
from geometry.geodesic_solver import solve_geodesic

from toolkit.management.base import ToolkitCommand

SUITES = (
    "gaussbonnet", "gradF", "sectional", "triangle", "npc",
    "andrews", "geodesic-audit", "flow-monitors",
)


class Command(ToolkitCommand):
    help = 'Run property checks (Gauss-Bonnet, gradient, curvature sign, metric inequalities, audits)'

    def add_command_arguments(self, parser):
        parser.add_argument('suite_name', nargs='?', choices=SUITES + ('all',), default=None, metavar='suite',
                            help='Check suite to run (same as --suite)')
        parser.add_argument('--suite', choices=SUITES + ('all',), default=None, help='Check suite to run')
        parser.add_argument('--samples', type=int, default=None, help='Random samples per suite')
        parser.add_argument('--amplitude', type=float, default=None, help='Amplitude of random fields')
        parser.add_argument('--audit-constant', type=float, default=None, help='Constant C of the audit tolerance')
        parser.add_argument('--t-final', type=float, default=None, help='Flow time for flow-monitors')
        parser.add_argument('--rtol', type=float, default=None, help='Flow local error tolerance')
        self.add_solver_arguments(parser)

    def handle(self, *args, **options):
        if options.get('suite_name'):
            options['suite'] = options['suite_name']
        return super().handle(*args, **options)

    def execute_run(self, config, surface, artifacts):
        cone = config.resolved_cone(surface)
        rng = config.rng()
        selected = SUITES if config.suite == 'all' else (config.suite,)

        results = {}
        for name in selected:
            handler = getattr(self, f'suite_{name.replace("-", "_").lower()}')
            results[name] = handler(config, surface, cone, rng)
            outcome = results[name]["pass"]
            if outcome is None:
                self.stdout.write(self.style.NOTICE(f'{name}: skipped ({results[name]["skipped"]})'))
            elif outcome:
                self.stdout.write(self.style.SUCCESS(f'{name}: pass'))
            else:
                self.stdout.write(self.style.ERROR(f'{name}: FAIL'))

        passed = all(result["pass"] is not False for result in results.values())
        artifacts.write_report({
            "surface": surface.summary(),
            "cone": cone,
            "seed": config.seed,
            "suites": results,
            "pass": passed,
        })
        return passed

    # ── helpers ─────────────────────────────────────────────────────────────

    def _admissible(self, config, surface, cone, rng, count):
        base = self.base_field(surface, cone)
        return [random_admissible_field(surface, rng, cone, base=base, amplitude=config.amplitude) for _ in range(count)]

    @staticmethod
    def _smooth(config, surface, rng, count):
        return [random_smooth_field(surface, rng, config.amplitude) for _ in range(count)]

    # ── suites ──────────────────────────────────────────────────────────────

    def suite_gaussbonnet(self, config, surface, cone, rng):
        return gauss_bonnet_check(surface, self._smooth(config, surface, rng, config.samples))

    def suite_gradf(self, config, surface, cone, rng):
        (u,) = self._admissible(config, surface, cone, rng, 1)
        return gradient_check(surface, u, cone, self._smooth(config, surface, rng, config.samples))

    def suite_sectional(self, config, surface, cone, rng):
        (u,) = self._admissible(config, surface, cone, rng, 1)
        fields = self._smooth(config, surface, rng, 2 * config.samples)
        return sectional_check(surface, u, cone, list(zip(fields[::2], fields[1::2])))

    def suite_triangle(self, config, surface, cone, rng):
        a, b, c = self._admissible(config, surface, cone, rng, 3)
        return triangle_check(surface, a, b, c, cone, **self.solver_options(config))

    def suite_npc(self, config, surface, cone, rng):
        a, b, c = self._admissible(config, surface, cone, rng, 3)
        return npc_check(surface, a, b, c, cone=cone, **self.solver_options(config))

    def suite_andrews(self, config, surface, cone, rng):
        if cone != POSITIVE:
            return {"check": "andrews", "skipped": "needs the positive cone", "pass": None}
        if surface.curvature_mode == "sphere":
            u = np.zeros(surface.vertex_count)
        else:
            (u,) = self._admissible(config, surface, cone, rng, 1)
        return andrews_check(surface, u, self._smooth(config, surface, rng, config.samples))

    def suite_geodesic_audit(self, config, surface, cone, rng):
        a, b = self._admissible(config, surface, cone, rng, 2)
        report = solve_geodesic(surface, a, b, cone, **self.solver_options(config))
        audit = geodesic_audit(
            surface, report.path,
            epsilon=report.epsilon_reached,
            forcing_scale=float(np.abs(report.plan.f0).max()),
            audit_constant=config.audit_constant,
        )
        audit["distance"] = report.extrapolated_distance
        return audit

    def suite_flow_monitors(self, config, surface, cone, rng):
        (u0,) = self._admissible(config, surface, cone, rng, 1)
        trace = integrate(surface, u0, cone, config.t_final, rtol=config.rtol, sample_every=config.sample_every)
        result = flow_monitors(trace, rtol=config.rtol)
        result["check"] = "flow_monitors"
        result["flow"] = trace.summary()
        return result
