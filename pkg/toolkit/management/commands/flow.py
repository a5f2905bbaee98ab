"""
Run the inverse Gauss curvature flow and check its estimates.
"""
from geometry.flow import SERIES_FIELDS, flow_monitors, integrate

from toolkit.management.base import ToolkitCommand


class Command(ToolkitCommand):
    help = 'Integrate the inverse Gauss curvature flow from a conformal factor'

    def add_command_arguments(self, parser):
        parser.add_argument('--field', default=None, help='Start field (default: random admissible perturbation)')
        parser.add_argument('--amplitude', type=float, default=None, help='Amplitude of the random start')
        group = parser.add_argument_group("integrator")
        group.add_argument('--t-final', type=float, default=None, help='Final flow time')
        group.add_argument('--rtol', type=float, default=None, help='Local error tolerance')
        group.add_argument('--sample-every', type=int, default=None, help='Snapshot every N accepted steps')
        group.add_argument('--sample-times', type=float, nargs='+', default=None, help='Snapshot at these times')
        group.add_argument('--convergence-tol', type=float, default=None,
                           help='Stop once max|K - mean K|/|mean K| drops below this')

    def execute_run(self, config, surface, artifacts):
        cone = config.resolved_cone(surface)
        u0 = self.field_or_random(config, 'field', surface, cone, config.rng())
        trace = integrate(
            surface, u0, cone, config.t_final,
            rtol=config.rtol,
            sample_every=config.sample_every,
            sample_times=config.sample_times,
            convergence_tol=config.convergence_tol,
        )
        monitors = flow_monitors(trace, rtol=config.rtol)

        artifacts.write_series(SERIES_FIELDS, trace.rows())
        for index, (t, u) in enumerate(zip(trace.sample_times, trace.snapshots)):
            artifacts.write_field(f'sample_{index:04d}', u, t=t)
        artifacts.write_report({
            "surface": surface.summary(),
            "flow": trace.summary(),
            "monitors": monitors,
            "pass": monitors["pass"],
        })

        summary = trace.summary()
        self.stdout.write(self.style.NOTICE(
            f'{summary["accepted_steps"]} steps ({summary["rejected_steps"]} rejected) to t={summary["t_final"]:.6g}'
        ))
        self.stdout.write(f'final deviation: {summary["final_deviation"]:.3e}')
        self.stdout.write(f'converged: {str(trace.converged).lower()}')
        for name, monitor in monitors["monitors"].items():
            if monitor["asserted"] and not monitor["pass"]:
                self.stdout.write(self.style.WARNING(f'monitor {name} failed (worst {monitor["worst"]:.3e})'))
        return monitors["pass"]
