"""
Distance between two flow lines at a few sample times.
"""
import numpy as np

from geometry.flow import flow_distance_monotonicity

from toolkit.management.base import ToolkitCommand

DEFAULT_SAMPLES = 5


class Command(ToolkitCommand):
    help = 'Check that the flow does not increase the distance between two factors'

    def add_command_arguments(self, parser):
        parser.add_argument('--u0', default=None, help='First start field (default: random)')
        parser.add_argument('--v0', default=None, help='Second start field (default: random)')
        parser.add_argument('--amplitude', type=float, default=None, help='Amplitude of random starts')
        parser.add_argument('--t-final', type=float, default=None, help='Last sample time')
        parser.add_argument('--rtol', type=float, default=None, help='Flow local error tolerance')
        parser.add_argument('--sample-times', type=float, nargs='+', default=None, help='Sample times')
        self.add_solver_arguments(parser)

    def execute_run(self, config, surface, artifacts):
        cone = config.resolved_cone(surface)
        rng = config.rng()
        u0 = self.field_or_random(config, 'u0', surface, cone, rng)
        v0 = self.field_or_random(config, 'v0', surface, cone, rng)
        times = config.sample_times or list(np.linspace(0.0, config.t_final, DEFAULT_SAMPLES + 1)[1:])
        result = flow_distance_monotonicity(
            surface, u0, v0, cone, times,
            rtol=config.rtol,
            intervals=config.time_nodes,
            epsilon_min=config.epsilon_min,
            residual_tol=config.residual_tol,
        )
        artifacts.write_field('u0', u0)
        artifacts.write_field('v0', v0)
        artifacts.write_series(["t", "distance"], zip(result["times"], result["distances"]))
        artifacts.write_report({"surface": surface.summary(), **result})

        for t, d in zip(result["times"], result["distances"]):
            self.stdout.write(f't={t:.4g}  d={d:.8g}')
        if not result["pass"]:
            self.stdout.write(self.style.WARNING(f'distance increased by {result["worst_increase"]:.3e}'))
        return result["pass"]
