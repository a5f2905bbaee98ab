"""
Liouville energies of a conformal factor.
"""
import numpy as np

from geometry.conformal import (
    grad_F,
    liouville_energy,
    normalized_energy,
    polyakov_logdet_ratio,
    weighted_inner,
)

from toolkit.management.base import ToolkitCommand


class Command(ToolkitCommand):
    help = 'J[u], F[u], the Polyakov ratio and |grad F| for a field'

    def add_command_arguments(self, parser):
        parser.add_argument('--field', default=None, help='Vertex field u (JSON or CSV); random when omitted')
        parser.add_argument('--amplitude', type=float, default=None, help='Amplitude of the random field')

    def execute_run(self, config, surface, artifacts):
        cone = config.resolved_cone(surface)
        u = self.field_or_random(config, 'field', surface, cone, config.rng())
        gradient = grad_F(surface, u, cone)
        report = {
            "surface": surface.summary(),
            "cone": cone,
            "J": liouville_energy(surface, u),
            "F": normalized_energy(surface, u),
            "polyakov_logdet_ratio": polyakov_logdet_ratio(surface, u),
            "grad_F_norm": float(np.sqrt(weighted_inner(surface, u, gradient, gradient, cone))),
            "pass": True,
        }
        artifacts.write_field('u', u)
        artifacts.write_field('grad_F', gradient, cone=cone)
        artifacts.write_report(report)

        for key in ('J', 'F', 'polyakov_logdet_ratio', 'grad_F_norm'):
            self.stdout.write(f'{key}: {report[key]:.12g}')
        return True
