"""
Curvature of a conformal metric e^{2u} g0.
"""
from geometry.conformal import admissible, snapshot
from geometry.diagnostics import gauss_bonnet_check

from toolkit.management.base import ToolkitCommand


class Command(ToolkitCommand):
    help = 'Curvature, area and admissibility of e^{2u} g0'

    def add_command_arguments(self, parser):
        parser.add_argument('--field', default=None, help='Vertex field u (JSON or CSV); random when omitted')
        parser.add_argument('--amplitude', type=float, default=None, help='Amplitude of the random field')

    def execute_run(self, config, surface, artifacts):
        cone = config.resolved_cone(surface)
        u = self.field_or_random(config, 'field', surface, cone, config.rng())
        snap = snapshot(surface, u)
        ok, margin = admissible(surface, u, cone)
        check = gauss_bonnet_check(surface, [u])

        artifacts.write_field('u', u)
        artifacts.write_field('curvature', snap.curvature, cone=cone)
        artifacts.write_report({
            "surface": surface.summary(),
            "cone": cone,
            "metric": snap.summary(),
            "admissible": ok,
            "margin": margin,
            "gauss_bonnet": check,
            "pass": check["pass"],
        })

        self.stdout.write(f'K_u range: [{snap.curvature.min():.6g}, {snap.curvature.max():.6g}]')
        self.stdout.write(f'area: {snap.total_area:.12g}  mean K: {snap.mean_curvature:.12g}')
        if ok:
            self.stdout.write(self.style.SUCCESS(f'{cone} cone, margin {margin:.3e}'))
        else:
            self.stdout.write(self.style.WARNING(f'not in the {cone} cone (margin {margin:.3e})'))
        return check["pass"]
