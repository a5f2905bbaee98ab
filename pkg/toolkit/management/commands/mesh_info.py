from geometry.diagnostics import gauss_bonnet_check

from toolkit.management.base import ToolkitCommand


class Command(ToolkitCommand):
    help = 'Summarize a background surface and check discrete Gauss-Bonnet'

    def execute_run(self, config, surface, artifacts):
        check = gauss_bonnet_check(surface)
        artifacts.write_report({"surface": surface.summary(), "gauss_bonnet": check, "pass": check["pass"]})
        artifacts.write_field("background_curvature", surface.background_curvature)
        artifacts.write_field("area_masses", surface.area_masses)

        summary = surface.summary()
        self.stdout.write(self.style.NOTICE(f'{summary["name"]}: V={summary["V"]} E={summary["E"]} F={summary["F"]}'))
        self.stdout.write(f'chi: {summary["chi"]}')
        self.stdout.write(f'total area: {summary["total_area"]:.12g}')
        self.stdout.write(f'K0 range: [{summary["min_K0"]:.6g}, {summary["max_K0"]:.6g}]')
        self.stdout.write(f'Gauss-Bonnet relative error: {check["background_error"]:.3e}')
        return check["pass"]
