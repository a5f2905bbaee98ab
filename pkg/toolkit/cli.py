"""
Single entry point ``run(argv) -> exit code`` over the management commands.

``argv[0]`` is the subcommand (``mesh-info``, ``curvature``, ``energy``,
``geodesic``, ``distance``, ``flow``, ``flow-distance``, ``oracle``,
``check``); hyphens map to the underscore command modules.  Exit codes:
0 success, 1 usage/input error, 2 failed assertion.
"""
from __future__ import annotations

import logging
import sys
from typing import Optional, Sequence

from django.core.management import get_commands, load_command_class
from django.core.management.base import CommandError

logger = logging.getLogger(__name__)

SUBCOMMANDS = {
    "mesh-info": "mesh_info",
    "curvature": "curvature",
    "energy": "energy",
    "geodesic": "geodesic",
    "distance": "distance",
    "flow": "flow",
    "flow-distance": "flow_distance",
    "oracle": "oracle",
    "check": "check_suite",
}

USAGE = "usage: conformix {" + ",".join(SUBCOMMANDS) + "} [options]"


def run(argv: Sequence[str], stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if not argv or argv[0] in ("-h", "--help"):
        stderr.write(USAGE + "\n")
        return 1
    name = SUBCOMMANDS.get(argv[0])
    app_name: Optional[str] = get_commands().get(name) if name else None
    if app_name is None:
        stderr.write(f"unknown subcommand {argv[0]!r}\n{USAGE}\n")
        return 1

    command = load_command_class(app_name, name)
    parser = command.create_parser("conformix", argv[0])
    try:
        options = vars(parser.parse_args(list(argv[1:])))
    except CommandError as exc:
        stderr.write(f"{exc}\n")
        return 1
    except SystemExit as exc:
        # --help exits through argparse
        return 0 if exc.code in (0, None) else 1

    args = options.pop("args", ())
    options.update(stdout=stdout, stderr=stderr)
    try:
        command.execute(*args, **options)
    except CommandError as exc:
        stderr.write(f"{exc}\n")
        return exc.returncode
    return 0
