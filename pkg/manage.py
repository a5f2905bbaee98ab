#!/usr/bin/env python
"""
Command-line utility for conformix.

``./manage.py mesh-info --icosphere 2`` and the other hyphenated toolkit
subcommands go through :func:`toolkit.cli.run` so they return its exit codes;
anything else (``test``, ``check``, ``check_suite``, ...) is a plain Django
management command.
"""
import os
import sys


def main() -> int:
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'conformix.settings')
    try:
        import django
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Install requirements.txt into the active environment."
        ) from exc

    argv = sys.argv[1:]
    if argv and argv[0] != 'check':
        django.setup()
        from toolkit.cli import SUBCOMMANDS, run

        if argv[0] in SUBCOMMANDS:
            return run(argv)
    execute_from_command_line(sys.argv)
    return 0


if __name__ == '__main__':
    sys.exit(main())
