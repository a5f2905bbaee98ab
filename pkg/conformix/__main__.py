"""``python -m conformix <subcommand> ...``"""
import os
import sys

import django


def main() -> int:
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'conformix.settings')
    django.setup()
    from toolkit.cli import run

    return run(sys.argv[1:])


if __name__ == '__main__':
    sys.exit(main())
