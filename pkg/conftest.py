"""pytest bootstrap: the test classes are Django SimpleTestCases."""
import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "conformix.settings")
django.setup()
