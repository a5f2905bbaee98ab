from django.apps import AppConfig


class ToolkitConfig(AppConfig):
    """Command-line front end for the conformal geometry toolkit."""
    name = 'toolkit'
    verbose_name = 'Conformal geometry toolkit'
