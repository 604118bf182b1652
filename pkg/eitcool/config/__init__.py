"""Configuration module"""

from .settings import Settings, load_tolerances, settings, tolerance

__all__ = ["Settings", "settings", "load_tolerances", "tolerance"]
