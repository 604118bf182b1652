"""Orchestrator module - grid fan-out"""

from .grid_executor import GridExecutor

__all__ = [
    "GridExecutor",
]
