"""Command-line front end."""

from .commands import main

__all__ = ["main"]
