"""Command-line front end."""

from .app import build_parser, main, resolve_settings

__all__ = ["build_parser", "main", "resolve_settings"]
