from .cli import cli, main, parse_cli

__all__ = ["cli", "main", "parse_cli"]
