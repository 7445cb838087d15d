"""Command-line interface."""
from .cli import main
