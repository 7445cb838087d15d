"""Expression parsing and the registry of named functions."""
from .expression import Expression, parse
from .registry import resolve, compose, inside_function
