"""Command-line front end."""
from __future__ import annotations

from .main import main
from .program import Builtin, EinsumProgram, from_lists, load_program, parse, parse_builtin

__all__ = ["Builtin", "EinsumProgram", "from_lists", "load_program", "main", "parse", "parse_builtin"]
