"""IFC verifier, interpreter and semantic oracle for a small C-like language."""

from .checker import check_program, check_stmt, symbolic_post
from .oracle import check_direct_ni, check_judgment_guard_style
from .parser import parse, parse_file, pretty

__all__ = [
    "check_program",
    "check_stmt",
    "symbolic_post",
    "check_direct_ni",
    "check_judgment_guard_style",
    "parse",
    "parse_file",
    "pretty",
]
