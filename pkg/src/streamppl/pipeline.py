"""End-to-end front door: source text to compiled program."""

from __future__ import annotations

from .lang import desugar, kind_check, parse, schedule_program
from .stepfn import CompiledProgram, compile_program


def load(source: str, globals_env=None, predefined=None) -> CompiledProgram:
    """Parse, desugar, kind-check, schedule, and compile a program.

    `globals_env` supplies ambient constants (name -> value); their names are
    implicitly predefined for the parser's unbound-variable check.
    """
    globals_env = dict(globals_env or {})
    names = set(predefined or ()) | set(globals_env)
    prog = parse(source, predefined=names)
    prog = desugar(prog)
    kind_check(prog, globals_env)
    prog = schedule_program(prog)
    return compile_program(prog, globals_env)


def front(source: str, globals_env=None, predefined=None):
    """Frontend only: the scheduled kernel program (no compilation)."""
    globals_env = dict(globals_env or {})
    names = set(predefined or ()) | set(globals_env)
    prog = parse(source, predefined=names)
    prog = desugar(prog)
    kind_check(prog, globals_env)
    return schedule_program(prog)
