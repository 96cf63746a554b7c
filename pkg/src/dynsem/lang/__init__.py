"""S-expression front end: reader, compiler, runner, reports."""

from .compiler import Script, compile, compile_text
from .report import CommandResult, RunReport
from .runner import run_script
from .sexpr import SAtom, SList, format, format_all, parse, parse_all

__all__ = [
    "CommandResult", "RunReport", "SAtom", "SList", "Script", "compile", "compile_text",
    "format", "format_all", "parse", "parse_all", "run_script",
]
