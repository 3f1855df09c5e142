"""Satisfiability, validity and proof checking for the logics of agency CSTIT and DSTIT."""

from ._stitkit import (
    AxiomError,
    FormatError,
    Formula,
    ModelError,
    ParseError,
    SolverError,
    TranslateError,
    check,
    oracle,
    parse,
    prove,
    run,
    sat,
    sat_single_agent,
    translate,
    valid,
)

__all__ = [
    "AxiomError",
    "FormatError",
    "Formula",
    "ModelError",
    "ParseError",
    "SolverError",
    "TranslateError",
    "check",
    "oracle",
    "parse",
    "prove",
    "run",
    "sat",
    "sat_single_agent",
    "translate",
    "valid",
]
