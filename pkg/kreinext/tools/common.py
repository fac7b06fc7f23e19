"""Argument handling shared by the tool handlers."""

from __future__ import annotations

from typing import Any, Dict, List, Optional, Tuple

from mcp.types import TextContent

from ..services.extensions import ExtensionParametrization, GammaParameter
from ..services.problem_files import parse_gamma, parse_problem
from ..services.reports import dumps, problem_parametrization
from ..shared import MalformedInputError, Tolerance

PROBLEM_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "description": "Problem: ambient_dim, domain_basis and action as n x k arrays of [re, im] pairs",
    "properties": {
        "ambient_dim": {"type": "integer", "minimum": 1},
        "domain_basis": {"type": "array"},
        "action": {"type": "array"},
        "lower_bound_shift": {"type": "number"},
        "tolerance": {"type": "object", "additionalProperties": {"type": "number"}},
    },
    "required": ["ambient_dim", "domain_basis", "action"],
}

GAMMA_SCHEMA: Dict[str, Any] = {
    "description": "'krein', 'friedrichs', 'neutral' or a d x d array in the basis reported by parametrize",
    "anyOf": [{"type": "string", "enum": ["krein", "friedrichs", "neutral"]}, {"type": "array"}],
}

PROFILE_SCHEMA: Dict[str, Any] = {
    "type": "string",
    "enum": ["default", "strict", "loose"],
    "description": "Tolerance profile",
}


def text_result(payload: Dict[str, Any]) -> List[TextContent]:
    return [TextContent(type="text", text=dumps(payload))]


def require(arguments: Dict[str, Any], key: str) -> Any:
    if key not in arguments:
        raise MalformedInputError(f"missing argument '{key}'")
    return arguments[key]


def problem_from_arguments(arguments: Dict[str, Any]) -> Tuple[ExtensionParametrization, Tolerance]:
    problem = parse_problem(require(arguments, "problem"))
    tol = problem.resolve_tolerance(arguments.get("profile"))
    return problem_parametrization(problem.to_operator(tol), tol), tol


def gamma_from_arguments(
    arguments: Dict[str, Any], key: str, p: ExtensionParametrization, tol: Tolerance
) -> GammaParameter:
    return parse_gamma(require(arguments, key), p.defect_dim, tol, source=key)


def optional_int(arguments: Dict[str, Any], key: str, default: int) -> int:
    value: Optional[Any] = arguments.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedInputError(f"'{key}' must be an integer, got {value!r}")
    return value
