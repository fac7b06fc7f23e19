from __future__ import annotations

import asyncio
from typing import Any, Dict, List

from mcp.types import Tool as McpTool, TextContent

from ..services.problem_files import parse_candidate
from ..services.reports import membership_report
from ..shared import MalformedInputError
from .common import PROBLEM_SCHEMA, PROFILE_SCHEMA, problem_from_arguments, require, text_result

ROUTES = ("direct", "interval", "both")


class MembershipTool:
    name = "membership"

    def list_tool(self) -> McpTool:
        return McpTool(
            name=self.name,
            description="Decide whether a candidate matrix is a selfadjoint contraction extension",
            inputSchema={
                "type": "object",
                "properties": {
                    "problem": PROBLEM_SCHEMA,
                    "candidate": {"type": "array", "description": "n x n array of [re, im] pairs"},
                    "route": {"type": "string", "enum": list(ROUTES), "default": "both"},
                    "profile": PROFILE_SCHEMA,
                },
                "required": ["problem", "candidate"],
            },
        )

    async def handle(self, arguments: Dict[str, Any]) -> List[TextContent]:
        route = arguments.get("route", "both")
        if route not in ROUTES:
            raise MalformedInputError(f"route must be one of {', '.join(ROUTES)}, got {route!r}")

        def work() -> Dict[str, Any]:
            p, tol = problem_from_arguments(arguments)
            candidate = parse_candidate(require(arguments, "candidate"))
            return membership_report(p, candidate, route, tol)

        return text_result(await asyncio.to_thread(work))
