from __future__ import annotations

import asyncio
from typing import Any, Dict, List

from mcp.types import Tool as McpTool, TextContent

from ..services.reports import compare_report
from .common import GAMMA_SCHEMA, PROBLEM_SCHEMA, PROFILE_SCHEMA, gamma_from_arguments, problem_from_arguments, text_result


class CompareTool:
    name = "compare"

    def list_tool(self) -> McpTool:
        return McpTool(
            name=self.name,
            description="Order (le, ge, equal, incomparable) of the extensions attached to two Gammas",
            inputSchema={
                "type": "object",
                "properties": {
                    "problem": PROBLEM_SCHEMA,
                    "gamma_a": GAMMA_SCHEMA,
                    "gamma_b": GAMMA_SCHEMA,
                    "profile": PROFILE_SCHEMA,
                },
                "required": ["problem", "gamma_a", "gamma_b"],
            },
        )

    async def handle(self, arguments: Dict[str, Any]) -> List[TextContent]:
        def work() -> Dict[str, Any]:
            p, tol = problem_from_arguments(arguments)
            gamma_a = gamma_from_arguments(arguments, "gamma_a", p, tol)
            gamma_b = gamma_from_arguments(arguments, "gamma_b", p, tol)
            return compare_report(p, gamma_a, gamma_b, tol)

        return text_result(await asyncio.to_thread(work))
