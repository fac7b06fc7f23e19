from __future__ import annotations

import asyncio
from typing import Any, Dict, List

from mcp.types import Tool as McpTool, TextContent

from ..services.reports import extend_report
from .common import GAMMA_SCHEMA, PROBLEM_SCHEMA, PROFILE_SCHEMA, gamma_from_arguments, problem_from_arguments, text_result


class ExtendTool:
    name = "extend"

    def list_tool(self) -> McpTool:
        return McpTool(
            name=self.name,
            description="Contraction extension T~(Gamma), the positive extension S~(Gamma) and its domain formula",
            inputSchema={
                "type": "object",
                "properties": {"problem": PROBLEM_SCHEMA, "gamma": GAMMA_SCHEMA, "profile": PROFILE_SCHEMA},
                "required": ["problem", "gamma"],
            },
        )

    async def handle(self, arguments: Dict[str, Any]) -> List[TextContent]:
        def work() -> Dict[str, Any]:
            p, tol = problem_from_arguments(arguments)
            return extend_report(p, gamma_from_arguments(arguments, "gamma", p, tol), tol)

        return text_result(await asyncio.to_thread(work))
