from __future__ import annotations

import asyncio
from typing import Any, Dict, List

from mcp.types import Tool as McpTool, TextContent

from ..services.reports import parametrize_report
from .common import PROBLEM_SCHEMA, PROFILE_SCHEMA, problem_from_arguments, text_result


class ParametrizeTool:
    name = "parametrize"

    def list_tool(self) -> McpTool:
        return McpTool(
            name=self.name,
            description="Parametrization data of a positive partial operator and the basis Gamma is read in",
            inputSchema={
                "type": "object",
                "properties": {"problem": PROBLEM_SCHEMA, "profile": PROFILE_SCHEMA},
                "required": ["problem"],
            },
        )

    async def handle(self, arguments: Dict[str, Any]) -> List[TextContent]:
        def work() -> Dict[str, Any]:
            p, _ = problem_from_arguments(arguments)
            return parametrize_report(p)

        return text_result(await asyncio.to_thread(work))
