from __future__ import annotations

import asyncio
from typing import Any, Dict, List

from mcp.types import Tool as McpTool, TextContent

from ..services.reports import run_demo
from ..shared import resolve_tolerance
from .common import PROFILE_SCHEMA, optional_int, text_result


class DemoTool:
    name = "demo"

    def list_tool(self) -> McpTool:
        return McpTool(
            name=self.name,
            description="Krein and Friedrichs extensions of the minimal second-difference operator",
            inputSchema={
                "type": "object",
                "properties": {
                    "size": {"type": "integer", "minimum": 4, "default": 6},
                    "samples": {"type": "integer", "minimum": 1, "default": 50},
                    "seed": {"type": "integer", "minimum": 0, "default": 0},
                    "profile": PROFILE_SCHEMA,
                },
                "required": [],
            },
        )

    async def handle(self, arguments: Dict[str, Any]) -> List[TextContent]:
        size = optional_int(arguments, "size", 6)
        samples = optional_int(arguments, "samples", 50)
        seed = optional_int(arguments, "seed", 0)
        tol = resolve_tolerance(arguments.get("profile"))
        return text_result(await asyncio.to_thread(run_demo, size, samples, seed, tol))
