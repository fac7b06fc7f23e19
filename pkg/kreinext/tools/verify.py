from __future__ import annotations

import asyncio
from typing import Any, Dict, List

from mcp.types import Tool as McpTool, TextContent

from ..cli import parse_dims
from ..services.reports import run_verify
from ..shared import resolve_tolerance
from .common import PROFILE_SCHEMA, optional_int, text_result


class VerifyTool:
    name = "verify"

    def list_tool(self) -> McpTool:
        return McpTool(
            name=self.name,
            description="Run the randomized verification suites and report failures and worst residuals",
            inputSchema={
                "type": "object",
                "properties": {
                    "dims": {"type": "string", "default": "2..4", "description": "e.g. 2..5 or 2,4"},
                    "trials": {"type": "integer", "minimum": 1, "default": 50},
                    "seed": {"type": "integer", "minimum": 0, "default": 0},
                    "profile": PROFILE_SCHEMA,
                },
                "required": [],
            },
        )

    async def handle(self, arguments: Dict[str, Any]) -> List[TextContent]:
        dims = parse_dims(str(arguments.get("dims", "2..4")))
        trials = optional_int(arguments, "trials", 50)
        seed = optional_int(arguments, "seed", 0)
        tol = resolve_tolerance(arguments.get("profile"))
        payload = await asyncio.to_thread(run_verify, dims, trials, seed, tol)
        return text_result(payload)
