"""MCP stdio server exposing the extension computations as tools."""

import asyncio
import json
import logging
from typing import Any, Dict, List

from mcp.server import Server
import mcp.server.stdio
import mcp.types as types
from pydantic import AnyUrl

from .services.reports import dumps, error_payload
from .shared import TOLERANCE_PROFILES, KreinExtError, configure_logging, load_environment, resolve_tolerance
from .tools import CompareTool, DemoTool, ExtendTool, MembershipTool, ParametrizeTool, VerifyTool

logger = logging.getLogger(__name__)

TOLERANCE_URI = "kreinext://tolerance"


class KreinExtMCPServer:
    """Positive selfadjoint extensions of a partial operator.

    Problems are passed inline as JSON objects with `ambient_dim`,
    `domain_basis` and `action`. Run `parametrize` first: Gamma
    matrices for `extend` and `compare` are read in the `gamma_basis`
    it reports.
    """

    def __init__(self) -> None:
        self.server = Server("kreinext")
        self.tool_handlers: Dict[str, Any] = {}
        self._init_tools()
        self._setup_handlers()

    def _init_tools(self) -> None:
        handlers = [ParametrizeTool(), ExtendTool(), MembershipTool(), CompareTool(), VerifyTool(), DemoTool()]
        self.tool_handlers = {handler.name: handler for handler in handlers}

    async def call(self, name: str, arguments: Dict[str, Any]) -> List[types.TextContent]:
        handler = self.tool_handlers.get(name)
        try:
            if handler is None:
                raise ValueError(f"Unknown tool: {name}")
            return await handler.handle(arguments or {})
        except KreinExtError as exc:
            logger.warning("%s failed: %s: %s", name, type(exc).__name__, exc)
            return [types.TextContent(type="text", text=dumps(error_payload(exc)))]
        except Exception as exc:
            logger.exception("Tool execution error: %s", exc)
            return [types.TextContent(type="text", text=json.dumps({"error": {"kind": type(exc).__name__, "message": str(exc)}}))]

    def _setup_handlers(self) -> None:
        @self.server.list_tools()
        async def handle_list_tools() -> List[types.Tool]:
            return [handler.list_tool() for handler in self.tool_handlers.values()]

        @self.server.call_tool()
        async def handle_call_tool(name: str, arguments: Dict[str, Any]) -> List[types.TextContent]:
            return await self.call(name, arguments)

        @self.server.list_resources()
        async def handle_list_resources() -> List[types.Resource]:  # type: ignore
            return [
                types.Resource(
                    uri=AnyUrl(TOLERANCE_URI),
                    name="Tolerance profiles",
                    description="Numerical tolerance profiles and the active one",
                    mimeType="application/json",
                )
            ]

        @self.server.read_resource()
        async def handle_read_resource(uri: AnyUrl) -> str:  # type: ignore
            if str(uri) == TOLERANCE_URI:
                return json.dumps(describe_tolerances(), indent=2)
            raise ValueError(f"Unknown resource: {uri}")


def describe_tolerances() -> Dict[str, Any]:
    return {
        "active": resolve_tolerance().model_dump(),
        "profiles": {name: tol.model_dump() for name, tol in TOLERANCE_PROFILES.items()},
    }


async def run_stdio_server(server: KreinExtMCPServer) -> None:
    async with mcp.server.stdio.stdio_server() as (read_stream, write_stream):
        await server.server.run(
            read_stream,
            write_stream,
            server.server.create_initialization_options(),
        )


async def main() -> None:
    load_environment()
    configure_logging("INFO")
    logger.info("Starting kreinext MCP server…")
    instance = KreinExtMCPServer()
    await run_stdio_server(instance)


def cli() -> None:
    """Console script entrypoint (sync wrapper)."""
    asyncio.run(main())


if __name__ == "__main__":
    cli()
