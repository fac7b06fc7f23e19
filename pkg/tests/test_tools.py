import asyncio
import json

import numpy as np
import pytest

from kreinext.server import KreinExtMCPServer, describe_tolerances
from kreinext.tools import CompareTool, ExtendTool, MembershipTool, ParametrizeTool

C = 1 / np.sqrt(2)
PROBLEM = {
    "ambient_dim": 2,
    "domain_basis": [[[1.0, 0.0]], [[C, 0.0]]],
    "action": [[[1.0, 0.0]], [[-C, 0.0]]],
}


@pytest.fixture
def server():
    return KreinExtMCPServer()


def _payload(contents):
    assert len(contents) == 1
    return json.loads(contents[0].text)


def _call(server, name, arguments):
    return _payload(asyncio.run(server.call(name, arguments)))


def test_tool_registry(server):
    assert set(server.tool_handlers) == {"parametrize", "extend", "membership", "compare", "verify", "demo"}
    for name, handler in server.tool_handlers.items():
        tool = handler.list_tool()
        assert tool.name == name
        assert tool.inputSchema["type"] == "object"


def test_parametrize_tool():
    payload = _payload(asyncio.run(ParametrizeTool().handle({"problem": PROBLEM})))
    assert payload["defect_dims"]["D_Gamma2_star"] == 1


def test_extend_tool_with_matrix_gamma():
    payload = _payload(asyncio.run(ExtendTool().handle({"problem": PROBLEM, "gamma": [[[1.0, 0.0]]]})))
    assert payload["S_tilde"]["is_operator"]
    np.testing.assert_allclose(payload["S_tilde"]["finite_spectrum"], [0.0, 3.0], atol=1e-10)


def test_membership_tool():
    candidate = [[0.0, C], [C, 0.5]]
    payload = _payload(asyncio.run(MembershipTool().handle({"problem": PROBLEM, "candidate": candidate})))
    assert payload == {"direct": True, "interval": True}


def test_compare_tool():
    arguments = {"problem": PROBLEM, "gamma_a": "krein", "gamma_b": "friedrichs", "profile": "loose"}
    assert _payload(asyncio.run(CompareTool().handle(arguments))) == {"order": "le"}


def test_verify_and_demo_tools(server):
    payload = _call(server, "verify", {"dims": "2", "trials": 2, "seed": 1})
    assert payload["passed"]
    payload = _call(server, "demo", {"size": 5, "samples": 2})
    assert payload["passed"]
    assert payload["friedrichs"]["infinity_multiplicity"] == 2


def test_error_payloads(server):
    payload = _call(server, "extend", {"problem": PROBLEM, "gamma": [[1.5]]})
    assert payload["error"]["kind"] == "NotContractionError"
    assert payload["error"]["invariant"] == "contraction"

    payload = _call(server, "extend", {"problem": PROBLEM})
    assert payload["error"]["kind"] == "MalformedInputError"

    payload = _call(server, "membership", {"problem": PROBLEM, "candidate": [[1.0]], "route": "sideways"})
    assert payload["error"]["kind"] == "MalformedInputError"

    payload = _call(server, "verify", {"trials": True})
    assert payload["error"]["kind"] == "MalformedInputError"

    payload = _call(server, "no_such_tool", {})
    assert payload["error"]["kind"] == "ValueError"


def test_describe_tolerances(monkeypatch):
    monkeypatch.setenv("KREINEXT_TOLERANCE_PROFILE", "strict")
    described = describe_tolerances()
    assert described["active"] == described["profiles"]["strict"]
    assert set(described["profiles"]) == {"default", "strict", "loose"}
