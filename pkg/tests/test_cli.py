import json

import numpy as np
import pytest

from kreinext import cli
from kreinext.cli import parse_dims, run
from kreinext.shared import MalformedInputError

C = 1 / np.sqrt(2)


def _run(capsys, *argv):
    status = run(list(argv))
    return status, json.loads(capsys.readouterr().out)


def _complex(matrix):
    return np.array([[re + 1j * im for re, im in row] for row in matrix])


def test_parametrize(capsys, fixture_path):
    status, payload = _run(capsys, "parametrize", fixture_path("ref2x2.json"))
    assert status == 0
    assert payload["ambient_dim"] == 2
    assert payload["dom_T"]["dim"] == 1
    assert payload["defect_dims"] == {"D_A": 1, "D_Gamma2_star": 1}
    np.testing.assert_allclose(np.abs(_complex(payload["Gamma2"])), [[C]], atol=1e-12)
    np.testing.assert_allclose(np.abs(_complex(payload["gamma_basis"])), [[0.0], [1.0]], atol=1e-12)


def test_extend_krein(capsys, fixture_path):
    status, payload = _run(capsys, "extend", fixture_path("ref2x2.json"), "--gamma", "krein")
    assert status == 0
    np.testing.assert_allclose(_complex(payload["T_tilde"]), [[0.0, C], [C, 0.5]], atol=1e-10)
    relation = payload["S_tilde"]
    assert relation["is_operator"]
    assert relation["infinity_multiplicity"] == 0
    np.testing.assert_allclose(relation["finite_spectrum"], [0.0, 3.0], atol=1e-10)
    assert payload["domain_decomposition"]["verified"]


def test_extend_friedrichs_has_multivalued_part(capsys, fixture_path):
    status, payload = _run(capsys, "extend", fixture_path("ref2x2.json"), "--gamma", "friedrichs")
    assert status == 0
    relation = payload["S_tilde"]
    assert not relation["is_operator"]
    assert relation["multivalued_part"]["dim"] == 1
    np.testing.assert_allclose(relation["finite_spectrum"], [1 / 3], atol=1e-10)


def test_extend_gamma_file(capsys, fixture_path):
    status, payload = _run(capsys, "extend", fixture_path("ref2x2.json"), "--gamma", fixture_path("gamma_half.json"))
    assert status == 0
    np.testing.assert_allclose(_complex(payload["T_tilde"]), [[0.0, C], [C, 0.25]], atol=1e-10)


def test_membership(capsys, fixture_path):
    problem = fixture_path("ref2x2.json")
    status, payload = _run(capsys, "membership", problem, "--candidate", fixture_path("bad_candidate.json"))
    assert status == 0
    assert payload == {"direct": False, "interval": False}
    status, payload = _run(
        capsys, "membership", problem, "--candidate", fixture_path("bad_candidate.json"), "--route", "interval"
    )
    assert payload == {"interval": False}


def test_compare(capsys, fixture_path):
    problem = fixture_path("ref2x2.json")
    status, payload = _run(capsys, "compare", problem, "--gamma-a", "krein", "--gamma-b", "friedrichs")
    assert status == 0
    assert payload == {"order": "le"}
    _, payload = _run(capsys, "compare", problem, "--gamma-a", "friedrichs", "--gamma-b", "krein")
    assert payload == {"order": "ge"}
    _, payload = _run(capsys, "--profile", "strict", "compare", problem, "--gamma-a", "neutral", "--gamma-b", "neutral")
    assert payload == {"order": "equal"}


def _assert_matches(actual, expected, where="$"):
    """Same keys and shapes as the frozen output; numbers to 1e-10, subspace bases by projection."""
    if isinstance(expected, dict):
        assert isinstance(actual, dict) and set(actual) == set(expected), where
        for key in expected:
            if key == "basis":
                P, Q = _complex(actual[key]), _complex(expected[key])
                assert P.shape == Q.shape, where
                np.testing.assert_allclose(P @ P.conj().T, Q @ Q.conj().T, atol=1e-10)
            else:
                _assert_matches(actual[key], expected[key], f"{where}.{key}")
    elif isinstance(expected, list):
        assert isinstance(actual, list) and len(actual) == len(expected), where
        for i, (a, e) in enumerate(zip(actual, expected)):
            _assert_matches(a, e, f"{where}[{i}]")
    elif isinstance(expected, (bool, str)) or expected is None:
        assert actual == expected, where
    else:
        assert actual == pytest.approx(expected, abs=1e-10), where


@pytest.mark.parametrize(
    "argv, golden",
    [
        (("parametrize", "ref2x2.json"), "ref2x2_parametrize.json"),
        (("extend", "ref2x2.json", "--gamma", "krein"), "ref2x2_extend_krein.json"),
        (("membership", "ref2x2.json", "--candidate", "bad_candidate.json"), "ref2x2_membership_bad_candidate.json"),
        (
            ("compare", "ref2x2.json", "--gamma-a", "krein", "--gamma-b", "friedrichs"),
            "ref2x2_compare_krein_friedrichs.json",
        ),
    ],
)
def test_golden_outputs(capsys, fixture_path, argv, golden):
    argv = [fixture_path(arg) if arg.endswith(".json") else arg for arg in argv]
    status, payload = _run(capsys, *argv)
    assert status == 0
    with open(fixture_path(f"golden/{golden}"), encoding="utf-8") as f:
        expected = json.load(f)
    _assert_matches(payload, expected)


@pytest.mark.parametrize("gamma", ["gamma_half.json", "krein", "friedrichs"])
def test_emitted_extension_is_a_member(capsys, fixture_path, tmp_path, gamma):
    problem = fixture_path("ref2x2.json")
    gamma = fixture_path(gamma) if gamma.endswith(".json") else gamma
    _, payload = _run(capsys, "extend", problem, "--gamma", gamma)
    candidate = tmp_path / "candidate.json"
    candidate.write_text(json.dumps({"matrix": payload["T_tilde"]}), encoding="utf-8")
    status, membership = _run(capsys, "membership", problem, "--candidate", str(candidate))
    assert status == 0
    assert membership == {"direct": True, "interval": True}


@pytest.mark.parametrize(
    "argv",
    [
        ("parametrize", "broken.json"),
        ("parametrize", "missing.json"),
        ("parametrize", "bad_utf8.json"),
        ("extend", "ref2x2.json", "--gamma", "dirichlet"),
        ("frobnicate",),
        ("verify", "--dims", "0"),
        ("demo", "laplacian", "--size", "3"),
    ],
)
def test_malformed_input_exit_code(capsys, fixture_path, argv):
    argv = [fixture_path(arg) if arg.endswith(".json") else arg for arg in argv]
    status, payload = _run(capsys, *argv)
    assert status == 1
    assert payload["error"]["kind"] == "MalformedInputError"


@pytest.mark.parametrize(
    "argv, kind, invariant",
    [
        (("extend", "ref2x2.json", "--gamma", "gamma_too_large.json"), "NotContractionError", "contraction"),
        (("parametrize", "not_positive.json"), "NotPositiveError", "positive"),
    ],
)
def test_invariant_violation_exit_code(capsys, fixture_path, argv, kind, invariant):
    argv = [fixture_path(arg) if arg.endswith(".json") else arg for arg in argv]
    status, payload = _run(capsys, *argv)
    assert status == 2
    assert payload["error"]["kind"] == kind
    assert payload["error"]["invariant"] == invariant


def test_verify(capsys):
    status, payload = _run(capsys, "verify", "--dims", "2,3", "--trials", "2", "--seed", "4")
    assert status == 0
    assert payload["passed"]
    assert payload["failures"] == 0
    assert {report["property"] for report in payload["reports"]} == {
        "interval_theorem",
        "monotone_antitone",
        "resolvent_continuity",
        "bijection",
        "cayley",
        "domain_decomposition",
        "block_criterion",
    }


def test_verify_is_reproducible(capsys):
    def strip(payload):
        for report in payload["reports"]:
            report.pop("elapsed_seconds")
        return payload

    _, first = _run(capsys, "verify", "--dims", "3", "--trials", "2", "--seed", "9")
    _, second = _run(capsys, "verify", "--dims", "3", "--trials", "2", "--seed", "9", "--workers", "2")
    assert strip(first) == strip(second)


def test_verification_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(cli, "run_verify", lambda *args: {"reports": [], "failures": 1, "passed": False})
    status, payload = _run(capsys, "verify")
    assert status == 3
    assert not payload["passed"]


def test_demo(capsys):
    status, payload = _run(capsys, "demo", "laplacian", "--size", "6", "--samples", "3")
    assert status == 0
    assert payload["passed"]
    assert payload["friedrichs"]["infinity_multiplicity"] == 2
    assert payload["krein"]["singular"]


@pytest.mark.parametrize("text, dims", [("2..4", [2, 3, 4]), ("2,5", [2, 5]), ("3", [3])])
def test_parse_dims(text, dims):
    assert parse_dims(text) == dims


@pytest.mark.parametrize("text", ["", "a..b", "4..2", "0,1"])
def test_parse_dims_rejects(text):
    with pytest.raises(MalformedInputError):
        parse_dims(text)
