import numpy as np
import pytest

from kreinext.services.problem_files import (
    load_candidate,
    load_problem,
    parse_candidate,
    parse_gamma,
    parse_problem,
    read_json,
    resolve_gamma,
)
from kreinext.shared import (
    DEFAULT_TOLERANCE,
    TOLERANCE_PROFILES,
    DimensionMismatchError,
    MalformedInputError,
    NotContractionError,
    NotPositiveError,
    decode_matrix,
    encode_matrix,
    resolve_tolerance,
    resolve_workers,
)

C = 1 / np.sqrt(2)


def test_decode_matrix_accepts_pairs_and_reals():
    M = decode_matrix([[[1, 2], 3.5], [0, [0.0, -1.0]]])
    np.testing.assert_array_equal(M, [[1 + 2j, 3.5], [0, -1j]])
    assert decode_matrix([]).shape == (0, 0)
    assert encode_matrix(M)[0][0] == [1.0, 2.0]


@pytest.mark.parametrize(
    "obj",
    [
        "not a list",
        [1.0, 2.0],
        [[1.0, 2.0], [3.0]],
        [[True]],
        [[[1.0, 2.0, 3.0]]],
        [[[1.0, "x"]]],
        [[float("nan")]],
    ],
)
def test_decode_matrix_rejects(obj):
    with pytest.raises(MalformedInputError):
        decode_matrix(obj)


def test_resolve_tolerance_profiles(monkeypatch):
    assert resolve_tolerance() == DEFAULT_TOLERANCE
    assert resolve_tolerance("strict") == TOLERANCE_PROFILES["strict"]
    monkeypatch.setenv("KREINEXT_TOLERANCE_PROFILE", "loose")
    assert resolve_tolerance() == TOLERANCE_PROFILES["loose"]
    assert resolve_tolerance("default") == DEFAULT_TOLERANCE


def test_resolve_tolerance_overrides():
    tol = resolve_tolerance("strict", {"compare": 1e-6})
    assert tol.compare == 1e-6
    assert tol.psd == TOLERANCE_PROFILES["strict"].psd
    with pytest.raises(MalformedInputError):
        resolve_tolerance("sloppy")
    with pytest.raises(MalformedInputError):
        resolve_tolerance(None, {"epsilon": 1e-3})
    with pytest.raises(MalformedInputError):
        resolve_tolerance(None, {"psd": -1.0})


def test_resolve_workers(monkeypatch):
    assert resolve_workers() == 1
    assert resolve_workers(4) == 4
    assert resolve_workers(0) == 1
    monkeypatch.setenv("KREINEXT_WORKERS", "3")
    assert resolve_workers() == 3
    monkeypatch.setenv("KREINEXT_WORKERS", "many")
    with pytest.raises(MalformedInputError):
        resolve_workers()


def test_load_problem_reference(fixture_path, tol):
    problem = load_problem(fixture_path("ref2x2.json"))
    assert problem.ambient_dim == 2
    S = problem.to_operator(tol)
    assert S.dim == 1
    np.testing.assert_allclose(np.abs(S.domain.basis[:, 0]), np.array([1.0, C]) / np.sqrt(1.5), atol=1e-12)
    assert abs(S.lower_bound() - 1 / 3) < 1e-12


def test_problem_lower_bound_shift(tol):
    data = {"ambient_dim": 2, "domain_basis": [[1.0], [0.0]], "action": [[-2.0], [0.0]], "lower_bound_shift": -2.0}
    S = parse_problem(data).to_operator(tol)
    np.testing.assert_allclose(S.compression(), [[0.0]], atol=1e-12)


def test_problem_tolerance_override():
    data = {"ambient_dim": 1, "domain_basis": [[1.0]], "action": [[1.0]], "tolerance": {"compare": 1e-5}}
    assert parse_problem(data).resolve_tolerance("strict").compare == 1e-5


@pytest.mark.parametrize(
    "data",
    [
        {"ambient_dim": 2, "domain_basis": [[1.0], [0.0]]},
        {"ambient_dim": 0, "domain_basis": [], "action": []},
        {"ambient_dim": 2, "domain_basis": [[1.0], [0.0]], "action": [[1.0], [0.0]], "extra": 1},
        {"ambient_dim": 3, "domain_basis": [[1.0], [0.0]], "action": [[1.0], [0.0]]},
        [1, 2, 3],
    ],
)
def test_parse_problem_rejects(data):
    with pytest.raises(MalformedInputError):
        parse_problem(data).to_operator()


def test_problem_shape_mismatch():
    data = {"ambient_dim": 2, "domain_basis": [[1.0], [0.0]], "action": [[1.0, 0.0], [0.0, 1.0]]}
    with pytest.raises(DimensionMismatchError):
        parse_problem(data).to_operator()


def test_not_positive_problem(fixture_path, tol):
    from kreinext.services.cayley import cayley_transform

    S = load_problem(fixture_path("not_positive.json")).to_operator(tol)
    with pytest.raises(NotPositiveError):
        cayley_transform(S, tol)


def test_read_json_errors(fixture_path, tmp_path):
    with pytest.raises(MalformedInputError):
        read_json(fixture_path("broken.json"))
    with pytest.raises(MalformedInputError):
        read_json(tmp_path / "missing.json")


def test_read_json_rejects_undecodable_and_unreadable_files(fixture_path, tmp_path):
    with pytest.raises(MalformedInputError, match="UTF-8"):
        read_json(fixture_path("bad_utf8.json"))
    with pytest.raises(MalformedInputError, match="cannot read"):
        read_json(tmp_path)


@pytest.mark.parametrize(
    "data, expected",
    [
        ("krein", 1.0),
        ("friedrichs", -1.0),
        ({"matrix": "neutral"}, 0.0),
        ({"matrix": [[[0.5, 0.0]]]}, 0.5),
        ([[-0.25]], -0.25),
    ],
)
def test_parse_gamma(data, expected, tol):
    gamma = parse_gamma(data, 1, tol)
    np.testing.assert_allclose(gamma.matrix, [[expected]])


def test_parse_gamma_rejects(tol):
    with pytest.raises(MalformedInputError):
        parse_gamma("dirichlet", 1, tol)
    with pytest.raises(MalformedInputError):
        parse_gamma({"gamma": [[0.5]]}, 1, tol)
    with pytest.raises(NotContractionError):
        parse_gamma([[1.5]], 1, tol)


def test_resolve_gamma(fixture_path, tol):
    assert resolve_gamma("krein", 3, tol).dim == 3
    np.testing.assert_allclose(resolve_gamma(fixture_path("gamma_half.json"), 1, tol).matrix, [[0.5]])
    with pytest.raises(NotContractionError):
        resolve_gamma(fixture_path("gamma_too_large.json"), 1, tol)
    with pytest.raises(MalformedInputError):
        resolve_gamma("no-such-gamma.json", 1, tol)


def test_candidates(fixture_path):
    B = load_candidate(fixture_path("bad_candidate.json"))
    np.testing.assert_allclose(B, [[0.0, C], [C, 0.6]])
    np.testing.assert_allclose(parse_candidate([[1.0, 0.0], [0.0, 1.0]]), np.eye(2))
    with pytest.raises(MalformedInputError):
        parse_candidate({"matrix": [[1.0]], "note": "x"})
