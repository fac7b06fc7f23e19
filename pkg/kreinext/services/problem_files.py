"""JSON input files: problems, Gamma parameters and membership candidates."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, PositiveInt, ValidationError

from ..shared import (
    DEFAULT_TOLERANCE,
    DimensionMismatchError,
    MalformedInputError,
    Tolerance,
    decode_matrix,
    resolve_tolerance,
)
from .cayley import PartialOperator, shift_lower_bound
from .extensions import GammaParameter

logger = logging.getLogger(__name__)

SpecialGamma = Literal["krein", "friedrichs", "neutral"]
SPECIAL_GAMMAS = ("krein", "friedrichs", "neutral")


class ProblemFile(BaseModel):
    """Positive (or semibounded, with `lower_bound_shift`) partial operator S."""

    model_config = ConfigDict(extra="forbid")

    ambient_dim: PositiveInt
    domain_basis: List[Any]
    action: List[Any]
    lower_bound_shift: Optional[float] = None
    tolerance: Optional[Dict[str, float]] = None

    def resolve_tolerance(self, profile: Optional[str] = None) -> Tolerance:
        return resolve_tolerance(profile, self.tolerance)

    def _column_matrix(self, rows: List[Any], name: str) -> np.ndarray:
        M = decode_matrix(rows, name)
        if M.size == 0 and M.shape[0] == 0:
            M = np.zeros((self.ambient_dim, 0), dtype=complex)
        if M.shape[0] != self.ambient_dim:
            raise MalformedInputError(f"{name}: expected {self.ambient_dim} rows, got {M.shape[0]}")
        return M

    def to_operator(self, tol: Tolerance = DEFAULT_TOLERANCE) -> PartialOperator:
        """Orthonormalize the domain basis, re-express the action, then apply the lower bound shift."""
        X = self._column_matrix(self.domain_basis, "domain_basis")
        Y = self._column_matrix(self.action, "action")
        if X.shape != Y.shape:
            raise DimensionMismatchError(f"domain_basis {X.shape} and action {Y.shape} differ in shape")
        S = PartialOperator.from_columns(X, Y, tol)
        if self.lower_bound_shift:
            logger.debug("Shifting S by its lower bound m0=%g", self.lower_bound_shift)
            S = shift_lower_bound(S, self.lower_bound_shift, tol)
        return S


class GammaFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    matrix: Union[SpecialGamma, List[Any]]


class CandidateFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    matrix: List[Any]


def read_json(path: Union[str, Path]) -> Any:
    file_path = Path(path)
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as exc:
        raise MalformedInputError(f"file not found: {file_path}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{file_path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    except UnicodeDecodeError as exc:
        raise MalformedInputError(f"{file_path}: not valid UTF-8 (byte {exc.start})") from exc
    except OSError as exc:
        raise MalformedInputError(f"{file_path}: cannot read ({exc.strerror or exc})") from exc


def _validate(model: type, data: Any, source: str) -> Any:
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise MalformedInputError(f"{source}: {exc.errors()[0]['msg']} at {exc.errors()[0]['loc']}") from exc


def parse_problem(data: Any, source: str = "problem") -> ProblemFile:
    return _validate(ProblemFile, data, source)


def load_problem(path: Union[str, Path]) -> ProblemFile:
    return parse_problem(read_json(path), str(path))


def special_gamma(name: str, dim: int) -> GammaParameter:
    if name == "krein":
        return GammaParameter.krein(dim)
    if name == "friedrichs":
        return GammaParameter.friedrichs(dim)
    if name == "neutral":
        return GammaParameter.neutral(dim)
    raise MalformedInputError(f"unknown special Gamma {name!r} (expected one of {', '.join(SPECIAL_GAMMAS)})")


def parse_gamma(data: Any, dim: int, tol: Tolerance = DEFAULT_TOLERANCE, source: str = "gamma") -> GammaParameter:
    """A Gamma file body: a special name, {"matrix": name}, {"matrix": rows} or bare rows."""
    if isinstance(data, str):
        return special_gamma(data, dim)
    if isinstance(data, list):
        data = {"matrix": data}
    gamma_file = _validate(GammaFile, data, source)
    if isinstance(gamma_file.matrix, str):
        return special_gamma(gamma_file.matrix, dim)
    return GammaParameter.from_matrix(decode_matrix(gamma_file.matrix, "Gamma"), tol)


def resolve_gamma(value: str, dim: int, tol: Tolerance = DEFAULT_TOLERANCE) -> GammaParameter:
    """CLI --gamma value: a special name or a path to a Gamma file."""
    if value in SPECIAL_GAMMAS:
        return special_gamma(value, dim)
    return parse_gamma(read_json(value), dim, tol, source=value)


def parse_candidate(data: Any, source: str = "candidate") -> np.ndarray:
    if isinstance(data, list):
        data = {"matrix": data}
    return decode_matrix(_validate(CandidateFile, data, source).matrix, "candidate")


def load_candidate(path: Union[str, Path]) -> np.ndarray:
    return parse_candidate(read_json(path), str(path))
