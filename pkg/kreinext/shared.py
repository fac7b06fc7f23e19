"""Shared constants, configuration and utilities for kreinext."""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

import numpy as np
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, PositiveFloat, ValidationError


logger = logging.getLogger(__name__)

TOLERANCE_PROFILE_ENV = "KREINEXT_TOLERANCE_PROFILE"
LOG_LEVEL_ENV = "KREINEXT_LOG_LEVEL"
WORKERS_ENV = "KREINEXT_WORKERS"

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class Tolerance(BaseModel):
    """Numerical slack used by every decision in the library.

    ortho: orthonormality of stored bases.
    rank_rel: relative singular/eigenvalue cutoff for rank decisions.
    psd: allowed negative eigenvalue slack in PSD decisions.
    contraction: allowed excess of an operator norm over 1.
    compare: residual bound for equality and reconstruction checks.
    """

    model_config = ConfigDict(frozen=True)

    ortho: PositiveFloat = 1e-10
    rank_rel: PositiveFloat = 1e-8
    psd: PositiveFloat = 1e-9
    contraction: PositiveFloat = 1e-9
    compare: PositiveFloat = 1e-8


TOLERANCE_PROFILES: Dict[str, Tolerance] = {
    "default": Tolerance(),
    "strict": Tolerance(ortho=1e-12, rank_rel=1e-10, psd=1e-11, contraction=1e-11, compare=1e-10),
    "loose": Tolerance(ortho=1e-8, rank_rel=1e-6, psd=1e-7, contraction=1e-7, compare=1e-6),
}

DEFAULT_TOLERANCE = TOLERANCE_PROFILES["default"]


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class KreinExtError(Exception):
    """Base class for all kreinext errors."""


class MalformedInputError(KreinExtError):
    """Input file or argument could not be parsed into the expected structure."""


class InvariantViolation(KreinExtError):
    """A mathematical precondition or invariant does not hold within tolerance."""

    invariant = "invariant"

    def __init__(self, message: str, residual: float = float("nan"), invariant: Optional[str] = None) -> None:
        super().__init__(message)
        self.residual = float(residual)
        if invariant is not None:
            self.invariant = invariant

    def to_dict(self) -> Dict[str, Any]:
        residual: Optional[float] = self.residual if np.isfinite(self.residual) else None
        return {
            "kind": type(self).__name__,
            "invariant": self.invariant,
            "residual": residual,
            "message": str(self),
        }


class NotHermitianError(InvariantViolation):
    invariant = "hermitian"


class NotContractionError(InvariantViolation):
    invariant = "contraction"


class NotPSDError(InvariantViolation):
    invariant = "positive_semidefinite"


class NotSymmetricError(InvariantViolation):
    invariant = "symmetric"


class NotPositiveError(InvariantViolation):
    invariant = "positive"


class InconsistentFactorizationError(InvariantViolation):
    invariant = "consistent_factorization"


class NotInjectiveError(InvariantViolation):
    invariant = "injective"


class NotAnExtensionError(InvariantViolation):
    invariant = "extends_operator"


class DimensionMismatchError(InvariantViolation):
    invariant = "dimension"


class VerificationFailure(KreinExtError):
    """An internal cross-check or an oracle suite reported failures."""


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


def load_environment(env_path: Optional[Path] = None) -> None:
    """Load a .env file without overriding variables already set."""
    if env_path is not None and env_path.exists():
        load_dotenv(env_path, override=False)
        logger.debug("Loaded .env from: %s", env_path)
    else:
        load_dotenv(override=False)


def resolve_tolerance(
    profile: Optional[str] = None,
    overrides: Optional[Mapping[str, float]] = None,
) -> Tolerance:
    """Resolve a Tolerance: explicit profile, then env, then the default profile."""
    name = (profile or os.getenv(TOLERANCE_PROFILE_ENV) or "default").strip().lower()
    if name not in TOLERANCE_PROFILES:
        raise MalformedInputError(
            f"Unknown tolerance profile '{name}' (expected one of {', '.join(sorted(TOLERANCE_PROFILES))})"
        )
    base = TOLERANCE_PROFILES[name]
    if not overrides:
        return base
    unknown = set(overrides) - set(Tolerance.model_fields)
    if unknown:
        raise MalformedInputError(f"Unknown tolerance fields: {', '.join(sorted(unknown))}")
    try:
        return Tolerance(**{**base.model_dump(), **dict(overrides)})
    except ValidationError as exc:
        raise MalformedInputError(f"Invalid tolerance override: {exc}") from exc


def resolve_workers(workers: Optional[int] = None) -> int:
    raw = workers if workers is not None else os.getenv(WORKERS_ENV, "1")
    try:
        value = int(raw)
    except (TypeError, ValueError) as exc:
        raise MalformedInputError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc
    return max(1, value)


def configure_logging(default_level: str = "WARNING") -> None:
    # Logs go to stderr; stdout is reserved for report JSON.
    logging.basicConfig(
        level=os.getenv(LOG_LEVEL_ENV, default_level).upper(),
        format=LOG_FORMAT,
    )


# ---------------------------------------------------------------------------
# JSON codec
# ---------------------------------------------------------------------------


def encode_complex(z: complex) -> List[float]:
    return [float(np.real(z)), float(np.imag(z))]


def encode_matrix(M: np.ndarray) -> List[List[List[float]]]:
    """Row-major nested array of [re, im] pairs."""
    arr = np.asarray(M, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {arr.shape}")
    return [[encode_complex(z) for z in row] for row in arr]


def encode_reals(values: np.ndarray) -> List[float]:
    return [float(v) for v in np.asarray(values, dtype=float).ravel()]


def _decode_scalar(entry: Any, where: str) -> complex:
    if isinstance(entry, bool):
        raise MalformedInputError(f"{where}: booleans are not numbers")
    if isinstance(entry, (int, float)):
        value = complex(float(entry), 0.0)
    elif isinstance(entry, (list, tuple)) and len(entry) == 2 and all(
        isinstance(part, (int, float)) and not isinstance(part, bool) for part in entry
    ):
        value = complex(float(entry[0]), float(entry[1]))
    else:
        raise MalformedInputError(f"{where}: expected [re, im] pair, got {entry!r}")
    if not (np.isfinite(value.real) and np.isfinite(value.imag)):
        raise MalformedInputError(f"{where}: non-finite entry")
    return value


def decode_matrix(obj: Any, name: str = "matrix") -> np.ndarray:
    """Parse a row-major nested array of [re, im] pairs (plain reals accepted)."""
    if not isinstance(obj, list):
        raise MalformedInputError(f"{name}: expected a list of rows")
    if not obj:
        return np.zeros((0, 0), dtype=complex)
    if not all(isinstance(row, list) for row in obj):
        raise MalformedInputError(f"{name}: every row must be a list")
    width = len(obj[0])
    if any(len(row) != width for row in obj):
        raise MalformedInputError(f"{name}: rows have different lengths")
    out = np.empty((len(obj), width), dtype=complex)
    for i, row in enumerate(obj):
        for j, entry in enumerate(row):
            out[i, j] = _decode_scalar(entry, f"{name}[{i}][{j}]")
    return out
