"""Minimal second-difference operator and its extremal extensions.

S acts as the tridiagonal(-1, 2, -1) stencil on vectors vanishing at both
end points. Its selfadjoint extensions fix the missing boundary behaviour;
the Friedrichs one is the interior Dirichlet problem with the end points
sent to infinity, the Krein one keeps the discrete harmonic (linear)
functions in its kernel.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Dict, Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse

from ..shared import (
    DEFAULT_TOLERANCE,
    MalformedInputError,
    NotPositiveError,
    Tolerance,
    VerificationFailure,
    encode_reals,
)
from .cayley import PartialOperator, cayley_transform, inverse_cayley, relation_spectrum
from .extensions import (
    ExtensionParametrization,
    ExtremalKind,
    domain_decomposition,
    extend_contraction,
    extremal,
    extremal_relation,
    parametrize,
    sandwich,
)
from .linalg import Subspace, adjoint
from .oracle import Sampler, TrialOutcome, VerificationReport, random_hermitian_contraction, run_trials

logger = logging.getLogger(__name__)

MIN_GRID = 4
DEMO_STREAM = 11


@dataclass(frozen=True)
class MinimalLaplacianProblem:
    n: int
    L: np.ndarray = field(repr=False)
    S: PartialOperator = field(repr=False)

    @property
    def dirichlet_block(self) -> np.ndarray:
        V = self.S.domain.basis
        return adjoint(V) @ self.L @ V


def minimal_laplacian(n: int, tol: Tolerance = DEFAULT_TOLERANCE) -> MinimalLaplacianProblem:
    if n < MIN_GRID:
        raise MalformedInputError(f"grid size must be at least {MIN_GRID}, got {n}")
    L = scipy.sparse.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(n, n)).toarray().astype(complex)
    V = np.eye(n, dtype=complex)[:, 1 : n - 1]
    S = PartialOperator(n, Subspace(n, V), L @ V)
    if not S.is_positive(tol):
        raise NotPositiveError("interior second-difference block is not positive", -S.lower_bound())
    problem = MinimalLaplacianProblem(n=n, L=L, S=S)
    complement_dim = parametrize(cayley_transform(S, tol), tol).complement.dim
    if complement_dim != 2:
        raise VerificationFailure(f"expected a two-dimensional complement of ran(I + S), got {complement_dim}")
    return problem


def _counts(spectrum: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """Eigenvalue counting function N(t) = #{lambda <= t}."""
    return np.searchsorted(np.sort(spectrum), thresholds, side="right")


def _counting_consistent(lower: np.ndarray, upper: np.ndarray, tol: Tolerance) -> bool:
    """A smaller relation has at least as many eigenvalues below every threshold."""
    thresholds = np.unique(np.concatenate([lower, upper]))
    if thresholds.size == 0:
        return True
    thresholds = np.concatenate([thresholds, (thresholds[1:] + thresholds[:-1]) / 2])
    slack = tol.compare * np.maximum(1.0, np.abs(thresholds))
    return bool(np.all(_counts(upper, thresholds) <= _counts(lower, thresholds + slack)))


def _order_trial(
    p: ExtensionParametrization,
    sampler: Sampler,
    bounds: Tuple[np.ndarray, np.ndarray],
    spectra: Tuple[np.ndarray, np.ndarray],
    tol: Tolerance,
    index: int,
) -> TrialOutcome:
    krein, friedrichs = bounds
    krein_spectrum, friedrichs_spectrum = spectra
    rng = sampler.generator(DEMO_STREAM, index)
    gamma = random_hermitian_contraction(rng, p.defect_dim)
    T_gamma = extend_contraction(p, gamma, tol)
    spectrum, _ = relation_spectrum(inverse_cayley(T_gamma, tol), tol)
    residual = max(
        0.0,
        -float(scipy.linalg.eigvalsh(krein - T_gamma)[0]),
        -float(scipy.linalg.eigvalsh(T_gamma - friedrichs)[0]),
    )
    ok = (
        sandwich(p, gamma, tol)
        and domain_decomposition(p, gamma, tol).verified
        and _counting_consistent(krein_spectrum, spectrum, tol)
        and _counting_consistent(spectrum, friedrichs_spectrum, tol)
    )
    return TrialOutcome(not ok, residual)


@dataclass
class DemoReport:
    n: int
    samples: int
    seed: int
    dom_dim: int
    defect_dim: int
    krein_spectrum: np.ndarray
    krein_infinity: int
    friedrichs_spectrum: np.ndarray
    friedrichs_infinity: int
    dirichlet_spectrum: np.ndarray
    order: VerificationReport
    tol: Tolerance = field(default=DEFAULT_TOLERANCE, repr=False)

    @property
    def krein_lambda_min(self) -> float:
        return float(self.krein_spectrum[0]) if self.krein_spectrum.size else float("inf")

    @property
    def krein_singular(self) -> bool:
        return self.krein_lambda_min <= self.tol.psd

    def dirichlet_difference(self) -> Optional[float]:
        # Recorded, not asserted.
        if self.friedrichs_spectrum.size != self.dirichlet_spectrum.size:
            return None
        return float(np.max(np.abs(self.friedrichs_spectrum - self.dirichlet_spectrum), initial=0.0))

    @property
    def passed(self) -> bool:
        return self.order.passed and self.krein_singular

    def to_dict(self) -> Dict[str, Any]:
        difference = self.dirichlet_difference()
        return {
            "n": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "dom_dim": self.dom_dim,
            "defect_dim": self.defect_dim,
            "krein": {
                "finite_spectrum": encode_reals(self.krein_spectrum),
                "infinity_multiplicity": self.krein_infinity,
                "lambda_min": self.krein_lambda_min,
                "singular": self.krein_singular,
            },
            "friedrichs": {
                "finite_spectrum": encode_reals(self.friedrichs_spectrum),
                "infinity_multiplicity": self.friedrichs_infinity,
            },
            "dirichlet_comparison": {
                "dirichlet_spectrum": encode_reals(self.dirichlet_spectrum),
                "max_abs_difference": difference,
                "matches": difference is not None and difference <= self.tol.compare,
            },
            "order_checks": self.order.to_dict(),
            "passed": self.passed,
        }


def demo_report(
    prob: MinimalLaplacianProblem,
    gamma_samples: int,
    seed: int,
    tol: Tolerance = DEFAULT_TOLERANCE,
    workers: Optional[int] = None,
) -> DemoReport:
    """Krein and Friedrichs spectra, plus order checks over sampled Gamma."""
    p = parametrize(cayley_transform(prob.S, tol), tol)
    krein = extremal(p, ExtremalKind.KREIN, tol)
    friedrichs = extremal(p, ExtremalKind.FRIEDRICHS, tol)
    krein_finite, krein_infinity = relation_spectrum(extremal_relation(p, ExtremalKind.KREIN, tol), tol)
    friedrichs_relation = extremal_relation(p, ExtremalKind.FRIEDRICHS, tol)
    friedrichs_finite, friedrichs_infinity = relation_spectrum(friedrichs_relation, tol)
    sampler = Sampler(seed, prob.n, prob.S.dim)
    trial = partial(_order_trial, p, sampler, (krein, friedrichs), (krein_finite, friedrichs_finite), tol)
    order = run_trials("laplacian_order", sampler, gamma_samples, trial, tol.psd, workers)
    report = DemoReport(
        n=prob.n,
        samples=gamma_samples,
        seed=seed,
        dom_dim=prob.S.dim,
        defect_dim=p.defect_dim,
        krein_spectrum=krein_finite,
        krein_infinity=krein_infinity,
        friedrichs_spectrum=friedrichs_finite,
        friedrichs_infinity=friedrichs_infinity,
        dirichlet_spectrum=scipy.linalg.eigvalsh(prob.dirichlet_block),
        order=order,
        tol=tol,
    )
    logger.info(
        "demo_report: n=%d, defect=%d, lambda_min(S_K)=%.3e, order failures=%d",
        prob.n, p.defect_dim, report.krein_lambda_min, order.failures,
    )
    return report
