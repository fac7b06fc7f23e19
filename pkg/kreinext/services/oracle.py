"""Randomized verification harness.

Every suite draws its instances from a `Sampler`; trial `i` of a suite gets
its own generator seeded by (seed, ambient_dim, dom_dim, suite stream, i),
so serial and pooled runs produce identical reports.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import partial
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.stats import unitary_group

from ..shared import DEFAULT_TOLERANCE, KreinExtError, MalformedInputError, Tolerance, resolve_workers
from .cayley import (
    PartialOperator,
    cayley_transform,
    graph_residual,
    inverse_cayley,
    inverse_cayley_partial,
    relation_cayley,
    relation_resolvent,
    relation_spectrum,
)
from .contraction import block_psd_zero_corner
from .extensions import (
    ExtensionOrder,
    ExtremalKind,
    GammaParameter,
    MembershipRoute,
    compare_extensions,
    compare_with_forms,
    domain_decomposition,
    extend_contraction,
    extension_relation,
    extremal,
    extremal_relation,
    is_extension_member,
    parametrize,
    range_inclusion_check,
    recover_gamma,
    sandwich,
)
from .linalg import (
    SubspaceRelation,
    adjoint,
    complement,
    containment_residual,
    defect_pair,
    hermitian_part,
    is_psd,
    loewner_le,
    op_norm,
    orthonormal_basis,
    subspace_relation,
    subspace_sum,
)

logger = logging.getLogger(__name__)

# Increments of the contraction parameter stay strictly inside the unit ball.
BALL_MARGIN = 1e-12
# Acceptance bounds of the suites; they do not scale with the tolerance profile.
BIJECTION_TOL = 1e-10
CAYLEY_ROUND_TRIP_TOL = 1e-10
SPECTRAL_MAPPING_TOL = 1e-8
RESOLVENT_IDENTITY_TOL = 1e-10
# Norm identity between parameter and extension differences holds to rounding.
NORM_IDENTITY_TOL = 1e-12
DOMAIN_TOL = 1e-8
HALVING_RATIO = 0.5
HALVING_SLACK = 0.1


@dataclass(frozen=True)
class Sampler:
    seed: int
    ambient_dim: int
    dom_dim: int

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise MalformedInputError(f"seed must be non-negative, got {self.seed}")
        if not 1 <= self.dom_dim <= self.ambient_dim:
            raise MalformedInputError(
                f"need 1 <= dom_dim <= ambient_dim, got dom_dim={self.dom_dim}, ambient_dim={self.ambient_dim}"
            )

    def generator(self, *key: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, self.ambient_dim, self.dom_dim, *key])


@dataclass
class VerificationReport:
    property: str
    ambient_dim: int
    dom_dim: int
    seed: int
    trials: int
    failures: int
    worst_residual: float
    elapsed_seconds: float

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> Dict[str, object]:
        out = asdict(self)
        out["passed"] = self.passed
        return out


class TrialOutcome(NamedTuple):
    failed: bool
    residual: float


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------


def _complex_gaussian(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def _random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    if d == 1:
        return np.exp(2j * np.pi * rng.uniform()) * np.ones((1, 1))
    return unitary_group.rvs(d, random_state=rng)


def random_hermitian_contraction(
    rng: np.random.Generator, d: int, radius: float = 1.0
) -> np.ndarray:
    """Hermitian matrix with spectrum rescaled into [-radius, radius]."""
    if d == 0:
        return np.zeros((0, 0), dtype=complex)
    H = _complex_gaussian(rng, d, d)
    eigenvalues, U = scipy.linalg.eigh(hermitian_part(H))
    eigenvalues = eigenvalues / np.max(np.abs(eigenvalues)) * rng.uniform(0.5, 1.0) * radius
    return hermitian_part((U * eigenvalues) @ adjoint(U))


def random_contraction(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=complex)
    G = _complex_gaussian(rng, rows, cols)
    return G / op_norm(G) * rng.uniform(0.5, 1.0)


def sample_partial_symmetric_contraction(
    s: Sampler, rng: Optional[np.random.Generator] = None
) -> PartialOperator:
    """T = V A + W Gamma_2 D_A on a random dom(T) of dimension s.dom_dim."""
    rng = rng if rng is not None else s.generator()
    n, k = s.ambient_dim, s.dom_dim
    domain = orthonormal_basis(_complex_gaussian(rng, n, k))
    W = complement(domain).basis
    A = random_hermitian_contraction(rng, k)
    D_A, _ = defect_pair(A)
    gamma2 = random_contraction(rng, n - k, k)
    action = domain.basis @ A + W @ gamma2 @ D_A
    return PartialOperator(n, domain, action)


def sample_hermitian(s: Sampler, scale: float, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Random Hermitian n x n matrix with entries of size `scale`; not necessarily a contraction."""
    if not scale > 0:
        raise MalformedInputError(f"scale must be positive, got {scale}")
    rng = rng if rng is not None else s.generator()
    return scale * hermitian_part(_complex_gaussian(rng, s.ambient_dim, s.ambient_dim))


def _increment(rng: np.random.Generator, gamma: np.ndarray) -> np.ndarray:
    """Gamma + t P for a random PSD P, with t chosen so the result stays in the ball."""
    d = gamma.shape[0]
    X = _complex_gaussian(rng, d, d)
    P = hermitian_part(X @ adjoint(X)) / d
    headroom = 1.0 - BALL_MARGIN - float(scipy.linalg.eigvalsh(gamma)[-1])
    step = min(1.0, max(0.0, headroom) / float(scipy.linalg.eigvalsh(P)[-1]))
    return hermitian_part(gamma + step * P)


# ---------------------------------------------------------------------------
# Trial runner
# ---------------------------------------------------------------------------


def _guarded(name: str, trial: Callable[[int], TrialOutcome], index: int) -> TrialOutcome:
    try:
        return trial(index)
    except KreinExtError as exc:
        logger.warning("%s: trial %d raised %s: %s", name, index, type(exc).__name__, exc)
        return TrialOutcome(True, float("inf"))


def run_trials(
    name: str,
    s: Sampler,
    trials: int,
    trial: Callable[[int], TrialOutcome],
    bound: float,
    workers: Optional[int] = None,
) -> VerificationReport:
    if trials < 1:
        raise MalformedInputError(f"{name}: trials must be at least 1, got {trials}")
    start = time.perf_counter()
    pool_size = resolve_workers(workers)
    trial = partial(_guarded, name, trial)
    if pool_size > 1:
        with ThreadPoolExecutor(max_workers=pool_size) as executor:
            outcomes = list(executor.map(trial, range(trials)))
    else:
        outcomes = [trial(i) for i in range(trials)]
    failures = sum(1 for outcome in outcomes if outcome.failed)
    worst = max(outcome.residual for outcome in outcomes)
    report = VerificationReport(
        property=name,
        ambient_dim=s.ambient_dim,
        dom_dim=s.dom_dim,
        seed=s.seed,
        trials=trials,
        failures=failures,
        worst_residual=worst,
        elapsed_seconds=time.perf_counter() - start,
    )
    if failures:
        logger.error("%s (n=%d, k=%d): %d of %d trials failed", name, s.ambient_dim, s.dom_dim, failures, trials)
    elif worst > bound / 10:
        logger.warning("%s: worst residual %.3e is within 10x of its tolerance %.1e", name, worst, bound)
    return report


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


INTERVAL_STREAM = 1
MONOTONE_STREAM = 2
CONTINUITY_STREAM = 3
BIJECTION_STREAM = 4
CAYLEY_STREAM = 5
DOMAIN_STREAM = 6
BLOCK_STREAM = 7

HERMITIAN_SCALES = (0.1, 1.0, 10.0)


def _interval_trial(s: Sampler, tol: Tolerance, index: int) -> TrialOutcome:
    rng = s.generator(INTERVAL_STREAM, index)
    T = sample_partial_symmetric_contraction(s, rng)
    p = parametrize(T, tol)
    member = extend_contraction(p, random_hermitian_contraction(rng, p.defect_dim), tol)
    residual = op_norm(member @ p.dom_T.basis - p.action)

    def agree(B: np.ndarray) -> Optional[bool]:
        direct = is_extension_member(p, B, MembershipRoute.DIRECT, tol)
        interval = is_extension_member(p, B, MembershipRoute.INTERVAL, tol)
        return direct if direct == interval else None

    must_pass = [member, extremal(p, ExtremalKind.KREIN, tol), extremal(p, ExtremalKind.FRIEDRICHS, tol)]
    failed = any(agree(B) is not True for B in must_pass)

    scale = HERMITIAN_SCALES[index % len(HERMITIAN_SCALES)]
    W = p.complement.basis
    perturbed = member + W @ hermitian_part(_complex_gaussian(rng, W.shape[1], W.shape[1])) @ adjoint(W) * scale
    for B in (sample_hermitian(s, scale, rng), perturbed):
        failed = failed or agree(B) is None
    return TrialOutcome(failed, residual)


def verify_interval_theorem(
    s: Sampler, trials: int, tol: Tolerance = DEFAULT_TOLERANCE, workers: Optional[int] = None
) -> VerificationReport:
    """Direct and interval membership routes agree on members, boundary points and random candidates."""
    return run_trials("interval_theorem", s, trials, partial(_interval_trial, s, tol), tol.compare, workers)


def _monotone_trial(s: Sampler, tol: Tolerance, index: int) -> TrialOutcome:
    rng = s.generator(MONOTONE_STREAM, index)
    p = parametrize(sample_partial_symmetric_contraction(s, rng), tol)
    lower = random_hermitian_contraction(rng, p.defect_dim)
    upper = _increment(rng, lower) if p.defect_dim else lower
    T_lower = extend_contraction(p, lower, tol)
    T_upper = extend_contraction(p, upper, tol)

    E = p.defect_gamma2_star.basis
    D = p.D_gamma2_star
    expected = op_norm(D @ E @ (lower - upper) @ adjoint(E) @ D)
    gap = abs(op_norm(T_lower - T_upper) - expected)

    order, forms_agree = compare_with_forms(inverse_cayley(T_lower, tol), inverse_cayley(T_upper, tol), tol)
    failed = (
        not loewner_le(T_lower, T_upper, tol)
        or order not in (ExtensionOrder.GE, ExtensionOrder.EQUAL)
        or not forms_agree
        or gap > NORM_IDENTITY_TOL * max(1.0, expected)
        or not sandwich(p, lower, tol)
    )
    return TrialOutcome(failed, gap)


def verify_monotone_antitone(
    s: Sampler, trials: int, tol: Tolerance = DEFAULT_TOLERANCE, workers: Optional[int] = None
) -> VerificationReport:
    """Gamma' <= Gamma'' gives T~(Gamma') <= T~(Gamma'') and S~(Gamma') >= S~(Gamma'')."""
    return run_trials("monotone_antitone", s, trials, partial(_monotone_trial, s, tol), NORM_IDENTITY_TOL, workers)


def _continuity_trial(s: Sampler, steps: int, tol: Tolerance, delta_norm: float, index: int) -> TrialOutcome:
    rng = s.generator(CONTINUITY_STREAM, index)
    p = parametrize(sample_partial_symmetric_contraction(s, rng), tol)
    n, d = p.ambient_dim, p.defect_dim
    base = random_hermitian_contraction(rng, d, radius=0.5)
    direction = random_hermitian_contraction(rng, d)
    if d:
        direction = direction / op_norm(direction) * delta_norm
    xi = _complex_gaussian(rng, n, 3)
    xi_norm = op_norm(xi)

    T_base = extend_contraction(p, base, tol)
    R_base = inverse_cayley(T_base, tol)
    resolvent_base = relation_resolvent(R_base)
    identity_residual = op_norm(resolvent_base - (np.eye(n) + T_base) / 2)
    failed = identity_residual > RESOLVENT_IDENTITY_TOL

    bounds: List[float] = []
    for j in range(1, steps + 1):
        T_j = extend_contraction(p, base + 2.0 ** (-j) * direction, tol)
        R_j = inverse_cayley(T_j, tol)
        resolvent_j = relation_resolvent(R_j)
        identity_residual = max(identity_residual, op_norm(resolvent_j - (np.eye(n) + T_j) / 2))
        change = op_norm((resolvent_j - resolvent_base) @ xi)
        bound = 0.5 * op_norm(T_j - T_base) * xi_norm
        failed = failed or change > bound + tol.compare * xi_norm
        bounds.append(bound)

    if bounds and bounds[0] > tol.compare:
        ratios = np.array(bounds[1:]) / np.array(bounds[:-1])
        failed = failed or bool(np.any(np.abs(ratios - HALVING_RATIO) > HALVING_SLACK))
    failed = failed or identity_residual > RESOLVENT_IDENTITY_TOL
    return TrialOutcome(failed, identity_residual)


def verify_resolvent_continuity(
    s: Sampler,
    steps: int,
    tol: Tolerance = DEFAULT_TOLERANCE,
    trials: int = 1,
    delta_norm: float = 0.5,
    workers: Optional[int] = None,
) -> VerificationReport:
    """Resolvents at -1 move by at most half the contraction change along Gamma + 2^-j Delta."""
    if steps < 1:
        raise MalformedInputError(f"steps must be at least 1, got {steps}")
    trial = partial(_continuity_trial, s, steps, tol, delta_norm)
    return run_trials("resolvent_continuity", s, trials, trial, RESOLVENT_IDENTITY_TOL, workers)


def _bijection_trial(s: Sampler, tol: Tolerance, index: int) -> TrialOutcome:
    rng = s.generator(BIJECTION_STREAM, index)
    T = sample_partial_symmetric_contraction(s, rng)
    p = parametrize(T, tol)
    gamma = random_hermitian_contraction(rng, p.defect_dim)
    B = extend_contraction(p, gamma, tol)
    recovered = recover_gamma(p, B, tol).matrix
    rebuilt = extend_contraction(p, recovered, tol)
    residual = max(op_norm(recovered - gamma), op_norm(rebuilt - B))
    # S~(Gamma) must extend the S that T came from.
    S = inverse_cayley_partial(T, tol)
    extends = graph_residual(inverse_cayley(B, tol), S) <= tol.compare * max(1.0, op_norm(S.action))
    return TrialOutcome(residual > BIJECTION_TOL or not extends, residual)


def verify_bijection(
    s: Sampler, trials: int, tol: Tolerance = DEFAULT_TOLERANCE, workers: Optional[int] = None
) -> VerificationReport:
    """Gamma -> T~(Gamma) -> Gamma and B -> Gamma -> B round trips."""
    return run_trials("bijection", s, trials, partial(_bijection_trial, s, tol), BIJECTION_TOL, workers)


def _same_partial_operator(X: PartialOperator, Y: PartialOperator, tol: Tolerance) -> float:
    if subspace_relation(X.domain, Y.domain, tol) is not SubspaceRelation.EQUAL:
        return float("inf")
    # Y's action re-expressed on X's domain basis.
    change = adjoint(Y.domain.basis) @ X.domain.basis
    return op_norm(Y.action @ change - X.action) / max(1.0, op_norm(X.action))


def _cayley_trial(s: Sampler, tol: Tolerance, index: int) -> TrialOutcome:
    rng = s.generator(CAYLEY_STREAM, index)
    T = sample_partial_symmetric_contraction(s, rng)
    S = inverse_cayley_partial(T, tol)
    T_again = cayley_transform(S, tol)
    round_trip = max(
        _same_partial_operator(T, T_again, tol),
        _same_partial_operator(S, inverse_cayley_partial(T_again, tol), tol),
    )
    if not T_again.is_contraction(tol):
        round_trip = float("inf")

    n = s.ambient_dim
    planted = index % min(n, 3)
    t = np.concatenate([-np.ones(planted), rng.uniform(-0.9, 1.0, n - planted)])
    U = _random_unitary(rng, n)
    T_tilde = hermitian_part((U * t) @ adjoint(U))
    R = inverse_cayley(T_tilde, tol)
    finite, infinity = relation_spectrum(R, tol)
    expected = np.sort((1.0 - t[planted:]) / (1.0 + t[planted:]))
    spectral = (
        np.max(np.abs(finite - expected) / np.maximum(1.0, np.abs(expected))) if finite.size == expected.size else np.inf
    )
    round_trip = max(round_trip, op_norm(relation_cayley(R) - T_tilde))
    resolvent = op_norm(relation_resolvent(R) - (np.eye(n) + T_tilde) / 2)
    positive = finite.size == 0 or finite[0] >= -tol.psd
    failed = (
        infinity != planted
        or not positive
        or round_trip > CAYLEY_ROUND_TRIP_TOL
        or spectral > SPECTRAL_MAPPING_TOL
        or resolvent > RESOLVENT_IDENTITY_TOL
    )
    return TrialOutcome(failed, float(max(round_trip, spectral, resolvent)))


def verify_cayley(
    s: Sampler, trials: int, tol: Tolerance = DEFAULT_TOLERANCE, workers: Optional[int] = None
) -> VerificationReport:
    """Cayley round trips, spectral mapping and the resolvent identity."""
    return run_trials("cayley", s, trials, partial(_cayley_trial, s, tol), CAYLEY_ROUND_TRIP_TOL, workers)


def _domain_trial(s: Sampler, tol: Tolerance, index: int) -> TrialOutcome:
    rng = s.generator(DOMAIN_STREAM, index)
    p = parametrize(sample_partial_symmetric_contraction(s, rng), tol)
    d = p.defect_dim
    friedrichs = extremal_relation(p, ExtremalKind.FRIEDRICHS, tol)
    failed = not range_inclusion_check(p, tol)
    worst = 0.0
    samples = (
        random_hermitian_contraction(rng, d),
        GammaParameter.krein(d).matrix,
        GammaParameter.friedrichs(d).matrix,
    )
    for gamma in samples:
        decomposition = domain_decomposition(p, gamma, tol)
        total = subspace_sum(decomposition.dom_F, decomposition.correction, tol)
        worst = max(
            worst,
            containment_residual(total, decomposition.dom_gamma),
            containment_residual(decomposition.dom_gamma, total),
        )
        minimal = subspace_relation(decomposition.dom_F, decomposition.dom_gamma, tol) in (
            SubspaceRelation.EQUAL,
            SubspaceRelation.U_IN_V,
        )
        maximal = compare_extensions(extension_relation(p, gamma, tol), friedrichs, tol) in (
            ExtensionOrder.LE,
            ExtensionOrder.EQUAL,
        )
        failed = failed or not (decomposition.verified and minimal and maximal)
    return TrialOutcome(failed or worst > DOMAIN_TOL, worst)


def verify_domain_decomposition(
    s: Sampler, trials: int, tol: Tolerance = DEFAULT_TOLERANCE, workers: Optional[int] = None
) -> VerificationReport:
    """Domain formula, range inclusions, and Friedrichs maximality with minimal domain."""
    return run_trials("domain_decomposition", s, trials, partial(_domain_trial, s, tol), DOMAIN_TOL, workers)


def _block_trial(s: Sampler, tol: Tolerance, index: int) -> TrialOutcome:
    rng = s.generator(BLOCK_STREAM, index)
    rows, cols = s.dom_dim, s.ambient_dim
    case = index % 3
    if case == 1:
        eigenvalues = np.concatenate([[-rng.uniform(0.1, 1.0)], rng.uniform(0.1, 1.0, cols - 1)])
    else:
        eigenvalues = rng.uniform(0.1, 1.0, cols)
    U = _random_unitary(rng, cols)
    N = hermitian_part((U * eigenvalues) @ adjoint(U))
    M = np.zeros((rows, cols), dtype=complex)
    if case == 2:
        M = _complex_gaussian(rng, rows, cols)
        M = M / op_norm(M) * rng.uniform(0.1, 1.0)
    block = np.block([[np.zeros((rows, rows)), M], [adjoint(M), N]])
    brute = is_psd(block, tol)
    residual = max(0.0, -float(scipy.linalg.eigvalsh(block)[0])) if case == 0 else 0.0
    return TrialOutcome(brute != block_psd_zero_corner(M, N, tol), residual)


def verify_block_criterion(
    s: Sampler, trials: int, tol: Tolerance = DEFAULT_TOLERANCE, workers: Optional[int] = None
) -> VerificationReport:
    """[[0, M], [M^H, N]] >= 0 iff M = 0 and N >= 0, against direct eigenvalues."""
    return run_trials("block_criterion", s, trials, partial(_block_trial, s, tol), tol.psd, workers)


CONTINUITY_STEPS = 8


def dom_dims_for(n: int) -> List[int]:
    return sorted({max(1, d) for d in (1, n // 2, n - 1)})


def run_all(
    dims: Iterable[int],
    trials: int,
    seed: int,
    tol: Tolerance = DEFAULT_TOLERANCE,
    workers: Optional[int] = None,
) -> List[VerificationReport]:
    """Every suite for every ambient dimension and its default domain dimensions."""
    suites: Sequence[Callable[[Sampler], VerificationReport]] = (
        lambda s: verify_interval_theorem(s, trials, tol, workers),
        lambda s: verify_monotone_antitone(s, trials, tol, workers),
        lambda s: verify_resolvent_continuity(s, CONTINUITY_STEPS, tol, trials=trials, workers=workers),
        lambda s: verify_bijection(s, trials, tol, workers),
        lambda s: verify_cayley(s, trials, tol, workers),
        lambda s: verify_domain_decomposition(s, trials, tol, workers),
        lambda s: verify_block_criterion(s, trials, tol, workers),
    )
    reports: List[VerificationReport] = []
    for n in dims:
        for k in dom_dims_for(n):
            sampler = Sampler(seed, n, k)
            for suite in suites:
                reports.append(suite(sampler))
    failed = sum(report.failures for report in reports)
    logger.info("run_all: %d reports, %d failed trials", len(reports), failed)
    return reports
