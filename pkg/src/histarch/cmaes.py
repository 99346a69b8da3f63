"""Covariance matrix adaptation evolution strategy, self-contained.

Candidates are drawn from N(m, sigma^2 C); the mean moves to the weighted
recombination of the best candidates, two evolution paths accumulate the
mean movement, the isotropic path drives step-size adaptation and the
anisotropic path the rank-1 covariance update. Strategy constants follow
the standard tutorial defaults. Box constraints are handled by resampling,
with a coordinate clamp only as a bounded last resort, because absorbing
candidates onto the boundary piles up duplicates there.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .bsp import Region
from .errors import InputError, NumericalError, ParameterError


class StopReason(enum.Enum):
    BUDGET_EXHAUSTED = "budget_exhausted"
    COV_CONDITION = "cov_condition"
    STAGNATION = "stagnation"
    TOL_FUN = "tol_fun"
    TOL_X = "tol_x"


def default_lambda(dim: int) -> int:
    """Recommended population size 4 + floor(3 ln D)."""
    if dim < 1:
        raise ParameterError("dimension must be >= 1")
    return 4 + int(math.floor(3.0 * math.log(dim)))


def stagnation_window(dim: int, lam: int) -> int:
    """Generations of flat best objective that count as stagnation."""
    return 10 + (30 * dim + lam - 1) // lam


@dataclass
class CmaState:
    mean: np.ndarray
    sigma: float
    cov: np.ndarray
    path_sigma: np.ndarray
    path_c: np.ndarray
    generation: int
    lam: int
    mu: int
    weights: np.ndarray
    mu_eff: float
    c_sigma: float
    d_sigma: float
    c_c: float
    c_1: float
    c_mu: float
    chi_n: float
    domain: Region
    sigma0: float
    eig_interval: int
    # tolerances; None disables the corresponding stop
    cov_condition_limit: float | None = 1e14
    stagnation_tol: float = 1e-12
    tol_fun: float | None = 1e-12
    tol_x: float | None = None
    # eigendecomposition cache
    eig_basis: np.ndarray | None = None
    eig_scale: np.ndarray | None = None  # sqrt of eigenvalues
    eig_generation: int = -1
    best_history: deque = field(default_factory=deque)
    last_fit_range: float = float("inf")

    @property
    def dim(self) -> int:
        return self.mean.size


def cma_init(mean0: np.ndarray, sigma0: float, lam: int, domain: Region,
             cov_condition_limit: float | None = 1e14,
             stagnation_tol: float = 1e-12,
             tol_fun: float | None = 1e-12,
             tol_x_factor: float | None = 1e-12) -> CmaState:
    """Fresh strategy state: identity covariance, zero paths."""
    mean0 = np.asarray(mean0, dtype=float)
    dim = mean0.size
    if sigma0 <= 0:
        raise ParameterError("sigma0 must be positive")
    if lam < 2:
        raise ParameterError("population size must be >= 2")
    if not domain.contains(mean0):
        raise ParameterError("initial mean must lie inside the domain")

    mu = lam // 2
    raw = np.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
    weights = raw / raw.sum()
    mu_eff = 1.0 / np.sum(weights ** 2)

    c_sigma = (mu_eff + 2.0) / (dim + mu_eff + 5.0)
    d_sigma = 1.0 + 2.0 * max(0.0, math.sqrt((mu_eff - 1.0) / (dim + 1.0)) - 1.0) + c_sigma
    c_c = (4.0 + mu_eff / dim) / (dim + 4.0 + 2.0 * mu_eff / dim)
    c_1 = 2.0 / ((dim + 1.3) ** 2 + mu_eff)
    c_mu = min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((dim + 2.0) ** 2 + mu_eff))
    chi_n = math.sqrt(dim) * (1.0 - 1.0 / (4.0 * dim) + 1.0 / (21.0 * dim ** 2))
    eig_interval = max(1, int(1.0 / (10.0 * dim * (c_1 + c_mu))))

    window = stagnation_window(dim, lam)
    return CmaState(
        mean=mean0.copy(),
        sigma=float(sigma0),
        cov=np.eye(dim),
        path_sigma=np.zeros(dim),
        path_c=np.zeros(dim),
        generation=0,
        lam=int(lam),
        mu=mu,
        weights=weights,
        mu_eff=float(mu_eff),
        c_sigma=c_sigma,
        d_sigma=d_sigma,
        c_c=c_c,
        c_1=c_1,
        c_mu=c_mu,
        chi_n=chi_n,
        domain=domain,
        sigma0=float(sigma0),
        eig_interval=eig_interval,
        cov_condition_limit=cov_condition_limit,
        stagnation_tol=stagnation_tol,
        tol_fun=tol_fun,
        tol_x=None if tol_x_factor is None else tol_x_factor * sigma0,
        best_history=deque(maxlen=window),
    )


def _refresh_eig(state: CmaState):
    if not np.isfinite(state.cov).all():
        raise NumericalError("covariance matrix contains non-finite entries")
    try:
        eigvals, basis = np.linalg.eigh(state.cov)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("eigendecomposition failed") from exc
    if not np.isfinite(eigvals).all() or eigvals.min() <= 0:
        raise NumericalError("covariance matrix lost positive definiteness")
    state.eig_basis = basis
    state.eig_scale = np.sqrt(eigvals)
    state.eig_generation = state.generation


def cma_sample(state: CmaState, rng: np.random.Generator) -> list[np.ndarray]:
    """Draw lambda candidates from N(m, sigma^2 C), kept inside the domain.

    Out-of-domain draws are resampled up to 100 times, then clamped to
    the box as a last resort.
    """
    if state.eig_basis is None or state.generation - state.eig_generation >= state.eig_interval:
        _refresh_eig(state)
    basis, scale = state.eig_basis, state.eig_scale
    lower, upper = state.domain.lower, state.domain.upper
    candidates = []
    for _ in range(state.lam):
        x = None
        for _ in range(100):
            z = rng.standard_normal(state.dim)
            y = basis @ (scale * z)
            cand = state.mean + state.sigma * y
            if (cand >= lower).all() and (cand <= upper).all():
                x = cand
                break
        if x is None:
            x = np.clip(cand, lower, upper)
        candidates.append(x)
    return candidates


def cma_update(state: CmaState, candidates: list[np.ndarray], fitnesses: np.ndarray):
    """One generation step: recombine, cumulate paths, adapt sigma and C."""
    fitnesses = np.asarray(fitnesses, dtype=float)
    if len(candidates) != state.lam or fitnesses.size != state.lam:
        raise InputError(f"expected exactly {state.lam} evaluated candidates")
    if not np.isfinite(fitnesses).all():
        raise InputError("fitness values must be finite")

    dim = state.dim
    order = np.argsort(fitnesses, kind="stable")
    xs = np.asarray(candidates)[order[: state.mu]]

    old_mean = state.mean
    new_mean = state.weights @ xs
    shift = (new_mean - old_mean) / state.sigma

    if state.eig_basis is None or state.eig_generation < state.generation - state.eig_interval:
        _refresh_eig(state)
    basis, scale = state.eig_basis, state.eig_scale
    inv_sqrt_shift = basis @ ((basis.T @ shift) / scale)

    c_s = state.c_sigma
    state.path_sigma = (1.0 - c_s) * state.path_sigma + \
        math.sqrt(c_s * (2.0 - c_s) * state.mu_eff) * inv_sqrt_shift

    gen1 = state.generation + 1
    ps_norm = float(np.linalg.norm(state.path_sigma))
    hsig = ps_norm / math.sqrt(1.0 - (1.0 - c_s) ** (2 * gen1)) / state.chi_n \
        < 1.4 + 2.0 / (dim + 1.0)

    c_c = state.c_c
    state.path_c = (1.0 - c_c) * state.path_c
    if hsig:
        state.path_c = state.path_c + math.sqrt(c_c * (2.0 - c_c) * state.mu_eff) * shift

    steps = (xs - old_mean) / state.sigma
    rank_mu = (steps.T * state.weights) @ steps
    c1a = state.c_1 * (1.0 - (0.0 if hsig else 1.0) * c_c * (2.0 - c_c))
    cov = (1.0 - c1a - state.c_mu) * state.cov \
        + state.c_1 * np.outer(state.path_c, state.path_c) \
        + state.c_mu * rank_mu
    state.cov = 0.5 * (cov + cov.T)

    state.sigma *= math.exp((c_s / state.d_sigma) * (ps_norm / state.chi_n - 1.0))

    state.mean = new_mean
    state.generation = gen1
    state.best_history.append(float(fitnesses.min()))
    state.last_fit_range = float(fitnesses.max() - fitnesses.min())


def cma_check_stop(state: CmaState, evals_used: int, budget: int) -> StopReason | None:
    """First matching stop in priority order, or None to keep going."""
    if evals_used >= budget:
        return StopReason.BUDGET_EXHAUSTED
    if state.cov_condition_limit is not None:
        eigvals = np.linalg.eigvalsh(state.cov)
        if eigvals.min() <= 0 or eigvals.max() / eigvals.min() > state.cov_condition_limit:
            return StopReason.COV_CONDITION
    window = state.best_history.maxlen
    if len(state.best_history) == window:
        hist = state.best_history
        if max(hist) - min(hist) <= state.stagnation_tol:
            return StopReason.STAGNATION
    # tol_fun only kicks in after the stagnation window has had its chance,
    # so a flat landscape is reported as stagnation, not premature tol_fun
    if state.tol_fun is not None and state.generation >= window \
            and state.last_fit_range <= state.tol_fun:
        return StopReason.TOL_FUN
    if state.tol_x is not None \
            and state.sigma * math.sqrt(float(np.max(np.diag(state.cov)))) < state.tol_x:
        return StopReason.TOL_X
    return None
