"""History-assisted restart orchestration and baseline run drivers.

The hybrid runs the non-revisiting GA as its explorer. Whenever the
archive reports a region of interest (a leaf landing at depth lv+k), the
GA is suspended after the offspring in flight, the leaf points under the
depth-lv sub-root seed a CMA-ES state, and CMA-ES exploits out of the
shared evaluation budget. CMA-ES candidates are evaluated directly and
never inserted into the archive, so the blocked-region bookkeeping stays
a statement about the explorer only. When CMA-ES stops, the sub-root is
blocked and the suspended GA population resumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .benchmarks import BudgetedEvaluator, Problem
from .bsp import BspArchive, Region, RoiSuggestion
from .cmaes import (CmaState, StopReason, cma_check_stop, cma_init, cma_sample,
                    cma_update, default_lambda)
from .cnrga import (GaConfig, GaPopulation, crossover_pair, evaluate_via_archive,
                    ga_step, init_population)
from .errors import (BudgetExhaustedError, NumericalError, ParameterError,
                     SearchSpaceExhaustedError)

EXPLORE = "explore"
EXPLOIT = "exploit"


def ceil_log2(n: int) -> int:
    if n < 1:
        raise ParameterError("ceil_log2 needs a positive integer")
    return (int(n) - 1).bit_length()


def derive_depth_params(budget: int, lam: int) -> tuple[int, int]:
    """Depth thresholds (lv, k) = (ceil(log2 budget), ceil(log2 lambda))."""
    if budget < 2 or lam < 2:
        raise ParameterError("budget and lambda must both be >= 2")
    return ceil_log2(budget), ceil_log2(lam)


@dataclass
class HrConfig:
    budget: int
    lam: int
    lv: int
    k: int
    ga: GaConfig = field(default_factory=GaConfig)
    sigma_factor: float = 0.3

    def __post_init__(self):
        lv, k = derive_depth_params(self.budget, self.lam)
        if (self.lv, self.k) != (lv, k):
            raise ParameterError(f"lv/k must be {lv}/{k} for this budget and lambda")
        if self.sigma_factor <= 0:
            raise ParameterError("sigma_factor must be positive")
        if self.ga.lru_enabled:
            raise ParameterError("the hybrid prunes whole regions, not LRU units")

    @classmethod
    def for_problem(cls, budget: int, dim: int, ga: GaConfig | None = None,
                    sigma_factor: float = 0.3) -> "HrConfig":
        lam = default_lambda(dim)
        lv, k = derive_depth_params(budget, lam)
        return cls(budget, lam, lv, k, ga or GaConfig(), sigma_factor)


@dataclass
class Phase:
    kind: str  # explore | exploit
    start_eval: int
    end_eval: int
    roi_lower: list | None = None
    roi_upper: list | None = None
    stop_reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "start_eval": self.start_eval,
            "end_eval": self.end_eval,
            "roi_lower": self.roi_lower,
            "roi_upper": self.roi_upper,
            "stop_reason": self.stop_reason,
        }


@dataclass
class RunRecord:
    algo: str
    problem: str
    budget: int
    evals_used: int
    best_trace: list  # (eval_index, best-so-far) at every improvement
    phases: list
    final_coords: list
    final_fitness: float
    final_eval_index: int
    search_space_exhausted: bool = False
    tree_dump: str | None = None

    def to_dict(self) -> dict:
        return {
            "algo": self.algo,
            "problem": self.problem,
            "budget": self.budget,
            "evals_used": self.evals_used,
            "best_trace": [[i, v] for i, v in self.best_trace],
            "phases": [p.to_dict() for p in self.phases],
            "final_coords": list(self.final_coords),
            "final_fitness": self.final_fitness,
            "final_eval_index": self.final_eval_index,
            "search_space_exhausted": self.search_space_exhausted,
        }


class TracingEvaluator:
    """Budget gate that also records the best-so-far trace."""

    def __init__(self, inner: BudgetedEvaluator):
        self.inner = inner
        self.trace = []
        self.best = float("inf")
        self.best_coords = None
        self.best_at = 0

    @property
    def used(self) -> int:
        return self.inner.used

    @property
    def budget(self) -> int:
        return self.inner.budget

    @property
    def remaining(self) -> int:
        return self.inner.remaining

    def __call__(self, coords) -> float:
        value = self.inner(coords)
        if value < self.best:
            self.best = value
            self.best_coords = np.array(coords, dtype=float)
            self.best_at = self.inner.used
            self.trace.append((self.inner.used, value))
        return value


def seed_cma_from_roi(roi: RoiSuggestion, lam: int, domain: Region,
                      sigma_factor: float = 0.3) -> CmaState:
    """CMA-ES start state for a region of interest.

    The mean is the arithmetic mean of the collected solutions; the
    initial step size is sigma_factor times the longest side of the
    region. Sampling stays bounded by the full problem domain: the region
    guides the restart, it does not constrain the exploitation.
    """
    if not roi.seeds:
        raise ParameterError("a region of interest must carry at least one seed")
    mean0 = np.mean([p.coords for p in roi.seeds], axis=0)
    sigma0 = sigma_factor * float(roi.region.side_lengths().max())
    return cma_init(mean0, sigma0, lam, domain)


def _cma_phase(state: CmaState, evaluator: TracingEvaluator, rng) -> str:
    """Sample/evaluate/update until a stop fires; returns the reason string.

    Never raises on budget: candidates are evaluated only while budget
    remains, and a short generation ends the phase as budget_exhausted.
    """
    while True:
        stop = cma_check_stop(state, evaluator.used, evaluator.budget)
        if stop is not None:
            return stop.value
        try:
            candidates = cma_sample(state, rng)
        except NumericalError:
            return "numerical_error"
        fits = []
        for x in candidates:
            if evaluator.remaining <= 0:
                return StopReason.BUDGET_EXHAUSTED.value
            fits.append(evaluator(x))
        try:
            cma_update(state, candidates, np.array(fits))
        except NumericalError:
            return "numerical_error"


def _close_phase(phases: list, kind: str, start: int, end: int,
                 roi: RoiSuggestion | None = None, stop: str | None = None):
    if end < start:
        return
    if roi is not None:
        phases.append(Phase(kind, start, end, roi.region.lower.tolist(),
                            roi.region.upper.tolist(), stop))
    else:
        phases.append(Phase(kind, start, end, stop_reason=stop))


def _explore_generation(pop: GaPopulation, ga: GaConfig, archive: BspArchive,
                        evaluator, rng) -> GaPopulation:
    """One GA generation that suspends as soon as a region of interest is
    pending. On suspension the parents are returned unchanged; offspring
    evaluated so far stay in the archive and the best-so-far trace."""
    max_reject = 10 * ga.pop_size
    children = [pop.best()]
    while len(children) < ga.pop_size:
        for coords in crossover_pair(pop, ga, rng):
            if len(children) >= ga.pop_size:
                break
            children.append(evaluate_via_archive(coords, archive, evaluator, rng, max_reject))
            if archive.pending_roi is not None:
                return pop
    return GaPopulation(children, pop.generation + 1)


def hr_run(problem: Problem, config: HrConfig, rng,
           dump_tree: bool = False) -> RunRecord:
    """Full history-assisted restart run under one evaluation budget."""
    if config.budget < config.ga.pop_size:
        raise ParameterError("budget must cover at least the initial population")
    evaluator = TracingEvaluator(BudgetedEvaluator(problem, config.budget))
    archive = BspArchive(problem.domain, config.lv, config.k)
    phases: list[Phase] = []
    phase_start = 1
    exhausted = False
    try:
        pop = init_population(config.ga, archive, evaluator, rng)
        while True:
            if archive.pending_roi is not None:
                roi = archive.pending_roi
                archive.pending_roi = None
                _close_phase(phases, EXPLORE, phase_start, evaluator.used)
                phase_start = evaluator.used + 1
                state = seed_cma_from_roi(roi, config.lam, problem.domain,
                                          config.sigma_factor)
                reason = _cma_phase(state, evaluator, rng)
                archive.block(roi.subroot)
                _close_phase(phases, EXPLOIT, phase_start, evaluator.used, roi, reason)
                phase_start = evaluator.used + 1
                if reason == StopReason.BUDGET_EXHAUSTED.value:
                    break
                continue
            if evaluator.remaining <= 0:
                break
            pop = _explore_generation(pop, config.ga, archive, evaluator, rng)
    except BudgetExhaustedError:
        pass
    except SearchSpaceExhaustedError:
        exhausted = True
    _close_phase(phases, EXPLORE, phase_start, evaluator.used)
    return _finalize("hr", problem, evaluator, phases, exhausted,
                     archive.dump() if dump_tree else None)


def _finalize(algo, problem, evaluator, phases, exhausted, tree_dump=None) -> RunRecord:
    coords = evaluator.best_coords if evaluator.best_coords is not None else []
    return RunRecord(
        algo=algo,
        problem=problem.name,
        budget=evaluator.budget,
        evals_used=evaluator.used,
        best_trace=list(evaluator.trace),
        phases=list(phases),
        final_coords=list(np.asarray(coords, dtype=float)),
        final_fitness=evaluator.best,
        final_eval_index=evaluator.best_at,
        search_space_exhausted=exhausted,
        tree_dump=tree_dump,
    )


# -- baselines ----------------------------------------------------------

def run_cmaes_restart(problem: Problem, budget: int, rng) -> RunRecord:
    """Plain restarting CMA-ES: fresh uniform mean and sigma0 = 0.3 times
    the largest domain side on every non-budget stop, fixed population."""
    evaluator = TracingEvaluator(BudgetedEvaluator(problem, budget))
    domain = problem.domain
    lam = default_lambda(problem.dim)
    sigma0 = 0.3 * float(domain.side_lengths().max())
    phases: list[Phase] = []
    while evaluator.remaining > 0:
        start = evaluator.used + 1
        state = cma_init(domain.uniform_point(rng), sigma0, lam, domain)
        reason = _cma_phase(state, evaluator, rng)
        _close_phase(phases, EXPLOIT, start, evaluator.used, stop=reason)
    return _finalize("cmaes", problem, evaluator, phases, False)


def run_cnrga(problem: Problem, budget: int, rng, lru: bool,
              config: GaConfig | None = None, dump_tree: bool = False) -> RunRecord:
    """Pure non-revisiting GA, optionally with LRU memory pruning."""
    ga = config or GaConfig(lru_enabled=lru)
    if ga.lru_enabled != lru:
        raise ParameterError("config.lru_enabled contradicts the requested variant")
    evaluator = TracingEvaluator(BudgetedEvaluator(problem, budget))
    lv, k = derive_depth_params(budget, default_lambda(problem.dim))
    archive = BspArchive(problem.domain, lv, k)
    exhausted = False
    try:
        pop = init_population(ga, archive, evaluator, rng)
        while True:
            pop = ga_step(pop, ga, archive, evaluator, rng)
    except BudgetExhaustedError:
        pass
    except SearchSpaceExhaustedError:
        exhausted = True
    phases = [Phase(EXPLORE, 1, evaluator.used)] if evaluator.used else []
    name = "cnrga_lru" if lru else "cnrga"
    return _finalize(name, problem, evaluator, phases, exhausted,
                     archive.dump() if dump_tree else None)


ALGORITHMS = ("hr", "cmaes", "cnrga_lru", "cnrga")


def run_algorithm(problem: Problem, algo: str, budget: int, rng,
                  dump_tree: bool = False) -> RunRecord:
    """Run one algorithm by id under the shared budget accounting."""
    if algo == "hr":
        cfg = HrConfig.for_problem(budget, problem.dim)
        return hr_run(problem, cfg, rng, dump_tree=dump_tree)
    if algo in ("cmaes", "cmaes_restart"):
        return run_cmaes_restart(problem, budget, rng)
    if algo == "cnrga_lru":
        return run_cnrga(problem, budget, rng, lru=True, dump_tree=dump_tree)
    if algo == "cnrga":
        return run_cnrga(problem, budget, rng, lru=False, dump_tree=dump_tree)
    raise ParameterError(f"unknown algorithm id {algo!r}")


def run_baseline(problem: Problem, algo: str, budget: int, rng) -> RunRecord:
    """The two comparison baselines (accepts cmaes_restart and cnrga_lru)."""
    if algo not in ("cmaes_restart", "cmaes", "cnrga_lru", "cnrga"):
        raise ParameterError(f"unknown baseline id {algo!r}")
    return run_algorithm(problem, "cmaes" if algo == "cmaes_restart" else algo,
                         budget, rng)
