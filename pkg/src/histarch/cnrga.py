"""Continuous non-revisiting genetic algorithm.

Exploration is driven purely by uniform gene-exchange crossover, which
never invents a new coordinate value, so duplicates are common; every
candidate is routed through the BSP archive, and a duplicate is replaced
by an adaptive mutation drawn from the revisited leaf's own cell instead
of being re-evaluated. The LRU-pruning configuration caps archive memory
for the cNrGA-LRU baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bsp import BspArchive, NewLeaf, Revisit, SearchPoint
from .errors import BudgetExhaustedError, ParameterError, SearchSpaceExhaustedError

MAX_REVISIT_RETRIES = 100


@dataclass
class GaConfig:
    pop_size: int = 100
    crossover_rate: float = 0.5
    tournament_size: int = 2
    lru_enabled: bool = False
    lru_fraction: float = 0.5
    lru_capacity: int = 10_000

    def __post_init__(self):
        if self.pop_size < 2:
            raise ParameterError("pop_size must be >= 2")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ParameterError("crossover_rate must lie in [0, 1]")
        if self.tournament_size < 1:
            raise ParameterError("tournament_size must be >= 1")
        if not 0.0 < self.lru_fraction < 1.0:
            raise ParameterError("lru_fraction must lie in (0, 1)")
        if self.lru_capacity < 1:
            raise ParameterError("lru_capacity must be >= 1")


@dataclass
class GaPopulation:
    individuals: list[SearchPoint]
    generation: int = 0

    def best(self) -> SearchPoint:
        return min(self.individuals, key=lambda p: p.fitness)


def evaluate_via_archive(coords, archive: BspArchive, evaluator, rng,
                         max_reject: int | None = None) -> SearchPoint:
    """Insert, dodge revisits and blocked cells, evaluate exactly once.

    A revisit is replaced by a uniform draw from the revisited leaf's
    cell (after 100 consecutive revisits, a uniform domain draw). A
    blocked outcome is replaced by a uniform domain draw rejection-sampled
    to stay outside every blocked box; ``max_reject`` consecutive
    rejections mean the blocked boxes cover the domain, which aborts the
    search. ``evaluator`` must be callable and expose ``remaining``.
    """
    if max_reject is None:
        max_reject = 1000
    if evaluator.remaining <= 0:
        raise BudgetExhaustedError("no evaluations left")
    coords = np.asarray(coords, dtype=float)
    revisit_streak = 0
    while True:
        outcome = archive.insert(coords)
        if isinstance(outcome, NewLeaf):
            point = outcome.node.point
            point.fitness = evaluator(point.coords)
            return point
        if isinstance(outcome, Revisit):
            revisit_streak += 1
            if revisit_streak > MAX_REVISIT_RETRIES:
                coords = archive.domain.uniform_point(rng)
            else:
                coords = archive.mutation_region(outcome.leaf).uniform_point(rng)
            continue
        # blocked: resample anywhere outside the blocked boxes
        revisit_streak = 0
        rejections = 0
        while True:
            coords = archive.domain.uniform_point(rng)
            if not archive.in_blocked_region(coords):
                break
            rejections += 1
            if rejections >= max_reject:
                raise SearchSpaceExhaustedError(
                    f"{rejections} consecutive draws landed in blocked regions")


def tournament_pick(pop: GaPopulation, rng, size: int) -> SearchPoint:
    idx = rng.integers(0, len(pop.individuals), size)
    return min((pop.individuals[i] for i in idx), key=lambda p: p.fitness)


def crossover_pair(pop: GaPopulation, config: GaConfig, rng):
    """Two offspring coordinate vectors from tournament parents.

    Each coordinate is swapped between the offspring with probability
    crossover_rate, so every gene comes verbatim from one of the parents.
    """
    p1 = tournament_pick(pop, rng, config.tournament_size)
    p2 = tournament_pick(pop, rng, config.tournament_size)
    c1 = p1.coords.copy()
    c2 = p2.coords.copy()
    swap = rng.random(c1.size) < config.crossover_rate
    c1[swap] = p2.coords[swap]
    c2[swap] = p1.coords[swap]
    return c1, c2


def init_population(config: GaConfig, archive: BspArchive, evaluator, rng) -> GaPopulation:
    individuals = []
    max_reject = 10 * config.pop_size
    while len(individuals) < config.pop_size:
        coords = archive.domain.uniform_point(rng)
        individuals.append(evaluate_via_archive(coords, archive, evaluator, rng, max_reject))
    return GaPopulation(individuals, 0)


def ga_step(pop: GaPopulation, config: GaConfig, archive: BspArchive,
            evaluator, rng) -> GaPopulation:
    """Next generation: tournament parents, gene-exchange crossover,
    archive-routed evaluation, generational replacement with 1-elitism."""
    max_reject = 10 * config.pop_size
    children = [pop.best()]
    while len(children) < config.pop_size:
        for coords in crossover_pair(pop, config, rng):
            if len(children) >= config.pop_size:
                break
            children.append(evaluate_via_archive(coords, archive, evaluator, rng, max_reject))
    nxt = GaPopulation(children, pop.generation + 1)
    if config.lru_enabled:
        maybe_prune(archive, config)
    return nxt


def maybe_prune(archive: BspArchive, config: GaConfig):
    """LRU-prune once the stored-point count reaches the memory cap."""
    if archive.n_points >= config.lru_capacity:
        archive.prune_lru(config.lru_fraction)
