"""Rank tables and nonparametric significance tests for run results.

Ranking follows the comparison-table convention: per problem, algorithms
are ranked by median final error (lower is better) and exact ties share
the averaged rank. Pairwise significance against a reference algorithm
uses the two-group Kruskal-Wallis test, which is a monotone transform of
the Mann-Whitney U statistic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc
from scipy.stats import rankdata

from .errors import ParameterError

MARK_BETTER = "+"
MARK_WORSE = "-"
MARK_NONE = "."


def kruskal_wallis(groups) -> tuple[float, float]:
    """Tie-corrected H statistic and chi-square upper-tail p value.

    All observations identical across all groups is a defined edge case:
    H = 0, p = 1.
    """
    arrays = [np.asarray(g, dtype=float) for g in groups]
    if len(arrays) < 2:
        raise ParameterError("need at least two groups")
    if any(a.size < 2 for a in arrays):
        raise ParameterError("every group needs at least two observations")
    pooled = np.concatenate(arrays)
    n_total = pooled.size
    ranks = rankdata(pooled)
    h = 0.0
    offset = 0
    for a in arrays:
        r_sum = ranks[offset:offset + a.size].sum()
        h += r_sum * r_sum / a.size
        offset += a.size
    h = 12.0 / (n_total * (n_total + 1.0)) * h - 3.0 * (n_total + 1.0)
    _, counts = np.unique(pooled, return_counts=True)
    correction = 1.0 - float(np.sum(counts ** 3 - counts)) / (n_total ** 3 - n_total)
    if correction <= 0.0:
        return 0.0, 1.0
    h = max(h / correction, 0.0)
    p = float(gammaincc((len(arrays) - 1) / 2.0, h / 2.0))
    return float(h), p


def shared_ranks(values) -> np.ndarray:
    """Ranks of ``values`` ascending, exact ties sharing the averaged rank."""
    return rankdata(np.asarray(values, dtype=float))


@dataclass
class CellStats:
    best: float
    worst: float
    median: float
    mean: float
    std: float
    n_runs: int
    n_failed: int = 0

    @classmethod
    def from_finals(cls, finals, n_failed: int = 0) -> "CellStats":
        a = np.asarray(finals, dtype=float)
        std = float(a.std(ddof=1)) if a.size > 1 else 0.0
        return cls(float(a.min()), float(a.max()), float(np.median(a)),
                   float(a.mean()), std, int(a.size), n_failed)


@dataclass
class StatsTable:
    problems: list
    algorithms: list
    reference: str
    alpha: float
    cells: dict  # (problem, algorithm) -> CellStats
    ranks: dict  # (problem, algorithm) -> float
    marks: dict  # (problem, algorithm) -> str ('.' for the reference itself)


def significance_marks(finals: dict, problems, algorithms, reference: str,
                       alpha: float) -> dict:
    """Pairwise marks vs. the reference per problem.

    '+' means the algorithm's median error beats the reference at the
    given level, '-' means it loses, '.' means no significant difference.
    """
    if reference not in algorithms:
        raise ParameterError(f"reference algorithm {reference!r} not in table")
    marks = {}
    for prob in problems:
        ref_finals = finals[(prob, reference)]
        ref_median = float(np.median(ref_finals))
        for algo in algorithms:
            if algo == reference:
                marks[(prob, algo)] = MARK_NONE
                continue
            sample = finals[(prob, algo)]
            if len(ref_finals) < 2 or len(sample) < 2:
                marks[(prob, algo)] = MARK_NONE
                continue
            _, p = kruskal_wallis([ref_finals, sample])
            if p < alpha:
                med = float(np.median(sample))
                if med < ref_median:
                    marks[(prob, algo)] = MARK_BETTER
                elif med > ref_median:
                    marks[(prob, algo)] = MARK_WORSE
                else:
                    marks[(prob, algo)] = MARK_NONE
            else:
                marks[(prob, algo)] = MARK_NONE
    return marks


def build_stats_table(finals: dict, problems, algorithms, reference: str,
                      alpha: float, failed: dict | None = None) -> StatsTable:
    """Aggregate per-run final errors into the rank-and-marks table."""
    failed = failed or {}
    cells = {}
    ranks = {}
    for prob in problems:
        medians = []
        for algo in algorithms:
            cell_finals = finals[(prob, algo)]
            if not cell_finals:
                raise ParameterError(f"no successful runs for {algo} on {prob}")
            cells[(prob, algo)] = CellStats.from_finals(
                cell_finals, failed.get((prob, algo), 0))
            medians.append(cells[(prob, algo)].median)
        for algo, rank in zip(algorithms, shared_ranks(medians)):
            ranks[(prob, algo)] = float(rank)
    marks = significance_marks(finals, problems, algorithms, reference, alpha)
    return StatsTable(list(problems), list(algorithms), reference, alpha,
                      cells, ranks, marks)
