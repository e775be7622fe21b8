"""Greedy forward selection of query subsets, plus the top-N prefix sweep.

Selection starts from the query with the highest individual correlation
and keeps adding the candidate that most improves the model objective,
per candidate shift; the shift with the best final objective wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import stats
from .errors import NoUsableQuery
from .regress import QueryPanel, in_sample_objective
from .stats import SignificanceConfig
from .timeseries import ShiftSpec, WeeklySeries

IMPROVEMENT_EPS = 1e-6


@dataclass(frozen=True)
class SelectionResult:
    chosen_labels: tuple[str, ...]
    best_shift: ShiftSpec
    objective: float
    trace: tuple[tuple[int, str, float], ...]  # (step, label added, objective after)


def _candidate_pool(panel, y, s, cfg) -> list[str]:
    """Queries with a positive, non-NA individual correlation, best first."""
    ranked = stats.rank_queries(panel, y, s, cfg)
    return [label for label, res in ranked if not res.na and res.r > 0.0]


def _greedy_one_shift(
    panel: QueryPanel,
    y: WeeklySeries,
    s: ShiftSpec,
    cfg: SignificanceConfig,
) -> tuple[tuple[str, ...], float, tuple[tuple[int, str, float], ...]] | None:
    pool = _candidate_pool(panel, y, s, cfg)
    if not pool:
        return None
    chosen = [pool[0]]
    objective = in_sample_objective(panel.subset(chosen), y, s)
    if objective is None:
        return None
    trace = [(1, pool[0], objective)]
    remaining = pool[1:]
    while remaining:
        best_label, best_obj = None, objective
        # pool order encodes individual rank, which is the tie-break
        for label in remaining:
            obj = in_sample_objective(panel.subset(chosen + [label]), y, s)
            if obj is not None and obj > best_obj + IMPROVEMENT_EPS:
                best_label, best_obj = label, obj
        if best_label is None:
            break
        chosen.append(best_label)
        remaining.remove(best_label)
        objective = best_obj
        trace.append((len(chosen), best_label, objective))
    return tuple(chosen), objective, tuple(trace)


def greedy_select(
    panel: QueryPanel,
    y: WeeklySeries,
    shifts: list[ShiftSpec],
    cfg: SignificanceConfig = SignificanceConfig(),
) -> SelectionResult:
    """Run greedy selection at every shift and keep the best outcome.

    Ties between shifts keep the earlier entry of `shifts`.
    """
    best = None
    for s in shifts:
        outcome = _greedy_one_shift(panel, y, s, cfg)
        if outcome is None:
            continue
        chosen, objective, trace = outcome
        if best is None or objective > best.objective:
            best = SelectionResult(chosen, s, objective, trace)
    if best is None:
        raise NoUsableQuery("no query has a usable correlation at any shift")
    return best


def prefix_sweep(
    panel: QueryPanel,
    y: WeeklySeries,
    s: ShiftSpec,
    cfg: SignificanceConfig = SignificanceConfig(),
) -> list[tuple[int, float]]:
    """Model objective for the top-N ranked queries, N = 1..panel size.

    Entries where the fit is underdetermined or collinear are NaN; once
    a prefix fails, every longer prefix fails too.
    """
    order = [label for label, _ in stats.rank_queries(panel, y, s, cfg)]
    out = []
    for n in range(1, len(order) + 1):
        obj = in_sample_objective(panel.subset(order[:n]), y, s)
        out.append((n, math.nan if obj is None else obj))
    return out
