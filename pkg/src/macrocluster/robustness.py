"""Shuffle (permutation) baselines for trends and movement correlations.

All shuffles preserve the multiset of values they permute and draw from
``numpy.random.default_rng(seed)`` (PCG64), so a seed pins the output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError, InsufficientDataError
from .mamlp import MlpTable, movement_correlations, strong_links
from .metrics import STATISTICAL, CorrelationMatrix, distance_matrix
from .panel import GrowthPanel, windows

MODES = ("columns-of-distance-stack", "mlp-columns", "mlp-rows", "mlp-columns-rows")


@dataclass(frozen=True)
class ShuffleReport:
    seed: int
    mode: str
    real_variation: float = math.nan
    shuffled_amplitude: float = math.nan
    ratio: float = math.nan
    c_max: float = math.nan
    c_min: float = math.nan
    strong_link_count: int = -1

    def csv_row(self) -> str:
        def f(v):
            return "" if isinstance(v, float) and math.isnan(v) else f"{v:.6f}"

        count = "" if self.strong_link_count < 0 else str(self.strong_link_count)
        return ",".join(
            [str(self.seed), self.mode, f(self.shuffled_amplitude), f(self.ratio), f(self.c_max), f(self.c_min), count]
        )


SHUFFLE_CSV_HEADER = "seed,mode,amplitude,ratio,c_max,c_min,strong_link_count"


def reports_to_csv(reports: Sequence[ShuffleReport]) -> str:
    return "\n".join([SHUFFLE_CSV_HEADER, *(r.csv_row() for r in reports)]) + "\n"


def distance_stack(panel: GrowthPanel, size: int, step: int = 1, metric=STATISTICAL):
    """Window labels and a windows x pairs array of pair distances."""
    labels, rows = [], []
    for w in windows(panel, size, step):
        labels.append(w.label)
        rows.append(distance_matrix(w, metric).pair_values())
    return labels, np.array(rows)


def standardized_means(stack) -> np.ndarray:
    """mean / sigma of each row of a distance stack."""
    stack = np.asarray(stack, dtype=float)
    return stack.mean(axis=1) / stack.std(axis=1)


def shuffle_distance_stack(stack, seed: int) -> tuple[np.ndarray, ShuffleReport]:
    """Permute every pair slot's values across windows independently.

    Returns the shuffled stack and a report comparing the spread of the
    shuffled standardized-mean series with the real one.
    """
    stack = np.asarray(stack, dtype=float)
    if stack.ndim != 2:
        raise InputError("distance stack must be windows x pairs")
    rng = np.random.default_rng(seed)
    shuffled = rng.permuted(stack, axis=0)
    real = standardized_means(stack)
    fake = standardized_means(shuffled)
    real_var = float(real.max() - real.min())
    amp = float(fake.max() - fake.min())
    ratio = amp / real_var if real_var > 0 else math.nan
    return shuffled, ShuffleReport(seed, MODES[0], real_var, amp, ratio)


def shuffle_mlp_table(t: MlpTable, axis: str, seed) -> MlpTable:
    """Permute MLP distances within each window column or each entity row.

    ``axis="columns"`` mixes entities inside every window; ``axis="rows"``
    mixes windows inside every entity's row. ``seed`` may also be a
    ``numpy.random.Generator``.
    """
    if axis not in ("columns", "rows"):
        raise InputError(f"axis must be 'columns' or 'rows', got {axis!r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    # dhat is entities x windows: a window column is permuted along axis 0
    shuffled = rng.permuted(t.dhat, axis=0 if axis == "columns" else 1)
    return MlpTable(t.entities, t.windows, shuffled)


def double_shuffle(t: MlpTable, seed: int) -> MlpTable:
    """Columns first, then rows, from one stream."""
    rng = np.random.default_rng(seed)
    return shuffle_mlp_table(shuffle_mlp_table(t, "columns", rng), "rows", rng)


def _extremes(c: CorrelationMatrix):
    v = c.pair_values()
    v = v[~np.isnan(v)]
    return (float(v.max()), float(v.min())) if v.size else (math.nan, math.nan)


def mlp_shuffle_report(
    t: MlpTable, mode: str, seed: int, pos_thr: float = 0.9, neg_thr: float = -0.8
) -> tuple[CorrelationMatrix, ShuffleReport]:
    """Shuffle an MLP table, recorrelate, and summarize the extremes."""
    if mode == "mlp-columns":
        shuffled = shuffle_mlp_table(t, "columns", seed)
    elif mode == "mlp-rows":
        shuffled = shuffle_mlp_table(t, "rows", seed)
    elif mode == "mlp-columns-rows":
        shuffled = double_shuffle(t, seed)
    else:
        raise InputError(f"unknown MLP shuffle mode {mode!r}")
    corr = movement_correlations(shuffled, skip_degenerate=True)
    c_max, c_min = _extremes(corr)
    count = len(strong_links(corr, pos_thr, neg_thr))
    return corr, ShuffleReport(seed, mode, c_max=c_max, c_min=c_min, strong_link_count=count)


@dataclass(frozen=True)
class RandomizationSummary:
    real_count: int
    real_extremes: tuple[float, float]
    run_counts: tuple[int, ...]
    run_extremes: np.ndarray  # runs x (c_max, c_min)

    @property
    def zero_fraction(self) -> float:
        return float(np.mean(np.array(self.run_counts) == 0))

    @property
    def median_count(self) -> float:
        return float(np.median(self.run_counts))

    @property
    def median_extremes(self) -> tuple[float, float]:
        med = np.nanmedian(self.run_extremes, axis=0)
        return float(med[0]), float(med[1])


def randomization_summary(
    real: CorrelationMatrix,
    shuffled_runs: Sequence[CorrelationMatrix],
    pos_thr: float = 0.9,
    neg_thr: float = -0.8,
) -> RandomizationSummary:
    """Strong-link counts and correlation extremes, real vs shuffled runs."""
    if not shuffled_runs:
        raise InsufficientDataError("randomization summary needs at least one shuffled run")
    counts = tuple(len(strong_links(c, pos_thr, neg_thr)) for c in shuffled_runs)
    return RandomizationSummary(
        len(strong_links(real, pos_thr, neg_thr)),
        _extremes(real),
        counts,
        np.array([_extremes(c) for c in shuffled_runs]),
    )


def shuffle_panel_years(panel: GrowthPanel, seed: int) -> GrowthPanel:
    """Permute whole year columns, keeping each year's cross-section intact."""
    if panel.truncated:
        raise InputError("year shuffling needs a panel without truncated entities")
    rng = np.random.default_rng(seed)
    cols = rng.permutation(len(panel.years))
    return GrowthPanel(panel.entities, panel.years, panel.values[:, cols], panel.indicator, panel.converted)
