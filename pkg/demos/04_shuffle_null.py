"""
How strong would links be by chance?
====================================

Shuffle the MLP table across windows and across countries, recorrelate,
and compare the extremes and strong-link counts with the real table.
"""

import numpy as np

from macrocluster import datasets
from macrocluster.mamlp import movement_correlations
from macrocluster.robustness import double_shuffle, randomization_summary, shuffle_panel_years
from macrocluster.synthetic import convergent_panel
from macrocluster.trendstats import trend_series, trend_slope

t = datasets.mlp_reference("GDP")
real = movement_correlations(t)
runs = [movement_correlations(double_shuffle(t, seed), skip_degenerate=True) for seed in range(200)]

summary = randomization_summary(real, runs, pos_thr=0.9, neg_thr=-0.8)
print("real: strong links", summary.real_count, "extremes", np.round(summary.real_extremes, 3))
print("shuffled: median links", summary.median_count, "median extremes", np.round(summary.median_extremes, 3))
print(f"runs with no strong link at all: {summary.zero_fraction:.0%}")

# a trend survives only if the years stay in order
panel = convergent_panel(seed=1)
print("slope, years in order:", round(trend_slope(trend_series(panel, 12, 12)), 3))
slopes = [trend_slope(trend_series(shuffle_panel_years(panel, s), 12, 12)) for s in range(100)]
print("slope, years shuffled: 5-95% range", np.round(np.quantile(slopes, [0.05, 0.95]), 3))
