"""
Tracking convergence through the standardized mean distance
===========================================================

Entities in the synthetic panel lock onto a common cycle in stages, 12
years apart. Non-overlapping 12-year windows show the mean distance
shrinking relative to its spread; an exponential fit gives the time scale.
"""

from macrocluster import datasets
from macrocluster.trendstats import fit_exp_decay, sigma_convergence, trend_series

panel = datasets.panel("convergence")
s = trend_series(panel, 12, step=12, ci_level=0.9, resamples=1000, seed=0)
for label, v, lo, hi in zip(s.labels, s.values, s.ci_lo, s.ci_hi):
    print(f"{label}  {v:6.3f}   90% CI [{lo:.3f}, {hi:.3f}]")

fit = fit_exp_decay(s)
# tau is in windows here; one window is 12 years
print(f"amplitude {fit.amplitude:.2f}, tau {fit.tau:.2f} windows = {12 * fit.tau:.1f} years, r^2 {fit.r_squared:.3f}")

# sigma convergence works on levels, not growth rates
levels = datasets.panel("gdpc-levels")
for year, horizon in ((1971, 10), (1971, 33), (1990, 14)):
    res = sigma_convergence(levels, year, horizon)
    print(f"{year}->{year + horizon}: var ln y {res.var_t:.4f} -> {res.var_tT:.4f}  {res.status}")
