"""Convergence diagnostics over rolling windows.

The central quantity is the standardized mean distance (mean / sigma of the
pair-distance multiset) tracked window by window.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError, InputError, InsufficientDataError
from .metrics import STATISTICAL, DistanceMatrix, MatrixMoments, distance_matrix, matrix_moments
from .panel import GrowthPanel, windows

BOOTSTRAP_RETRIES = 10


@dataclass(frozen=True, eq=False)
class TrendSeries:
    """Standardized mean distance per window, optionally with bootstrap CIs."""

    labels: tuple[str, ...]
    values: np.ndarray
    ci_lo: np.ndarray | None = None
    ci_hi: np.ndarray | None = None
    level: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if len(self.labels) != self.values.size:
            raise InputError("labels and values differ in length")

    def __len__(self):
        return self.values.size

    def to_csv(self, decimals: int = 6) -> str:
        lines = ["window_label,value,ci_lo,ci_hi"]
        for k, label in enumerate(self.labels):
            lo = "" if self.ci_lo is None else f"{self.ci_lo[k]:.{decimals}f}"
            hi = "" if self.ci_hi is None else f"{self.ci_hi[k]:.{decimals}f}"
            lines.append(f"{label},{self.values[k]:.{decimals}f},{lo},{hi}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ExpFit:
    """``value = amplitude * exp(-x / tau)`` with x the 1-based point number.

    A non-negative log-slope gives ``tau = inf`` and ``decaying = False``.
    """

    amplitude: float
    tau: float
    r_squared: float
    slope: float
    points_used: int
    decaying: bool = True

    def to_json(self, step: int = 1) -> str:
        finite = math.isfinite(self.tau)
        doc = {
            "amplitude": self.amplitude,
            "tau_windows": self.tau if finite else None,
            "tau_years": self.tau * step if finite else None,
            "r_squared": self.r_squared,
            "points_used": self.points_used,
            "decaying": self.decaying,
        }
        return json.dumps(doc, indent=2) + "\n"


def _window_matrices(panel, size, step, metric):
    if not panel.converted:
        raise InputError("panel holds raw levels; convert to growth rates first")
    wins = windows(panel, size, step)
    if len(wins) < 2:
        raise InsufficientDataError(f"need at least 2 windows, got {len(wins)}")
    return [(w.label, distance_matrix(w, metric)) for w in wins]


def _checked_moments(label, m):
    mom = matrix_moments(m)
    if mom.sigma == 0:
        raise DegenerateDataError(f"window {label}: all pair distances equal (sigma = 0)")
    return mom


def moments_series(panel: GrowthPanel, size: int, step: int = 1, metric=STATISTICAL) -> list[tuple[str, MatrixMoments]]:
    """Mean, sigma, variance, skewness and kurtosis of the distances per window."""
    return [(label, _checked_moments(label, m)) for label, m in _window_matrices(panel, size, step, metric)]


def trend_series(
    panel: GrowthPanel,
    size: int,
    step: int = 1,
    metric=STATISTICAL,
    ci_level: float | None = None,
    resamples: int = 1000,
    seed: int = 0,
) -> TrendSeries:
    """Standardized mean distance for each rolling window.

    With ``ci_level`` set, every point also gets a percentile bootstrap
    interval; window ``k`` draws from the stream ``(seed, k)``.
    """
    mats = _window_matrices(panel, size, step, metric)
    labels, values, lo, hi = [], [], [], []
    for k, (label, m) in enumerate(mats):
        values.append(_checked_moments(label, m).standardized_mean)
        labels.append(label)
        if ci_level is not None:
            a, b = bootstrap_ci(m.pair_values(), ci_level, resamples, seed=[seed, k])
            lo.append(a)
            hi.append(b)
    if ci_level is None:
        return TrendSeries(labels, values)
    return TrendSeries(labels, values, np.array(lo), np.array(hi), ci_level)


def moving_average(s: TrendSeries, k: int) -> TrendSeries:
    """Trailing k-point mean; each output point is labelled by its last window."""
    if k < 1:
        raise InputError("moving-average span must be >= 1")
    if k > len(s):
        raise InsufficientDataError(f"span {k} exceeds series length {len(s)}")
    kernel = np.ones(k) / k
    vals = np.convolve(s.values, kernel, mode="valid")
    return TrendSeries(s.labels[k - 1:], vals)


def fit_exp_decay(s) -> ExpFit:
    """Log-linear least-squares fit of an exponential decay.

    ``s`` is a :class:`TrendSeries` or a plain sequence. ``r_squared`` is the
    squared correlation between fitted and observed values on the original
    (not log) scale.
    """
    y = np.asarray(s.values if isinstance(s, TrendSeries) else s, dtype=float)
    if y.size < 3:
        raise InsufficientDataError(f"exponential fit needs >= 3 points, got {y.size}")
    if np.any(y <= 0):
        raise InputError("exponential fit needs strictly positive values")
    x = np.arange(1, y.size + 1, dtype=float)
    slope, intercept = np.polyfit(x, np.log(y), 1)
    if np.ptp(y) == 0:
        slope, intercept = 0.0, math.log(y[0])  # polyfit leaves rounding residue
    amplitude = math.exp(intercept)
    fitted = amplitude * np.exp(slope * x)
    if np.ptp(fitted) == 0 or np.ptp(y) == 0:
        r2 = 0.0
    else:
        r2 = float(np.corrcoef(fitted, y)[0, 1] ** 2)
    if slope >= 0:
        return ExpFit(amplitude, math.inf, r2, float(slope), y.size, decaying=False)
    return ExpFit(amplitude, -1.0 / slope, r2, float(slope), y.size)


def _standardized_mean(v):
    sd = v.std()
    return None if sd <= 1e-14 * max(1.0, abs(v.mean())) else v.mean() / sd


def bootstrap_ci(values, level: float = 0.9, resamples: int = 1000, seed=0) -> tuple[float, float]:
    """Percentile bootstrap interval of mean/sigma of a distance multiset.

    Resample ``i`` uses its own child stream of ``SeedSequence(seed)``, so
    results do not depend on evaluation order. A resample with zero spread
    is redrawn from the same stream up to 10 times.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size < 3:
        raise InsufficientDataError("bootstrap needs at least 3 values")
    if not 0 < level < 1:
        raise InputError("confidence level must lie in (0, 1)")
    if resamples < 100:
        raise InputError("use at least 100 bootstrap resamples")
    stats = np.empty(resamples)
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(resamples)):
        rng = np.random.default_rng(child)
        for _ in range(BOOTSTRAP_RETRIES + 1):
            stat = _standardized_mean(v[rng.integers(0, v.size, v.size)])
            if stat is not None:
                break
        else:
            raise DegenerateDataError(
                f"bootstrap resample {i} had zero spread after {BOOTSTRAP_RETRIES} redraws"
            )
        stats[i] = stat
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(stats, [alpha, 1.0 - alpha])
    return float(lo), float(hi)


def bootstrap_entities_ci(m: DistanceMatrix, level: float = 0.9, resamples: int = 1000, seed=0) -> tuple[float, float]:
    """Like :func:`bootstrap_ci` but resampling entities instead of pairs.

    Pairs of a resampled entity with its own copy are dropped.
    """
    if m.n < 3:
        raise InsufficientDataError("entity bootstrap needs at least 3 entities")
    if not 0 < level < 1:
        raise InputError("confidence level must lie in (0, 1)")
    if resamples < 100:
        raise InputError("use at least 100 bootstrap resamples")
    stats = np.empty(resamples)
    iu = np.triu_indices(m.n, k=1)
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(resamples)):
        rng = np.random.default_rng(child)
        for _ in range(BOOTSTRAP_RETRIES + 1):
            idx = rng.integers(0, m.n, m.n)
            a, b = idx[iu[0]], idx[iu[1]]
            keep = a != b
            stat = _standardized_mean(m.d[a[keep], b[keep]]) if keep.sum() >= 2 else None
            if stat is not None:
                break
        else:
            raise DegenerateDataError(
                f"bootstrap resample {i} had zero spread after {BOOTSTRAP_RETRIES} redraws"
            )
        stats[i] = stat
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(stats, [alpha, 1.0 - alpha])
    return float(lo), float(hi)


def trend_slope(s) -> float:
    """OLS slope of the series against its point index."""
    y = np.asarray(s.values if isinstance(s, TrendSeries) else s, dtype=float)
    if y.size < 2:
        raise InsufficientDataError("slope needs at least 2 points")
    return float(np.polyfit(np.arange(y.size, dtype=float), y, 1)[0])


@dataclass(frozen=True)
class SigmaConvergence:
    status: str  # "converging", "diverging" or "neither"
    var_t: float
    var_tT: float

    @property
    def converging(self) -> bool:
        return self.status == "converging"

    @property
    def diverging(self) -> bool:
        return self.status == "diverging"


def sigma_convergence(panel: GrowthPanel, year: int, horizon: int) -> SigmaConvergence:
    """Compare the cross-entity variance of ``ln(value)`` at two dates.

    Converging when the variance at ``year`` exceeds the variance at
    ``year + horizon``. Intended for level data (e.g. GDP per capita).
    """
    if horizon <= 0:
        raise InputError("horizon must be positive")
    later = year + horizon
    for y in (year, later):
        if y not in panel.years:
            raise InputError(f"year {y} outside panel range {panel.years[0]}-{panel.years[-1]}")
    a = panel.values[:, panel.years.index(year)]
    b = panel.values[:, panel.years.index(later)]
    if np.isnan(a).any() or np.isnan(b).any():
        raise InputError("missing values at the compared years")
    if np.any(a <= 0) or np.any(b <= 0):
        raise InputError("log variance needs strictly positive values")
    var_t = float(np.var(np.log(a)))
    var_tT = float(np.var(np.log(b)))
    if math.isclose(var_t, var_tT, rel_tol=1e-12, abs_tol=1e-15):
        status = "neither"
    elif var_t > var_tT:
        status = "converging"
    else:
        status = "diverging"
    return SigmaConvergence(status, var_t, var_tT)
