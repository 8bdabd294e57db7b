"""Seeded synthetic panels with planted structure.

Used for committed fixtures and for property tests where the true answer is
known by construction. All generators take a seed and draw from
``numpy.random.default_rng`` (PCG64).
"""

from __future__ import annotations

import numpy as np

from .errors import InputError
from .panel import GrowthPanel

EU15 = ("AT", "BE", "DE", "DK", "ES", "FI", "FR", "UK", "GR", "IE", "IT", "LU", "NL", "PT", "SE")

# mean and scale of annual growth in the synthetic panels
_BASE_RATE = 0.025
_SPREAD = 0.015


def convergent_panel(
    seed,
    n_entities: int = 15,
    window: int = 12,
    n_windows: int = 6,
    first: int = 3,
    per_window: int = 2,
    ramp: int = 2,
    weight: float = 0.995,
    start_year: int = 1950,
) -> GrowthPanel:
    """Growth panel whose entities lock onto a common cycle one group at a time.

    Entity i follows ``w_i(t) f_t + sqrt(1 - w_i(t)^2) e_it`` with a shared
    factor ``f`` and idiosyncratic noise ``e``. In random order, ``first``
    entities are synchronized from the start and ``per_window`` more join at
    each later window boundary; ``w`` ramps from 0 to ``weight`` over
    ``ramp`` years before the boundary. With non-overlapping windows
    (``step = window``) the standardized mean distance falls window by window.
    """
    if not 0 < weight < 1:
        raise InputError("weight must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    n_years = window * n_windows
    t = np.arange(n_years)
    f = rng.standard_normal(n_years)
    e = rng.standard_normal((n_entities, n_years))
    onset = np.full(n_entities, np.inf)
    for rank, i in enumerate(rng.permutation(n_entities)):
        k = 0 if rank < first else (rank - first) // per_window + 1
        if k < n_windows:
            onset[i] = k * window - ramp
    w = np.clip((t[None, :] - onset[:, None]) / ramp, 0.0, 1.0) * weight
    x = w * f + np.sqrt(1.0 - w**2) * e
    codes = [f"E{i:02d}" for i in range(n_entities)]
    return GrowthPanel(codes, range(start_year, start_year + n_years), _BASE_RATE + _SPREAD * x, "SYN")


def decay_series(tau: float, n: int, amplitude: float = 3.0, noise: float = 0.0, seed=None) -> np.ndarray:
    """``amplitude * exp(-x / tau)`` at x = 1..n with multiplicative Gaussian noise."""
    x = np.arange(1, n + 1, dtype=float)
    y = amplitude * np.exp(-x / tau)
    if noise:
        y = y * (1.0 + noise * np.random.default_rng(seed).standard_normal(n))
    return y


def clustered_panel(
    seed,
    start_year: int,
    end_year: int,
    indicator: str = "GDP",
    groups=(("FR", "SE", "DE"), ("BE", "UK", "IE", "DK", "PT")),
    contrarian: str | None = "GR",
    loading: float = 0.8,
    truncate: dict[str, int] | None = None,
) -> GrowthPanel:
    """EU-15-like growth panel with co-moving groups and one contrarian entity.

    Members of a group share a group factor with the given ``loading``; the
    contrarian loads negatively on the first group's factor. ``truncate``
    maps entity codes to their last year of data.
    """
    rng = np.random.default_rng(seed)
    n_years = end_year - start_year + 1
    common = rng.standard_normal(n_years)
    factors = rng.standard_normal((len(groups), n_years))
    x = np.empty((len(EU15), n_years))
    for i, code in enumerate(EU15):
        noise = rng.standard_normal(n_years)
        g = next((k for k, grp in enumerate(groups) if code in grp), None)
        if g is not None:
            signal = factors[g]
        elif code == contrarian:
            signal = -factors[0]
        else:
            signal = common
        x[i] = loading * signal + np.sqrt(1.0 - loading**2) * noise
    values = _BASE_RATE + _SPREAD * x
    for code, last in (truncate or {}).items():
        values[EU15.index(code), last - start_year + 1:] = np.nan
    return GrowthPanel(EU15, range(start_year, end_year + 1), values, indicator)


def levels_panel(seed, start_year: int, end_year: int, contraction: float = 0.5, indicator: str = "GDPC") -> GrowthPanel:
    """Log-normal income levels whose cross-entity log variance shrinks.

    The log-level spread at ``end_year`` is ``contraction`` times the spread
    at ``start_year`` (up to noise), so the panel is sigma-converging for
    ``contraction < 1``. Returned unconverted.
    """
    rng = np.random.default_rng(seed)
    n_years = end_year - start_year + 1
    offsets = rng.normal(0.0, 0.4, len(EU15))
    shrink = np.linspace(1.0, contraction, n_years)
    trend = np.log(10000.0) + 0.02 * np.arange(n_years)
    noise = np.cumsum(rng.normal(0.0, 0.01, (len(EU15), n_years)), axis=1)
    logs = trend + offsets[:, None] * shrink + noise
    return GrowthPanel(EU15, range(start_year, end_year + 1), np.exp(logs), indicator, converted=False)
