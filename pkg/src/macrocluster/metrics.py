"""Pairwise correlations, distances and distance-distribution moments."""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass

import numpy as np

from ._util import is_flat, read_text
from .errors import DegenerateDataError, InputError, InsufficientDataError, ParseError
from .panel import PanelWindow

CLAMP_TOL = 1e-12

STATISTICAL = "statistical"
EUCLIDEAN = "euclidean"
MANHATTAN = "manhattan"

_POWER_RE = re.compile(r"^power[:(]\s*([^,:)]+)\s*[,:]\s*([^,:)]+)\s*\)?$")


def parse_metric(metric) -> tuple[str, float, float]:
    """Normalize a metric tag to ``(name, p, r)``.

    Accepts ``"statistical"``, ``"euclidean"``, ``"manhattan"``,
    ``"power:p:r"``, ``"power(p,r)"`` or a ``("power", p, r)`` tuple.
    """
    if isinstance(metric, tuple):
        name, *params = metric
        if name == "power" and len(params) == 2:
            p, r = map(float, params)
            if p <= 0 or r <= 0:
                raise InputError("power distance needs p > 0 and r > 0")
            return ("power", p, r)
        metric = name
    metric = str(metric).strip().lower()
    if metric == STATISTICAL:
        return (STATISTICAL, 0.0, 0.0)
    if metric == EUCLIDEAN:
        return (EUCLIDEAN, 2.0, 2.0)
    if metric == MANHATTAN:
        return (MANHATTAN, 1.0, 1.0)
    match = _POWER_RE.match(metric)
    if match:
        try:
            return parse_metric(("power", float(match.group(1)), float(match.group(2))))
        except ValueError:
            pass
    raise InputError(f"unknown metric {metric!r}")


def metric_label(metric) -> str:
    name, p, r = parse_metric(metric)
    if name == "power":
        return f"power({p:g},{r:g})"
    return name


def pearson(x, y) -> float:
    """Correlation coefficient with plain (population) window averages.

    Raises
    ------
    DegenerateDataError
        If either series is constant.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InputError("pearson needs two 1-d series of equal length")
    if x.size < 2:
        raise InsufficientDataError("pearson needs at least 2 points")
    xc = x - x.mean()
    yc = y - y.mean()
    vx = np.mean(xc * xc)
    vy = np.mean(yc * yc)
    if is_flat(vx, x) or is_flat(vy, y):
        raise DegenerateDataError("constant series: correlation undefined")
    c = float(np.mean(xc * yc) / math.sqrt(vx * vy))
    return _clamp(c)


def _clamp(c):
    c = np.asarray(c, dtype=float)
    if np.any(np.abs(c) > 1 + CLAMP_TOL):
        raise InputError(f"correlation outside [-1, 1]: {c[np.abs(c) > 1 + CLAMP_TOL].ravel()[0]!r}")
    out = np.clip(c, -1.0, 1.0)
    return float(out) if out.ndim == 0 else out


def statistical_distance(c):
    """``sqrt(2 (1 - c))``; works elementwise on arrays."""
    c = _clamp(c)
    return np.sqrt(2.0 * (1.0 - np.asarray(c))) if np.ndim(c) else math.sqrt(2.0 * (1.0 - c))


def minkowski_distance(x, y, p: float = 2.0, r: float = 2.0) -> float:
    """``(sum |x_i - y_i|^p)^(1/r)``.

    p = r = 2 is Euclidean, p = r = 1 Manhattan.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise InputError(f"length mismatch: {x.shape} vs {y.shape}")
    if p <= 0 or r <= 0:
        raise InputError("power distance needs p > 0 and r > 0")
    return float(np.sum(np.abs(x - y) ** p) ** (1.0 / r))


def _matrix_to_csv(entities, values, decimals=6) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["entity", *entities])
    for code, row in zip(entities, values):
        w.writerow([code, *(_fmt(v, decimals) for v in row)])
    return buf.getvalue()


def _fmt(v, decimals):
    if np.isnan(v):
        return "NA"
    s = f"{v:.{decimals}f}"
    return s[1:] if s.startswith("-") and float(s) == 0 else s


def read_matrix_csv(source) -> tuple[tuple[str, ...], np.ndarray]:
    """Read a square labelled matrix CSV (header ``entity,A,B,...``)."""
    rows = [r for r in csv.reader(io.StringIO(read_text(source))) if any(c.strip() for c in r)]
    if not rows:
        raise ParseError("empty matrix file", line=1)
    header = [c.strip() for c in rows[0]]
    entities = tuple(header[1:])
    if len(rows) - 1 != len(entities):
        raise ParseError(f"expected {len(entities)} matrix rows, found {len(rows) - 1}")
    if len(set(entities)) != len(entities):
        raise ParseError("duplicate entity in matrix header", line=1)
    values = np.empty((len(entities), len(entities)))
    for i, row in enumerate(rows[1:]):
        line = i + 2
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} cells, found {len(row)}", line=line)
        if row[0].strip() != entities[i]:
            raise ParseError(f"row label {row[0]!r} does not match column {entities[i]!r}", line=line)
        for j, cell in enumerate(row[1:]):
            cell = cell.strip()
            try:
                values[i, j] = np.nan if cell == "NA" else float(cell)
            except ValueError:
                raise ParseError(f"non-numeric cell {cell!r}", line=line) from None
    if not np.allclose(values, values.T, equal_nan=True):
        raise ParseError("matrix is not symmetric")
    return entities, values


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Symmetric matrix with unit diagonal.

    ``source`` is ``"raw-growth"`` for correlations between growth series and
    ``"hierarchy-movement"`` for correlations between MLP-distance rows.
    Pairs that could not be computed are NaN and their entities listed in
    ``excluded``.
    """

    entities: tuple[str, ...]
    c: np.ndarray
    source: str = "raw-growth"
    excluded: tuple[str, ...] = ()

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        object.__setattr__(self, "entities", tuple(self.entities))
        if c.shape != (len(self.entities), len(self.entities)):
            raise InputError("correlation matrix shape does not match entities")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    def index(self, entity: str) -> int:
        return self.entities.index(entity)

    def __getitem__(self, pair) -> float:
        a, b = pair
        return float(self.c[self.index(a), self.index(b)])

    def pair_values(self) -> np.ndarray:
        iu = np.triu_indices(len(self.entities), k=1)
        return self.c[iu]

    def to_csv(self, decimals: int = 6) -> str:
        return _matrix_to_csv(self.entities, self.c, decimals)

    @classmethod
    def from_csv(cls, source, source_tag: str = "hierarchy-movement") -> "CorrelationMatrix":
        entities, c = read_matrix_csv(source)
        if np.nanmax(np.abs(c)) > 1 + CLAMP_TOL:
            raise ParseError("correlation entries must lie in [-1, 1]")
        if not np.allclose(np.diag(c), 1.0):
            raise ParseError("correlation matrix diagonal must be 1")
        return cls(entities, c, source_tag)


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric nonnegative distance matrix for one window.

    ``window`` is ``(start_year, size)`` or None for matrices read from file.
    For the statistical metric the underlying correlations ride along in
    ``correlation``.
    """

    entities: tuple[str, ...]
    d: np.ndarray
    metric: str = STATISTICAL
    window: tuple[int, int] | None = None
    correlation: CorrelationMatrix | None = None

    def __post_init__(self):
        d = np.array(self.d, dtype=float)
        object.__setattr__(self, "entities", tuple(self.entities))
        n = len(self.entities)
        if d.shape != (n, n):
            raise InputError("distance matrix shape does not match entities")
        if not np.all(np.isfinite(d)):
            raise InputError("distance matrix has non-finite entries")
        if np.any(d < 0):
            raise InputError("distances must be nonnegative")
        if not np.allclose(d, d.T, rtol=0, atol=1e-12):
            raise InputError("distance matrix is not symmetric")
        d = (d + d.T) / 2.0
        np.fill_diagonal(d, 0.0)
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return len(self.entities)

    def index(self, entity: str) -> int:
        return self.entities.index(entity)

    def __getitem__(self, pair) -> float:
        a, b = pair
        return float(self.d[self.index(a), self.index(b)])

    def pair_values(self) -> np.ndarray:
        """The N(N-1)/2 distinct pair distances (upper triangle, row order)."""
        iu = np.triu_indices(self.n, k=1)
        return self.d[iu]

    def sorted_pairs(self) -> list[tuple[float, str, str]]:
        """Pairs in increasing distance; equal distances ordered by code pair."""
        out = []
        for i in range(self.n):
            for j in range(i + 1, self.n):
                a, b = sorted((self.entities[i], self.entities[j]))
                out.append((float(self.d[i, j]), a, b))
        out.sort()
        return out

    def to_csv(self, decimals: int = 6) -> str:
        return _matrix_to_csv(self.entities, self.d, decimals)

    @classmethod
    def from_csv(cls, source, metric: str = STATISTICAL) -> "DistanceMatrix":
        entities, d = read_matrix_csv(source)
        return cls(entities, d, metric)

    @classmethod
    def from_correlation(cls, corr: CorrelationMatrix, window=None) -> "DistanceMatrix":
        return cls(corr.entities, statistical_distance(corr.c), STATISTICAL, window, corr)


def correlation_matrix(window: PanelWindow) -> CorrelationMatrix:
    """Pearson correlations between all entity series of a window."""
    x = window.values
    xc = x - x.mean(axis=1, keepdims=True)
    sd = np.sqrt(np.mean(xc * xc, axis=1))
    flat = np.flatnonzero([is_flat(s * s, row) for s, row in zip(sd, x)])
    if flat.size:
        names = ", ".join(window.entities[i] for i in flat)
        raise DegenerateDataError(f"constant series in window {window.label}: {names}")
    z = xc / sd[:, None]
    c = _clamp(z @ z.T / x.shape[1])
    np.fill_diagonal(c, 1.0)
    return CorrelationMatrix(window.entities, c, "raw-growth")


def distance_matrix(window: PanelWindow, metric=STATISTICAL) -> DistanceMatrix:
    """All pairwise distances between the entity series of ``window``."""
    name, p, r = parse_metric(metric)
    key = (window.start_year, window.size)
    if name == STATISTICAL:
        corr = correlation_matrix(window)
        return DistanceMatrix(window.entities, statistical_distance(corr.c), STATISTICAL, key, corr)
    x = window.values
    diff = np.abs(x[:, None, :] - x[None, :, :])
    d = np.sum(diff ** p, axis=2) ** (1.0 / r)
    return DistanceMatrix(window.entities, d, metric_label((name, p, r)), key)


@dataclass(frozen=True)
class MatrixMoments:
    """Moments of a pair-distance multiset.

    ``kurtosis`` is the raw standardized fourth moment; the excess version is
    available as :attr:`excess_kurtosis`. Skewness and kurtosis are NaN when
    ``sigma`` is zero.
    """

    mean: float
    sigma: float
    variance: float
    skewness: float
    kurtosis: float
    n_pairs: int

    @property
    def excess_kurtosis(self) -> float:
        return self.kurtosis - 3.0

    @property
    def standardized_mean(self) -> float:
        """mean / sigma."""
        if self.sigma == 0:
            raise DegenerateDataError("all pair distances equal: standardized mean undefined")
        return self.mean / self.sigma


def moments_of(values) -> MatrixMoments:
    """Population moments of a 1-d multiset of distances."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size < 2:
        raise InsufficientDataError("moments need at least 2 values")
    mean = float(v.mean())
    dev = v - mean
    variance = float(np.mean(dev * dev))
    # exact zero is unreachable through rounding for equal inputs; guard anyway
    if variance <= (1e-14 * max(1.0, abs(mean))) ** 2:
        return MatrixMoments(mean, 0.0, 0.0, math.nan, math.nan, v.size)
    sigma = math.sqrt(variance)
    skew = float(np.mean(dev ** 3)) / sigma ** 3
    kurt = float(np.mean(dev ** 4)) / variance ** 2
    return MatrixMoments(mean, sigma, variance, skew, kurt, v.size)


def matrix_moments(m: DistanceMatrix) -> MatrixMoments:
    """Moments over the N(N-1)/2 distinct pair distances of ``m``."""
    if m.n < 3:
        raise InsufficientDataError(f"moments need N >= 3 entities, got {m.n}")
    return moments_of(m.pair_values())
