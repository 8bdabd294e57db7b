"""Multi-entity annual panels: CSV ingestion, growth-rate conversion, windows.

Panel CSV layout::

    entity,1994,1995,1996
    AT,0.021,0.019,NA
    BE,0.034,0.011,0.027

Trailing ``NA`` cells mark an entity whose series stops early. Interior gaps
are rejected.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._util import read_text
from .errors import InputError, InsufficientDataError, ParseError

GROWTH = "growth-rates"
LEVELS = "levels"
GROWTH_METHODS = ("pct-change", "log-diff")

_MISSING = "NA"


@dataclass(frozen=True, eq=False)
class GrowthPanel:
    """Entities x years matrix of one indicator.

    ``values`` holds NaN after an entity's truncation year. ``converted`` is
    False for a panel of raw levels that still needs :func:`to_growth_rates`.
    """

    entities: tuple[str, ...]
    years: tuple[int, ...]
    values: np.ndarray
    indicator: str = ""
    converted: bool = True

    def __post_init__(self):
        entities = tuple(str(e) for e in self.entities)
        years = tuple(int(y) for y in self.years)
        values = np.array(self.values, dtype=float)
        if values.shape != (len(entities), len(years)):
            raise InputError(
                f"values shape {values.shape} does not match "
                f"{len(entities)} entities x {len(years)} years"
            )
        if len(set(entities)) != len(entities):
            dup = sorted({e for e in entities if entities.count(e) > 1})
            raise InputError(f"duplicate entity code(s): {', '.join(dup)}")
        if any(b - a != 1 for a, b in zip(years, years[1:])):
            raise InputError("years must be contiguous and strictly increasing")
        for i, code in enumerate(entities):
            _check_trailing_gaps(values[i], code, years)
        values.setflags(write=False)
        object.__setattr__(self, "entities", entities)
        object.__setattr__(self, "years", years)
        object.__setattr__(self, "values", values)

    @property
    def n_entities(self) -> int:
        return len(self.entities)

    @property
    def last_years(self) -> dict[str, int]:
        """Last year with data, per entity."""
        out = {}
        for code, row in zip(self.entities, self.values):
            n_valid = int(np.count_nonzero(~np.isnan(row)))
            out[code] = self.years[n_valid - 1] if n_valid else self.years[0] - 1
        return out

    @property
    def last_common_year(self) -> int:
        return min(self.last_years.values())

    @property
    def truncated(self) -> dict[str, int]:
        """Entities that stop before the final year, with their last year."""
        last = self.years[-1]
        return {e: y for e, y in self.last_years.items() if y < last}

    def series(self, entity: str) -> np.ndarray:
        try:
            return self.values[self.entities.index(entity)]
        except ValueError:
            raise KeyError(entity) from None

    def select(self, entities: Iterable[str]) -> "GrowthPanel":
        """Sub-panel restricted to ``entities`` (in the given order)."""
        entities = list(entities)
        rows = [self.entities.index(e) for e in entities]
        return GrowthPanel(entities, self.years, self.values[rows],
                           self.indicator, self.converted)

    def to_csv(self) -> str:
        """Serialize to panel-CSV text (``repr`` floats, so reload is exact)."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["entity", *self.years])
        for code, row in zip(self.entities, self.values):
            writer.writerow([code, *(_MISSING if np.isnan(v) else repr(float(v)) for v in row)])
        return buf.getvalue()

    def equals(self, other: "GrowthPanel") -> bool:
        return (
            self.entities == other.entities
            and self.years == other.years
            and self.indicator == other.indicator
            and self.converted == other.converted
            and np.array_equal(self.values, other.values, equal_nan=True)
        )


@dataclass(frozen=True, eq=False)
class PanelWindow:
    """Slice of a panel over ``[start_year, end_year]``.

    ``size`` is the nominal window length T; ``end_year`` may fall short of
    ``start_year + size - 1`` when some entity's series stops early.
    """

    entities: tuple[str, ...]
    start_year: int
    size: int
    end_year: int
    values: np.ndarray
    indicator: str = ""

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        object.__setattr__(self, "entities", tuple(self.entities))
        if values.ndim != 2 or values.shape[0] != len(self.entities):
            raise InputError("window values must be entities x years")
        if values.shape[1] < 2:
            raise InsufficientDataError(
                f"window {self.start_year}-{self.end_year} has fewer than 2 years"
            )
        if values.shape[1] != self.end_year - self.start_year + 1:
            raise InputError("window length does not match its year span")
        if np.isnan(values).any():
            raise InputError(f"window {self.label} contains missing values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def label(self) -> str:
        return f"{self.start_year}-{self.end_year}"

    @property
    def length(self) -> int:
        return self.values.shape[1]

    @property
    def shortened(self) -> bool:
        return self.length < self.size


def _check_trailing_gaps(row, code, years):
    missing = np.isnan(row)
    if not missing.any():
        return
    first_gap = int(np.argmax(missing))
    if not missing[first_gap:].all():
        raise InputError(
            f"entity {code}: missing value in {years[first_gap]} followed by data; "
            "only trailing truncation is allowed"
        )


def load_panel(source, kind: str = GROWTH, indicator: str = "") -> GrowthPanel:
    """Read a panel CSV.

    Parameters
    ----------
    source : path, bytes, or file-like (binary or text)
    kind : {"growth-rates", "levels"}
        With ``"levels"`` the result is flagged unconverted and must go
        through :func:`to_growth_rates` before any distance computation.
    indicator : str
        Label stored on the panel (e.g. ``"GDP"``).

    Raises
    ------
    ParseError
        Ragged rows, bad header, non-numeric cells, duplicate entities or
        interior ``NA`` cells (line numbers are 1-based).
    """
    if kind not in (GROWTH, LEVELS):
        raise InputError(f"unknown panel kind {kind!r}")
    rows = list(csv.reader(io.StringIO(read_text(source))))
    numbered = [(n, r) for n, r in enumerate(rows, start=1) if any(c.strip() for c in r)]
    if not numbered:
        raise ParseError("empty panel file", line=1)

    header_line, header = numbered[0]
    header = [c.strip() for c in header]
    if header[0].lower() != "entity":
        raise ParseError('first header cell must be "entity"', line=header_line)
    try:
        years = [int(c) for c in header[1:]]
    except ValueError:
        raise ParseError("year headers must be integers", line=header_line) from None
    if any(b - a != 1 for a, b in zip(years, years[1:])):
        raise ParseError("years must be contiguous and increasing", line=header_line)

    entities, values, seen = [], [], {}
    for line, row in numbered[1:]:
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} cells, found {len(row)}", line=line)
        code = row[0].strip()
        if not code:
            raise ParseError("empty entity code", line=line)
        if code in seen:
            raise ParseError(f"duplicate entity {code} (first on line {seen[code]})", line=line)
        seen[code] = line
        parsed = []
        for year, cell in zip(years, row[1:]):
            cell = cell.strip()
            if cell == _MISSING:
                parsed.append(np.nan)
                continue
            try:
                parsed.append(float(cell))
            except ValueError:
                raise ParseError(f"non-numeric value {cell!r} for {code} in {year}", line=line) from None
        try:
            _check_trailing_gaps(np.array(parsed), code, years)
        except InputError as exc:
            raise ParseError(str(exc), line=line) from None
        entities.append(code)
        values.append(parsed)

    if len(entities) < 2 or len(years) < 3:
        raise ParseError(
            f"panel needs at least 2 entities and 3 years, got {len(entities)} x {len(years)}",
            line=header_line,
        )
    return GrowthPanel(entities, years, np.array(values), indicator, converted=(kind == GROWTH))


def to_growth_rates(levels: GrowthPanel, method: str = "pct-change") -> GrowthPanel:
    """Convert a levels panel into annual growth rates.

    ``pct-change`` gives ``(x_t - x_{t-1}) / x_{t-1}``, ``log-diff`` gives
    ``ln(x_t / x_{t-1})``. The first year is dropped.
    """
    if levels.converted:
        raise InputError("panel already holds growth rates")
    if method not in GROWTH_METHODS:
        raise InputError(f"unknown growth method {method!r}; use one of {GROWTH_METHODS}")
    x = levels.values
    prev, cur = x[:, :-1], x[:, 1:]
    valid = ~np.isnan(prev) & ~np.isnan(cur)

    if method == "pct-change":
        bad = valid & (prev == 0)
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            raise InputError(
                f"zero level for {levels.entities[i]} in {levels.years[j]}: "
                "percent change undefined"
            )
        with np.errstate(invalid="ignore"):
            out = (cur - prev) / prev
    else:
        present = ~np.isnan(x)
        bad = present & (x <= 0)
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            raise InputError(
                f"nonpositive level for {levels.entities[i]} in {levels.years[j]}: "
                "log-difference undefined"
            )
        with np.errstate(invalid="ignore"):
            out = np.log(cur / prev)
    return GrowthPanel(levels.entities, levels.years[1:], out, levels.indicator, converted=True)


def windows(panel: GrowthPanel, size: int, step: int = 1) -> list[PanelWindow]:
    """Rolling windows of ``size`` years moved by ``step`` years.

    Window starts run over the full year axis. Any window reaching past the
    last year common to all entities is cut back to that year for every
    entity; windows left with fewer than 2 years are skipped.
    """
    if size < 2:
        raise InputError(f"window size must be >= 2, got {size}")
    if step < 1:
        raise InputError(f"window step must be >= 1, got {step}")
    n_years = len(panel.years)
    if size > n_years:
        raise InsufficientDataError(
            f"window size {size} exceeds the {n_years} available years"
        )
    first = panel.years[0]
    last_common = panel.last_common_year
    out = []
    for offset in range(0, n_years - size + 1, step):
        start = first + offset
        end = min(start + size - 1, last_common)
        if end - start + 1 < 2:
            continue
        cols = slice(offset, offset + end - start + 1)
        out.append(PanelWindow(panel.entities, start, size, end, panel.values[:, cols], panel.indicator))
    if not out:
        raise InsufficientDataError("no valid window fits the common data range")
    return out


def panel_from_window(window: PanelWindow) -> GrowthPanel:
    """View a single window as a panel (convenient for plotting/export)."""
    years = range(window.start_year, window.end_year + 1)
    return GrowthPanel(window.entities, years, window.values, window.indicator)


def make_panel(entities: Sequence[str], start_year: int, values, indicator: str = "") -> GrowthPanel:
    """Build a growth-rate panel from an entities x years array."""
    values = np.asarray(values, dtype=float)
    years = range(start_year, start_year + values.shape[1])
    return GrowthPanel(entities, years, values, indicator)
