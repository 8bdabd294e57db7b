"""Moving-average minimal-length-path (MAMLP) analysis.

Per window a virtual ``AVG`` entity is added, the augmented distance matrix
is reduced to its MST, and each entity is scored by its tree-path distance to
``AVG``. Stacking windows gives an entities x windows table whose rows are
then correlated with each other to find entities that move together inside
the hierarchy.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._util import is_flat, read_text
from .errors import DegenerateDataError, InputError, InsufficientDataError, ParseError
from .hierarchy import HierarchyTree, build_mst
from .metrics import (
    STATISTICAL,
    CorrelationMatrix,
    DistanceMatrix,
    distance_matrix,
    pearson,
)
from .panel import GrowthPanel, PanelWindow, windows

AVG = "AVG"
MLP_MODES = ("max-edge", "path-sum")
AVERAGE_KINDS = ("mean", "sum")


def augment_average(window: PanelWindow, how: str = "mean") -> PanelWindow:
    """Append the virtual ``AVG`` entity (cross-entity mean, or sum, per year)."""
    if AVG in window.entities:
        raise InputError(f"window already contains {AVG}")
    if how not in AVERAGE_KINDS:
        raise InputError(f"unknown average kind {how!r}")
    if len(window.entities) < 2:
        raise InsufficientDataError("AVERAGE agent needs at least 2 entities")
    agg = window.values.mean(axis=0) if how == "mean" else window.values.sum(axis=0)
    return PanelWindow(
        window.entities + (AVG,),
        window.start_year,
        window.size,
        window.end_year,
        np.vstack([window.values, agg]),
        window.indicator,
    )


def mamlp_tree(m: DistanceMatrix) -> HierarchyTree:
    """MST of an ``AVG``-augmented matrix."""
    if AVG not in m.entities:
        raise InputError(f"distance matrix has no {AVG} entity")
    t = build_mst(m)
    return HierarchyTree(t.nodes, t.edges, "mamlp")


def mlp_distances(m: DistanceMatrix, mode: str = "max-edge") -> dict[str, float]:
    """Distance of every entity to ``AVG`` along the augmented MST.

    ``max-edge`` takes the largest edge on the path (the subdominant
    ultrametric distance); ``path-sum`` adds the edges up.
    """
    if mode not in MLP_MODES:
        raise InputError(f"unknown MLP mode {mode!r}; use one of {MLP_MODES}")
    tree = mamlp_tree(m)
    agg = max if mode == "max-edge" else sum
    out = {}
    for entity in m.entities:
        if entity == AVG:
            continue
        weights = [w for _, _, w in tree.path(entity, AVG)]
        out[entity] = float(agg(weights))
    return out


@dataclass(frozen=True, eq=False)
class MlpTable:
    """Entities x windows matrix of MLP distances to ``AVG``."""

    entities: tuple[str, ...]
    windows: tuple[str, ...]
    dhat: np.ndarray

    def __post_init__(self):
        dhat = np.array(self.dhat, dtype=float)
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "windows", tuple(self.windows))
        if dhat.shape != (len(self.entities), len(self.windows)):
            raise InputError(
                f"dhat shape {dhat.shape} does not match "
                f"{len(self.entities)} entities x {len(self.windows)} windows"
            )
        dhat.setflags(write=False)
        object.__setattr__(self, "dhat", dhat)

    def row(self, entity: str) -> np.ndarray:
        return self.dhat[self.entities.index(entity)]

    def column(self, window: str) -> dict[str, float]:
        j = self.windows.index(window)
        return dict(zip(self.entities, map(float, self.dhat[:, j])))

    def to_csv(self, decimals: int = 6) -> str:
        """Rows = windows, columns = entities."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["window", *self.entities])
        for j, label in enumerate(self.windows):
            w.writerow([label, *(f"{v:.{decimals}f}" for v in self.dhat[:, j])])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, source) -> "MlpTable":
        rows = [r for r in csv.reader(io.StringIO(read_text(source))) if any(c.strip() for c in r)]
        if len(rows) < 2:
            raise ParseError("MLP table needs a header and at least one window row", line=1)
        header = [c.strip() for c in rows[0]]
        if header[0].lower() != "window":
            raise ParseError('first header cell must be "window"', line=1)
        labels, cols = [], []
        for n, row in enumerate(rows[1:], start=2):
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} cells, found {len(row)}", line=n)
            try:
                cols.append([float(c) for c in row[1:]])
            except ValueError:
                raise ParseError("non-numeric MLP distance", line=n) from None
            labels.append(row[0].strip())
        return cls(header[1:], labels, np.array(cols).T)


def mlp_table(
    panel: GrowthPanel,
    size: int,
    step: int = 1,
    mode: str = "max-edge",
    metric=STATISTICAL,
    average: str = "mean",
) -> MlpTable:
    """MLP distances to ``AVG`` for every rolling window, in time order."""
    if not panel.converted:
        raise InputError("panel holds raw levels; convert to growth rates first")
    cols, labels = [], []
    for win in windows(panel, size, step):
        m = distance_matrix(augment_average(win, average), metric)
        dist = mlp_distances(m, mode)
        cols.append([dist[e] for e in panel.entities])
        labels.append(win.label)
    return MlpTable(panel.entities, labels, np.array(cols).T)


def movement_correlations(t: MlpTable, skip_degenerate: bool = False) -> CorrelationMatrix:
    """Pearson correlation between every pair of MLP-distance rows.

    A constant row has no defined correlation. By default that is an error;
    with ``skip_degenerate`` its pairs are left NaN and the entity is listed
    in ``excluded``.
    """
    n, n_win = t.dhat.shape
    if n_win < 3:
        raise InsufficientDataError(f"movement correlations need >= 3 windows, got {n_win}")
    flat = [e for e, row in zip(t.entities, t.dhat) if is_flat(np.var(row), row)]
    if flat and not skip_degenerate:
        raise DegenerateDataError(f"constant MLP distance row: {', '.join(flat)}")
    c = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            if t.entities[i] in flat or t.entities[j] in flat:
                c[i, j] = c[j, i] = np.nan
            else:
                c[i, j] = c[j, i] = pearson(t.dhat[i], t.dhat[j])
    return CorrelationMatrix(t.entities, c, "hierarchy-movement", tuple(flat))


@dataclass(frozen=True)
class StrongLinkSet:
    positive_threshold: float
    negative_threshold: float
    links: tuple[tuple[str, str, float, int], ...]

    @property
    def positive(self):
        return [l for l in self.links if l[3] > 0]

    @property
    def negative(self):
        return [l for l in self.links if l[3] < 0]

    def __len__(self):
        return len(self.links)


def strong_links(c: CorrelationMatrix, pos_thr: float = 0.9, neg_thr: float = -0.5) -> StrongLinkSet:
    """Off-diagonal pairs with ``c >= pos_thr`` (sign +1) or ``c <= neg_thr`` (sign -1)."""
    if not pos_thr > neg_thr:
        raise InputError(f"positive threshold {pos_thr} must exceed negative threshold {neg_thr}")
    links = []
    n = len(c.entities)
    for i in range(n):
        for j in range(i + 1, n):
            v = c.c[i, j]
            if np.isnan(v):
                continue
            if v >= pos_thr:
                links.append((c.entities[i], c.entities[j], float(v), 1))
            elif v <= neg_thr:
                links.append((c.entities[i], c.entities[j], float(v), -1))
    return StrongLinkSet(float(pos_thr), float(neg_thr), tuple(links))


@dataclass(frozen=True)
class ClusterReport:
    clusters: tuple[tuple[str, ...], ...]
    outliers: tuple[str, ...]
    unclustered: tuple[str, ...]


def cluster_partition(links: StrongLinkSet, entities: Sequence[str]) -> ClusterReport:
    """Group entities by their strong links.

    Clusters are connected components (two or more members) of the
    positive-link graph. An entity with no positive link but a strong
    anti-correlation with some clustered entity is an anti-correlated
    outlier. Everything else is unclustered.
    """
    entities = list(entities)
    adj = {e: set() for e in entities}
    for a, b, _, sign in links.positive:
        adj[a].add(b)
        adj[b].add(a)

    seen, clusters = set(), []
    for e in entities:
        if e in seen or not adj[e]:
            continue
        comp, stack = [], [e]
        seen.add(e)
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        clusters.append(tuple(x for x in entities if x in comp))

    clustered = {x for c in clusters for x in c}
    outliers = []
    for e in entities:
        if e in clustered:
            continue
        partners = {b if a == e else a for a, b, _, _ in links.negative if e in (a, b)}
        if partners & clustered:
            outliers.append(e)
    unclustered = [e for e in entities if e not in clustered and e not in outliers]
    return ClusterReport(tuple(clusters), tuple(outliers), tuple(unclustered))


def sensitivity(c: CorrelationMatrix) -> list[tuple[str, float]]:
    """Sum of squared correlations of each entity with all others, descending.

    NaN (excluded) pairs contribute nothing.
    """
    sq = np.nan_to_num(c.c, nan=0.0) ** 2
    np.fill_diagonal(sq, 0.0)
    chi = sq.sum(axis=1)
    order = sorted(range(len(c.entities)), key=lambda i: (-chi[i], c.entities[i]))
    return [(c.entities[i], float(chi[i])) for i in order]


def cluster_report_json(
    indicator: str,
    links: StrongLinkSet,
    report: ClusterReport,
    sens: Sequence[tuple[str, float]],
) -> str:
    doc = {
        "indicator": indicator,
        "thresholds": {"positive": links.positive_threshold, "negative": links.negative_threshold},
        "clusters": [list(c) for c in report.clusters],
        "outliers": list(report.outliers),
        "unclustered": list(report.unclustered),
        "sensitivity": [{"entity": e, "chi": round(v, 6)} for e, v in sens],
        "strong_links": [
            {"i": a, "j": b, "c": round(v, 6), "sign": s} for a, b, v, s in links.links
        ],
    }
    return json.dumps(doc, indent=2) + "\n"
