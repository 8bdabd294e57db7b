"""Bipartite indicator/entity factor graph and variable-subset clusters.

Variable nodes are indicators, function nodes are entities. An entity is
joined to an indicator when it has at least one strong (``|C| >= threshold``)
movement correlation in that indicator's matrix.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._util import read_text
from .errors import InputError, ParseError
from .metrics import CorrelationMatrix


@dataclass(frozen=True)
class FactorGraph:
    variables: tuple[str, ...]
    entities: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]  # (entity, variable)
    threshold: float = math.nan
    excluded: tuple[str, ...] = ()

    def __post_init__(self):
        vs, es = set(self.variables), set(self.entities)
        for e, v in self.edges:
            if e not in es or v not in vs:
                raise InputError(f"edge ({e}, {v}) does not join an entity to a variable")

    def neighbours(self, entity: str) -> tuple[str, ...]:
        """Variables attached to ``entity``, in variable order."""
        attached = {v for e, v in self.edges if e == entity}
        return tuple(v for v in self.variables if v in attached)

    def cost_terms(self) -> list[tuple[str, tuple[str, ...]]]:
        """One ``(entity, variables)`` term per function node."""
        return [(e, self.neighbours(e)) for e in self.entities]

    def to_json(self) -> str:
        doc = {
            "threshold": None if math.isnan(self.threshold) else self.threshold,
            "variables": list(self.variables),
            "entities": list(self.entities),
            "edges": [{"entity": e, "variable": v} for e, v in self.edges],
            "excluded": list(self.excluded),
        }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_edge_csv(cls, source, variables: Sequence[str] | None = None) -> "FactorGraph":
        """Read an ``entity,variable`` edge list."""
        rows = [r for r in csv.reader(io.StringIO(read_text(source))) if any(c.strip() for c in r)]
        if not rows or [c.strip().lower() for c in rows[0]] != ["entity", "variable"]:
            raise ParseError('edge list header must be "entity,variable"', line=1)
        edges = []
        for n, row in enumerate(rows[1:], start=2):
            if len(row) != 2:
                raise ParseError("expected 2 cells", line=n)
            edges.append((row[0].strip(), row[1].strip()))
        entities = list(dict.fromkeys(e for e, _ in edges))
        found = list(dict.fromkeys(v for _, v in edges))
        if variables is None:
            variables = found
        elif set(found) - set(variables):
            raise ParseError(f"unknown variables {sorted(set(found) - set(variables))}")
        return cls(tuple(variables), tuple(entities), tuple(edges))


@dataclass(frozen=True)
class VariableCluster:
    variables: tuple[str, ...]
    members: tuple[str, ...]
    links: int
    possible_links: int
    probability: float
    entropy: float

    @property
    def label(self) -> str:
        return "-".join(self.variables)


def build_factor_graph(matrices: Mapping[str, CorrelationMatrix], threshold: float = 0.9) -> FactorGraph:
    """Edges from strong correlations, absolute value compared to ``threshold``.

    ``matrices`` maps indicator label to movement-correlation matrix; its
    iteration order fixes the variable order. Entities with no edge at all
    are dropped from the graph and listed in ``excluded``.
    """
    if not matrices:
        raise InputError("factor graph needs at least one indicator")
    items = list(matrices.items())
    ref = items[0][1].entities
    for name, c in items[1:]:
        if set(c.entities) != set(ref):
            raise InputError(f"indicator {name} has a different entity set")
    edges = set()
    for name, c in items:
        a = np.abs(np.nan_to_num(c.c, nan=0.0))
        np.fill_diagonal(a, 0.0)
        for i, e in enumerate(c.entities):
            if np.any(a[i] >= threshold):
                edges.add((e, name))
    variables = tuple(name for name, _ in items)
    ordered = tuple((e, v) for e in ref for v in variables if (e, v) in edges)
    attached = tuple(e for e in ref if any(x == e for x, _ in ordered))
    excluded = tuple(e for e in ref if e not in attached)
    return FactorGraph(variables, attached, ordered, float(threshold), excluded)


def entropy(p: float) -> float:
    """``-p ln p``, zero at p = 0 and p = 1."""
    if not 0.0 <= p <= 1.0:
        raise InputError(f"probability {p} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log(p)


def enumerate_clusters(g: FactorGraph, subsets: Iterable[Sequence[str]]) -> list[VariableCluster]:
    """Score each variable subset.

    Members are the function nodes whose whole neighbourhood lies inside the
    subset. ``links`` counts their edges, ``possible_links`` is members times
    the total number of variables, and the probability is their ratio.
    """
    out = []
    n_vars = len(g.variables)
    for subset in subsets:
        subset = tuple(subset)
        if not subset:
            raise InputError("variable subset must be nonempty")
        unknown = set(subset) - set(g.variables)
        if unknown:
            raise InputError(f"unknown variables {sorted(unknown)}")
        inside = set(subset)
        members = [e for e in g.entities if g.neighbours(e) and set(g.neighbours(e)) <= inside]
        links = sum(len(g.neighbours(e)) for e in members)
        possible = len(members) * n_vars
        if possible == 0:
            out.append(VariableCluster(subset, (), 0, 0, math.nan, 0.0))
            continue
        p = links / possible
        out.append(VariableCluster(subset, tuple(members), links, possible, p, entropy(p)))
    return out


def default_subsets(g: FactorGraph) -> list[tuple[str, ...]]:
    """All subsets leaving out exactly one variable."""
    k = len(g.variables)
    return [tuple(c) for c in itertools.combinations(g.variables, k - 1)] if k > 1 else [g.variables]


def clusters_to_csv(clusters: Sequence[VariableCluster]) -> str:
    lines = ["variables,members,links,possible_links,probability,entropy"]
    for c in clusters:
        p = "" if math.isnan(c.probability) else f"{c.probability:.3f}"
        lines.append(f"{c.label},{'-'.join(c.members)},{c.links},{c.possible_links},{p},{c.entropy:.3f}")
    return "\n".join(lines) + "\n"
