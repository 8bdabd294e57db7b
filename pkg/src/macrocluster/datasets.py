"""Access to the bundled fixtures."""

from __future__ import annotations

import csv
import io
from importlib import resources

from .factorgraph import FactorGraph
from .mamlp import MlpTable
from .metrics import CorrelationMatrix
from .panel import GROWTH, LEVELS, GrowthPanel, load_panel

INDICATORS = ("GDP", "FCE", "GCF", "NEX")

_MLP_FILES = {
    "GDP": "gdp_mlp_1994_2004.csv",
    "FCE": "fce_mlp_1994_2004.csv",
    "GCF": "gcf_mlp_1994_2003.csv",
    "NEX": "nex_mlp_1994_2003.csv",
}

_PANELS = {
    "gdp": ("eu15_gdp_growth_1994_2004.csv", GROWTH, "GDP"),
    "nex": ("eu15_nex_growth_1994_2004.csv", GROWTH, "NEX"),
    "gdpc": ("eu15_gdpc_growth_1972_2004.csv", GROWTH, "GDPC"),
    "gdpc-levels": ("eu15_gdpc_levels_1971_2004.csv", LEVELS, "GDPC"),
    "convergence": ("synthetic_convergence.csv", GROWTH, "SYN"),
}


def path(name: str):
    """Traversable for a file in the data directory."""
    return resources.files("macrocluster") / "data" / name


def read_bytes(name: str) -> bytes:
    return path(name).read_bytes()


def _indicator(indicator: str) -> str:
    key = indicator.upper()
    if key not in INDICATORS:
        raise KeyError(f"unknown indicator {indicator!r}; choose from {INDICATORS}")
    return key


def mlp_reference(indicator: str = "GDP") -> MlpTable:
    """Published MLP-distance table for one indicator."""
    return MlpTable.from_csv(read_bytes(_MLP_FILES[_indicator(indicator)]))


def movement_reference(indicator: str = "GDP") -> CorrelationMatrix:
    """Published movement-correlation matrix (GDP typo cells corrected)."""
    key = _indicator(indicator)
    return CorrelationMatrix.from_csv(read_bytes(f"{key.lower()}_movement_corr.csv"))


def shuffled_movement_reference() -> CorrelationMatrix:
    return CorrelationMatrix.from_csv(read_bytes("gdp_movement_corr_shuffled.csv"))


def sensitivity_reference(indicator: str = "GDP") -> dict[str, float]:
    key = _indicator(indicator)
    rows = csv.DictReader(io.StringIO(read_bytes("sensitivity_reference.csv").decode("utf-8")))
    return {r["entity"]: float(r["chi"]) for r in rows if r["indicator"] == key}


def factor_graph_reference() -> FactorGraph:
    return FactorGraph.from_edge_csv(read_bytes("factor_graph_edges.csv"), variables=INDICATORS)


def cluster_table_reference() -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(read_bytes("cluster_table_reference.csv").decode("utf-8"))))


def panel(name: str = "gdp") -> GrowthPanel:
    """Synthetic panel fixture: gdp, nex, gdpc, gdpc-levels or convergence."""
    try:
        fname, kind, indicator = _PANELS[name]
    except KeyError:
        raise KeyError(f"unknown panel {name!r}; choose from {tuple(_PANELS)}") from None
    return load_panel(read_bytes(fname), kind, indicator)
