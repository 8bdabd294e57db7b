"""Regenerate the synthetic panel fixtures under src/macrocluster/data."""

from pathlib import Path

import numpy as np

from macrocluster.panel import GrowthPanel, to_growth_rates
from macrocluster.synthetic import clustered_panel, convergent_panel, levels_panel

DATA = Path(__file__).resolve().parents[1] / "src" / "macrocluster" / "data"


def rounded(p: GrowthPanel, decimals: int) -> GrowthPanel:
    return GrowthPanel(p.entities, p.years, np.round(p.values, decimals), p.indicator, p.converted)


def write(name: str, p: GrowthPanel) -> None:
    (DATA / name).write_text(p.to_csv(), encoding="utf-8", newline="\n")
    print(f"wrote {name}: {p.n_entities} x {len(p.years)}")


def main():
    write("eu15_gdp_growth_1994_2004.csv", rounded(clustered_panel(1994, 1994, 2004, "GDP"), 6))
    nex = clustered_panel(2003, 1994, 2004, "NEX", truncate={"DE": 2003, "GR": 2003, "LU": 2003, "NL": 2003})
    write("eu15_nex_growth_1994_2004.csv", rounded(nex, 6))
    levels = rounded(levels_panel(1971, 1971, 2004), 2)
    write("eu15_gdpc_levels_1971_2004.csv", levels)
    write("eu15_gdpc_growth_1972_2004.csv", rounded(to_growth_rates(levels), 6))
    write("synthetic_convergence.csv", rounded(convergent_panel(0), 6))


if __name__ == "__main__":
    main()
