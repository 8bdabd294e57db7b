"""
Correlation distances and spanning trees
========================================

One 5-year window of the EU-15 growth fixture, turned into a distance
matrix and then into the three tree shapes the package builds.
"""

from macrocluster import datasets
from macrocluster.hierarchy import build_chain, build_lmst, build_mst, subdominant_ultrametric, threshold_clusters
from macrocluster.metrics import distance_matrix, matrix_moments
from macrocluster.panel import windows

panel = datasets.panel("gdp")
w = windows(panel, 5)[0]
print(w.label, "-", len(w.entities), "entities")

# d = sqrt(2 (1 - C)); 0 for identical movement, 2 for mirror images
d = distance_matrix(w)
mom = matrix_moments(d)
print(f"mean distance {mom.mean:.3f}, sd {mom.sigma:.3f}, standardized mean {mom.standardized_mean:.3f}")

# closest pairs first: these seed the trees
for dist, a, b in d.sorted_pairs()[:3]:
    print(f"  {a}-{b}  {dist:.3f}")

mst = build_mst(d)
print("MST weight", round(mst.total_weight, 3), "degrees", mst.degree())

# the LMST grows from the closest pair and ends up with the same weight
print("LMST weight", round(build_lmst(d).total_weight, 3))

# a nearest-neighbour chain is a spanning tree with no branching
chain = build_chain(d, "bidirectional")
print("BMLP chain:", " ".join(chain.chain_order()))

# the subdominant ultrametric reads the largest hop on each tree path
u = subdominant_ultrametric(mst)
print("ultrametric DK-NL", round(u["DK", "NL"], 3), "vs direct", round(d["DK", "NL"], 3))

# cutting the tree at d* gives nested clusters
for cut in (0.6, 0.9, 1.2):
    groups = threshold_clusters(mst, cut).clusters
    print(f"d* = {cut}: {len(groups)} groups, largest {max(len(g) for g in groups)}")
