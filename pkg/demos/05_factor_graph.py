"""
Which indicators move countries together?
=========================================

Join each country to every indicator in which it has at least one strong
movement correlation, then score subsets of indicators by how densely
their member countries connect.
"""

from macrocluster import datasets
from macrocluster.factorgraph import build_factor_graph, default_subsets, enumerate_clusters

matrices = {k: datasets.movement_reference(k) for k in datasets.INDICATORS}
g = build_factor_graph(matrices, threshold=0.9)
print(f"{len(g.edges)} edges, {len(g.entities)} countries attached, excluded: {list(g.excluded)}")
for entity, variables in g.cost_terms()[:5]:
    print(f"  {entity}: {' '.join(variables)}")

# subsets that leave out one indicator
for c in enumerate_clusters(g, default_subsets(g)):
    print(f"{c.label:12s} {len(c.members):2d} members  p={c.probability:.3f}  S={c.entropy:.3f}")
