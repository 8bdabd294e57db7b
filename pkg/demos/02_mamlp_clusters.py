"""
Distance to the average and co-moving clusters
==============================================

Add an AVG entity to every rolling window, track how far each country sits
from it, and correlate those trajectories. Countries whose distance to the
average rises and falls together form clusters.
"""

from macrocluster import datasets
from macrocluster.mamlp import cluster_partition, mlp_table, movement_correlations, sensitivity, strong_links

# from a growth panel: 7 windows of 5 years
t = mlp_table(datasets.panel("gdp"), 5)
print("windows:", ", ".join(t.windows))
print("FR distances to AVG:", t.row("FR").round(2))

# the published GDP table gives the reference clustering
t = datasets.mlp_reference("GDP")
c = movement_correlations(t)

links = strong_links(c, 0.9, -0.5)
print(f"{len(links.positive)} strong positive links, {len(links.negative)} strong negative")
for a, b, value, _ in links.negative:
    print(f"  {a}-{b} {value:+.2f}")

report = cluster_partition(links, c.entities)
for k in report.clusters:
    print("cluster:", "-".join(k))
print("anti-correlated outliers:", ", ".join(report.outliers))

# sum of squared movement correlations; high means well connected
print("most connected:")
for entity, chi in sorted(sensitivity(c), key=lambda p: -p[1])[:4]:
    print(f"  {entity} {chi:.2f}")
