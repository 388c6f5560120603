"""Coin-flip splitting collapses on an unbalanced two-location instance.

The instance puts n^2 coincident points at one spot and n at another. The
optimal tree separates the two locations at the root and then earns every
single pair: within-location pairs split under pure nodes have delta = 0 and
earn 1 by convention, and cross pairs always earn 1. Random splitting mixes
the locations for the first ~log(n) levels, during which separated
within-location pairs earn nothing, so its expected ratio to the optimum
decays as n grows.
"""

from hierclust import (
    RandomBadInstanceSpec,
    RngStream,
    build_random_bad_instance,
    clean_reference_tree,
    run_random_bad,
    tree_revenue,
)

print("reference tree sanity check at n=4:")
spec = RandomBadInstanceSpec(4)
points = build_random_bad_instance(spec)
ref = tree_revenue(points, clean_reference_tree(spec)).total
print(f"  clean-first tree earns {ref:.0f} of {spec.optimal_revenue():.0f}")

print("\nrandom splitting, 200 trials per size:")
rows = run_random_bad([4, 8, 12], trials=200, rng=RngStream(2024))
print(f"  {'n':>3} {'points':>7} {'mean ratio':>11} {'std':>8} {'reference':>10}")
for row in rows:
    m = row.n * row.n + row.n
    print(f"  {row.n:>3} {m:>7} {row.mean_ratio:>11.4f} {row.std_ratio:>8.4f} {row.reference_ratio:>10.4f}")

print("\nthe mean ratio falls as n grows while the clean tree stays at 1.")
