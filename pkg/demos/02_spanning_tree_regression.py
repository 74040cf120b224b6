"""Why the exhaustive search starts r at max(min in-degree, 1).

A rooted out-tree has a root with in-degree zero.  Starting the nested
descent at the minimum in-degree would start it at r = 0 and report (0, n),
although every out-tree is 1-robust.
"""
# %%
from robustmilp import determine_robustness, random_out_tree, rs_robustness
from robustmilp.graph import min_in_degree

# %%
for seed in range(5):
    D, root = random_out_tree(8, seed)
    print(f"seed {seed}: root {root}, min in-degree {min_in_degree(D)}, "
          f"exhaustive {tuple(determine_robustness(D))}, MILP {tuple(rs_robustness(D))}")
