"""Robustness of a few small digraphs, by MILP and by exhaustive search."""
# %%
from robustmilp import analyze, from_edge_list, laplacian
from robustmilp.api import Method
from robustmilp.generators import complete_digraph, directed_cycle

graphs = {
    "3-cycle": directed_cycle(3),
    "K5": complete_digraph(5),
    "out-tree": from_edge_list(6, [(1, 2), (1, 3), (2, 4), (2, 5), (3, 6)]),
    "two 3-cycles": from_edge_list(6, [(1, 2), (2, 3), (3, 1), (4, 5), (5, 6), (6, 4)]),
}

# %%
# The Laplacian is the only input the integer programs need.
print(laplacian(graphs["3-cycle"]))

# %%
# Each report carries r_max, s_max at r_max, F_max and the two bounds, plus the
# subset pairs that certify them.  Both methods must agree.
for name, D in graphs.items():
    milp = analyze(D, parts=("rs", "fmax", "bounds"))
    brute = analyze(D, method=Method.EXHAUSTIVE, parts=("rs", "fmax", "bounds"))
    assert (milp.r_max, milp.s_max_at_r_max, milp.f_max) == (brute.r_max, brute.s_max_at_r_max, brute.f_max)
    print(f"{name:13s} (r*, s*) = ({milp.r_max}, {milp.s_max_at_r_max})  F_max = {milp.f_max}  "
          f"bounds = [{milp.lower_bound_r}, {milp.upper_bound_r}]  witness = {milp.certificates['r_max']}")
    for note in milp.notes:
        print(f"{'':13s} note: {note}")
