"""Watching the branch-and-bound close the gap on a larger graph."""
# %%
from robustmilp import GenSpec, SolveConfig, generate, laplacian, solve_anytime
from robustmilp.model import build_rmax_milp, decode_pair

D = generate(GenSpec("digraph", 16, p=0.7, seed=3))
problem, meta = build_rmax_milp(laplacian(D))
print(f"{problem.num_vars} columns, {problem.num_rows} rows")

# %%
# The observer fires whenever the proven bound rises or the incumbent falls.
def show(bound, incumbent):
    print(f"  bound {bound!s:>5}  incumbent {incumbent!s:>5}")

result = solve_anytime(problem, SolveConfig(time_limit=30), show)
print(result.status.value, result.incumbent_value, f"{result.nodes_explored} nodes", f"{result.elapsed_seconds:.2f} s")

# %%
S1, S2 = decode_pair(meta, result.incumbent_point)
print("witness pair:", S1.members, S2.members)
