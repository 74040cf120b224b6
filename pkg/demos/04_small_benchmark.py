"""A desk-sized version of the benchmark grid, comparing both methods."""
# %%
from robustmilp.cli import run_bench

result = run_bench(["er", "kout"], [7, 8], 3, problem="rs", p_values=[0.5], k_values=[3], time_limit=10)
print(f"compared {result.compared} graphs, {len(result.disagreements)} disagreements")

# %%
for row in result.summaries:
    print(f"{row['family']:7s} n={row['n']} param={row['param']} {row['method']:10s} "
          f"mean {row['mean_seconds']:.3f} s  max {row['max_seconds']:.3f} s")
