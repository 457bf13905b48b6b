# %% [markdown]
# # Length bias under the synthetic token source
#
# Token ids are drawn as Poisson counts with a rate that is uniform on
# (0, V). The source never changes, so a fair diversity score should not
# move as responses get longer. Distinct falls steadily; EAD stays near 1.

# %%
from eadistinct import SweepConfig, bias_summary, expected_distinct_upper, run_sweep

config = SweepConfig(lengths=(5, 10, 20, 40, 80), set_size=2000, trials=10, base_seed=2022)
result = run_sweep(config)

print("length  mean_distinct  predicted  mean_ead  sd_ead")
for s in result.summaries:
    c = s.length * config.set_size
    pred = expected_distinct_upper(30522, c) / c
    print(f"{s.length:6d}  {s.mean_distinct:13.4f}  {pred:9.4f}  {s.mean_ead:8.4f}  {s.sd_ead:.4f}")

# %%
print(bias_summary(result))

# %% [markdown]
# The same numbers are available as CSV for plotting:
#
#     ead-distinct sweep --lengths 5,10,20,40,80 --out sweep_out

# %%
print(result.summary_csv())
