# %% [markdown]
# # Correlating metric scores with human judgments
#
# Per-system Distinct, EAD and human diversity scores (ten dialogue systems,
# two datasets) are in `data/`. Each metric column is correlated with the
# human column; markers follow the usual convention (dagger p<0.1, double
# dagger p<0.05).

# %%
import csv
from pathlib import Path

from eadistinct import filter_workers, kendall, normalize_scores, pearson, spearman

here = Path(__file__).parent if "__file__" in globals() else Path("demos")

for dataset in ("dailydialog", "opensubtitles"):
    with open(here / "data" / f"human_eval_{dataset}.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    human = [float(r["human"]) for r in rows]
    print(dataset)
    for column in ("distinct", "ead"):
        x = [float(r[column]) for r in rows]
        cells = []
        for f in (pearson, spearman, kendall):
            res = f(x, human)
            cells.append(f"{res.method}={res.coefficient:.2f}{res.flags} (p={res.p_value:.3f})")
        print(f"  {column:>8}: " + "  ".join(cells))

# %% [markdown]
# Annotators score relative contrast, so raw scores are mapped onto [0, 10].
# Two annotators with the same contrast become identical after normalizing.

# %%
print(normalize_scores([1, 2, 2]), normalize_scores([2, 5, 5]))

# %% [markdown]
# Annotators whose scores correlate poorly with the panel mean (Pearson
# below 0.65) are dropped.

# %%
panel = [
    [3, 5, 6, 8, 9],
    [2, 5, 5, 7, 9],
    [4, 4, 6, 9, 8],
    [9, 2, 7, 1, 3],
]
print("kept annotators:", filter_workers(panel))
