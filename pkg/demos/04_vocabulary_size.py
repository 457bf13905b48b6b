# %% [markdown]
# # Choosing the vocabulary size
#
# A shared constant such as 30522 makes scores comparable across papers.
# Counting the vocabulary of one dataset is reasonable for single-dataset
# studies. For short sets the choice barely matters.

# %%
import numpy as np

from eadistinct import count_vocab, expected_distinct_upper

lines = ["the cat sat on the mat", "The dog sat on the log", "a cat and a dog"]
for mode in ("whitespace", "lowercase-whitespace"):
    v, census = count_vocab(lines, mode)
    print(mode, v, census.most_common(3))

# %%
cs = np.array([10, 50, 100, 1000, 10000])
a = expected_distinct_upper(30522, cs)
b = expected_distinct_upper(61044, cs)
for c, rel in zip(cs, np.abs(a - b) / a):
    print(f"C={c:6d}  relative change from doubling V: {rel:.2e}")
