# %% [markdown]
# # Distinct vs. EAD on toy response sets
#
# Distinct divides the number of unique tokens by the number of tokens.
# EAD divides it by the number of unique tokens you would *expect* to see if
# every token were drawn uniformly from a vocabulary of size V.

# %%
from eadistinct import ResponseSet, VocabSpec, ead, expected_distinct_upper

short = ResponseSet.from_texts(["i do not know", "me too", "that sounds great"])
longer = ResponseSet.from_texts([
    "i do not know what you are talking about to be honest with you",
    "me too and i think we should go there again next week",
    "that sounds great but i am not sure i can make it on time",
])

vocab = VocabSpec(30522)
for name, rs in [("short", short), ("longer", longer)]:
    r = ead(rs, 1, vocab)
    print(f"{name:>6}: N={r.n_distinct:3d} C={r.n_total:3d} distinct={r.distinct:.4f} ead={r.ead:.4f}")

# %% [markdown]
# The denominator grows almost linearly while C is small relative to V, then
# saturates at V. With V=5 the saturation is visible after a handful of tokens.

# %%
for c in (1, 2, 5, 10, 50):
    print(c, round(expected_distinct_upper(5, c), 6), round(expected_distinct_upper(30522, c), 6))

# %% [markdown]
# Bigram scores need an n-gram vocabulary size. Passing a token-level size
# works but emits a VocabMismatchWarning.

# %%
print(ead(longer, 2, VocabSpec(200_000, "ngram-derived")))
