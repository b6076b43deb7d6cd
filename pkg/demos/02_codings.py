# %% [markdown]
# # Tree codings
#
# Leaves of a growing binary tree code the points of a countable structure.
# The order between leaves is "branches left at the meet", and an extra
# 4-ary relation R compares the levels of meets.

# %%
from __future__ import annotations

from bigramsey import codings
from bigramsey.codings import meet, prec, relation_R

print(meet("0110", "010"), prec("00", "01"), relation_R("00", "00", "010", "010"))

# %% [markdown]
# The first round splits the root into two leaves at fresh levels. After ten
# rounds there are eleven leaves with all leaf and meet levels distinct.

# %%
c = codings.build_devlin(1)
print(c.nodes)
c = codings.grow(c, 9)
print(len(c.leaves), codings.check_invariants(c))
for word in c.nodes:
    print(word)

# %% [markdown]
# The Rado coding reads the graph off the words: a shorter word x and a
# longer word y are adjacent when y has a 1 at position |x|.

# %%
r = codings.build_rado(8, seed=1)
K = codings.emit_structure(r)
print(K.language.names)
print(K.arrays["E"].astype(int))

# %% [markdown]
# The tournament on two dense pieces: points in the same piece point
# forward, points in different pieces point backward.

# %%
s = codings.build_s2(6)
S = codings.emit_structure(s)
print(S.arrays["P0"].astype(int))
print(S.arrays["E"].astype(int))
print(codings.to_dot(codings.build_devlin(3)))
