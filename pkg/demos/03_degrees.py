# %% [markdown]
# # Counting expansions
#
# For a finite substructure A of the coded structure, collect every expansion
# of A that occurs as the pullback of an embedding. The count stops growing
# once the coding is deep enough, and that stable count is compared with an
# abstract count of diagonal tree shapes.

# %%
from __future__ import annotations

from bigramsey import codings, degrees
from bigramsey.degrees import enumerate_expansions
from bigramsey.diagonal import devlin_oracle
from bigramsey.structures import chain

K = codings.emit_structure(codings.build_devlin(30))
for k in (1, 2, 3):
    print(k, len(enumerate_expansions(K, chain(k), ("<",))))

# %% [markdown]
# The stabilized table with its certificate: each row records the depth at
# which the count was first reached and the checkpoints that confirmed it.

# %%
table = degrees.degree_table("devlin", 3)
print(table.to_csv())
row = table.rows[-1]
print(row.checkpoints[:6], row.note)

# %% [markdown]
# The shape oracle alone gives the odd tangent numbers.

# %%
print([devlin_oracle(k) for k in range(1, 6)])

# %% [markdown]
# Other families: a point of the Rado graph, the edgeless sets ordered
# linearly (n! expansions), and the two-piece tournament.

# %%
for fam, kmax in [("rado", 2), ("sinf", 4), ("s2", 2)]:
    print(degrees.degree_table(fam, kmax).to_csv())
