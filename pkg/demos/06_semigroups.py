# %% [markdown]
# # Finite semigroups
#
# In a finite semigroup the structure facts about idempotents and minimal
# one-sided ideals can be checked exactly on the multiplication table.

# %%
from __future__ import annotations

from bigramsey.semigroups import (check_associativity, cyclic_group, direct_product,
                                  idempotents, left_zero, minimal_left_ideals,
                                  minimal_right_ideals, random_tables, right_zero,
                                  table_catalog, verify_semifacts)

print(check_associativity([[(x - y) % 3 for y in range(3)] for x in range(3)]))

# %% [markdown]
# A rectangular band: left-zero times right-zero. Minimal right ideals are the
# rows, minimal left ideals the columns, and each row meets each column in a
# one-element group.

# %%
S = direct_product(left_zero(2), right_zero(3))
print(idempotents(S))
print([sorted(M) for M in minimal_right_ideals(S)])
print([sorted(L) for L in minimal_left_ideals(S)])
print("\n".join(verify_semifacts(S).lines()))

# %% [markdown]
# Every associative table on up to four points, and a seeded sample.

# %%
print([len(table_catalog(n)) for n in range(1, 5)])
bad = [S for S in random_tables(4, 1000, seed=0) if not verify_semifacts(S).ok]
print(len(bad), "failures;", idempotents(cyclic_group(6)), idempotents(right_zero(3)))
