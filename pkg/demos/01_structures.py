# %% [markdown]
# # Finite relational structures
#
# Structures are stored as dense boolean arrays, one per relation symbol.
# Embeddings are injective maps that preserve and reflect every relation, and
# they come out in lexicographic order.

# %%
from __future__ import annotations

from bigramsey.structures import (automorphisms, chain, embedding_images, empty_structure,
                                  enumerate_2types, graph, induced_substructure,
                                  roelcke_witness)

C5 = graph(5, [(i, (i + 1) % 5) for i in range(5)])
P3 = graph(3, [(0, 1), (1, 2)])
print(C5.tuples("E"))

# %% [markdown]
# Induced paths of length three inside the five-cycle. Every image row is an
# embedding, and the induced substructure on it is the path again.

# %%
rows = embedding_images(P3, C5)
print(len(rows), "embeddings")
print(rows[:4])
assert all(induced_substructure(C5, r) == P3 for r in rows)

# %% [markdown]
# Automorphism groups: the five-cycle has the ten symmetries of the pentagon,
# a chain has none beyond the identity.

# %%
print(len(automorphisms(C5)), len(automorphisms(chain(5))))

# %% [markdown]
# Two copies of a point inside a bigger structure can sit in a few joint
# configurations. A chain gives three (below, equal, above), an edgeless set
# gives two (equal or not).

# %%
for name, make in [("chain", chain), ("edgeless", empty_structure)]:
    print(name, [len(enumerate_2types(make(1), make(n))) for n in (3, 4, 5)])

# the smallest ambient size where every 2-type of a point is realized
print(roelcke_witness(chain(1), [chain(n) for n in range(6)], 5))
