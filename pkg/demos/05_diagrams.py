# %% [markdown]
# # Diagrams
#
# A diagram has one finite label set per level and one table per pair of
# levels. The table says which lower label a higher label restricts to along
# each connector.

# %%
from __future__ import annotations

import random

from bigramsey import acceptance
from bigramsey.diagrams import (ap_check, diagram_from_colorings, diagram_of_expansion,
                                expansion_from_diagram, isomorphic, jep_check, random_diagram,
                                validate, verify_ap)
from bigramsey.structures import chain

_, K, cols = acceptance.devlin_colorings(3)
CHAINS = [chain(k) for k in (1, 2, 3)]
D = diagram_from_colorings(cols, CHAINS)
print([len(J) for J in D.levels], validate(D).ok)

# %% [markdown]
# Round trip: a diagram yields an expansion of the exhaustion, and the
# expansion yields a diagram isomorphic to the one we started from.

# %%
rng = random.Random(0)
for _ in range(5):
    R = random_diagram(rng, r=3)
    back = diagram_of_expansion(expansion_from_diagram(R), R.structures)
    print([len(J) for J in R.levels], isomorphic(R, back) is not None)

# %% [markdown]
# Joint embedding: the two pair types both occur inside some triple type.

# %%
p, q = D.levels[1]
print(jep_check(D, 1, p, q, 2))

# %% [markdown]
# Amalgamation over a pair needs the four-level diagram. This builds the
# Devlin coding to a depth where all 272 four-point types occur, which takes
# about half a minute.

# %%
D4 = acceptance.devlin_diagram_4()
inst = next(i for i in acceptance.ap_instances(D4, 1, 2) if i[0] != i[1])
w = ap_check(D4, 1, 2, *inst, 3)
print(inst, w, verify_ap(D4, 1, 2, *inst, w))
