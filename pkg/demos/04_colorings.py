# %% [markdown]
# # Colorings of copies
#
# A coloring assigns a label to every copy of A_m inside A_n. The pair and
# triple colorings below come from the expansion classes of the Devlin coding.

# %%
from __future__ import annotations

from bigramsey import codings
from bigramsey.colorings import (all_copies, coloring_diagram, constant, equivalent,
                                 expansion_coloring, induced_coloring, refines,
                                 strongly_refines)
from bigramsey.structures import chain

K = codings.emit_structure(codings.build_devlin(24))
g1, g2, g3 = (expansion_coloring(K, chain(k), ("<",))[0] for k in (1, 2, 3))
print(len(g2), "pairs in", len(g2.image), "colors;", len(g3), "triples in", len(g3.image), "colors")

# %% [markdown]
# The triple color determines the color of each sub-pair, connector by
# connector. That is strong refinement, and the table of values is one cell
# of a diagram.

# %%
conns = all_copies(chain(2), chain(3))
print(strongly_refines(g2, g3, conns))
cell = coloring_diagram(g2, g3, conns)
for j in cell.rows[:5]:
    print(j, [cell.table[(j, fi)] for fi in range(len(conns))])

# %% [markdown]
# Going the other way: starting from the triple coloring only, the coarsest
# pair coloring it strongly refines along the connector (0, 1). The result is
# the pair coloring again, up to renaming of colors.

# %%
res = induced_coloring(g3, chain(2), (0, 1), K.reduct(("<",)))
print(res.components, "components,", len(res.excluded), "pairs without an extension")
print(equivalent(res.coloring, g2.restrict(res.coloring.domain)))
print(refines(constant(g2.domain), g2), refines(g2, constant(g2.domain)))
