from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bigramsey import codings
from bigramsey.colorings import (Coloring, ColoringError, all_copies, coloring_diagram,
                                 constant, equivalent, expansion_coloring, induced_coloring,
                                 persistence_check, product, pulled_back, random_coloring,
                                 refinement_search, refines, strongly_refines)
from bigramsey.structures import chain, compose

DOMAIN = [tuple(f) for f in itertools.combinations(range(5), 2)]


def colorings_on(n):
    return st.lists(st.integers(0, 2), min_size=n, max_size=n).map(
        lambda cs: Coloring(tuple(DOMAIN[:n]), tuple(cs)))


def test_constant_is_refined_by_everything():
    g = Coloring.from_function(DOMAIN, lambda f: f[0] % 2)
    assert refines(constant(DOMAIN), g)
    assert refines(g, g)


def test_identity_refines_parity():
    parity = Coloring.from_function(DOMAIN, lambda f: min(f) % 2)
    ident = Coloring.from_function(DOMAIN, lambda f: f)
    assert refines(parity, ident)
    assert not refines(ident, parity)


def test_domain_mismatch():
    with pytest.raises(ColoringError):
        refines(constant(DOMAIN), constant(DOMAIN[:3]))


def test_product_examples():
    g = Coloring.from_function(DOMAIN, lambda f: sum(f) % 3)
    assert equivalent(product(g, g), g)
    assert equivalent(product(constant(DOMAIN), g), g)


def test_product_image_counts_class_intersections():
    rng = np.random.default_rng(0)
    dom = DOMAIN[:6]
    for _ in range(20):
        g = random_coloring(dom, 2, rng)
        d = random_coloring(dom, 2, rng)
        cells = {(a, b) for a, b in zip(g.colors, d.colors)}
        assert len(product(g, d).image) == len(cells)


@settings(max_examples=80, deadline=None)
@given(colorings_on(6), colorings_on(6), colorings_on(6))
def test_refines_is_a_preorder(a, b, c):
    assert refines(a, a)
    if refines(a, b) and refines(b, c):
        assert refines(a, c)


def set_partitions(n):
    """Restricted growth strings: every partition of range(n) exactly once."""
    def rec(prefix, top):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for c in range(top + 2):
            yield from rec(prefix + [c], max(top, c))
    yield from rec([0], 0) if n else iter([()])


def test_set_partitions_are_bell_numbers():
    assert [sum(1 for _ in set_partitions(n)) for n in range(1, 8)] == [1, 2, 5, 15, 52, 203, 877]


BIG = [tuple(f) for f in itertools.combinations(range(5), 2)][:8]


@settings(max_examples=15, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=8, max_size=8),
       st.lists(st.integers(0, 3), min_size=8, max_size=8))
def test_product_universal_property(gc, dc):
    g, d = Coloring(tuple(BIG), tuple(gc)), Coloring(tuple(BIG), tuple(dc))
    p = product(g, d)
    assert refines(g, p) and refines(d, p)
    for cs in set_partitions(len(BIG)):
        e = Coloring(tuple(BIG), cs)
        if refines(g, e) and refines(d, e):
            assert refines(p, e)


def test_strong_refinement_trivial_cases(devlin_cols):
    _, _, (g1, g2, g3) = devlin_cols
    conns = all_copies(chain(2), chain(3))
    const = constant(g2.domain)
    assert strongly_refines(const, g3, conns)
    ident = Coloring.from_function(g3.domain, lambda f: f)
    assert strongly_refines(g2, ident, conns)


def test_devlin_pair_triple_strong_refinement(devlin_cols):
    _, _, (g1, g2, g3) = devlin_cols
    assert strongly_refines(g2, g3, all_copies(chain(2), chain(3)))
    assert strongly_refines(g1, g2, all_copies(chain(1), chain(2)))


def test_not_strongly_refining_is_reported(devlin_cols):
    _, _, (_, g2, _) = devlin_cols
    conns = all_copies(chain(1), chain(2))
    # a coloring of points by parity is not determined by the pair types
    parity = Coloring.from_function([(x,) for x in range(max(map(max, g2.domain)) + 1)],
                                    lambda f: f[0] % 2)
    assert not strongly_refines(parity, g2, conns)
    with pytest.raises(ColoringError, match="not a strong refinement"):
        coloring_diagram(parity, g2, conns)


def test_cells(devlin_cols):
    _, _, (g1, g2, g3) = devlin_cols
    cell = coloring_diagram(g1, g2, all_copies(chain(1), chain(2)))
    assert set(cell.table.values()) == {0}
    cell = coloring_diagram(g2, g3, all_copies(chain(2), chain(3)))
    assert len(cell.rows) == 16
    for fi in range(len(cell.connectors)):
        assert {cell.table[(j, fi)] for j in cell.rows} == set(g2.image)
    const = constant(g2.domain, "c")
    cell = coloring_diagram(const, g3, all_copies(chain(2), chain(3)))
    assert set(cell.table.values()) == {"c"}


def test_persistence():
    K = codings.emit_structure(codings.build_devlin(30), "base")
    g2, _ = expansion_coloring(codings.emit_structure(codings.build_devlin(30)), chain(2), ("<",))
    copies3 = all_copies(chain(3), K)
    conns = all_copies(chain(2), chain(3))
    assert persistence_check(constant(g2.domain), copies3, conns) == (True, None)
    # one fresh color on a single pair shows up in only a few triples
    lone = Coloring(g2.domain, tuple("x" if i == 0 else 0 for i in range(len(g2))))
    ok, witness = persistence_check(lone, copies3, conns)
    assert not ok and g2.domain[0] not in [compose(witness, f) for f in conns]


def test_devlin_pair_persistence_fails_on_monotone_copies():
    """Sweep n upward at fixed depth.  Copies whose leaf levels increase all
    the way along the chain see one pair type only, so no finite n works;
    every failing witness is such a copy."""
    c = codings.build_devlin(24)
    K = codings.emit_structure(c)
    g2, _ = expansion_coloring(K, chain(2), ("<",))
    base = K.reduct(("<",))
    lv = c.levels()
    level = [lv[x] for x in c.in_order()]
    for n in range(2, 6):
        conns = all_copies(chain(2), chain(n))
        ok, witness = persistence_check(g2, all_copies(chain(n), base), conns)
        assert not ok
        assert len({g2(compose(witness, f)) for f in conns}) == 1
        levels = [level[x] for x in witness]
        assert levels == sorted(levels) or levels == sorted(levels, reverse=True)


def test_refinement_search_trivial(devlin_cols):
    _, K, (_, g2, _) = devlin_cols
    base = K.reduct(("<",))
    copies = all_copies(chain(3), base)
    conns = all_copies(chain(2), chain(3))
    assert refinement_search(constant(g2.domain), g2, copies, conns) == copies[0]
    relabelled = Coloring(g2.domain, tuple(10 - c for c in g2.colors))
    assert refinement_search(relabelled, g2, copies, conns) == copies[0]


def test_refinement_search_sierpinski(devlin_cols):
    """Agreement of ≺ with creation order versus the pair expansion coloring."""
    depth, K, (_, g2, _) = devlin_cols
    c = codings.build_devlin(depth)
    created = {leaf: i for i, leaf in enumerate(c.leaves)}
    seq = c.in_order()
    sier = Coloring.from_function(g2.domain, lambda f: created[seq[f[0]]] < created[seq[f[1]]])
    base = K.reduct(("<",))
    copies = all_copies(chain(4), base)
    conns = all_copies(chain(2), chain(4))
    s = refinement_search(sier, g2, copies, conns)
    assert s is not None
    maps = [compose(s, f) for f in conns]
    assert refines(Coloring(tuple(conns), tuple(sier(h) for h in maps)),
                   Coloring(tuple(conns), tuple(g2(h) for h in maps)))


def test_induced_identity_gives_back_the_coloring(devlin_cols):
    _, K, (_, g2, _) = devlin_cols
    res = induced_coloring(g2, chain(2), (0, 1), K.reduct(("<",)))
    assert res.excluded == []
    assert equivalent(res.coloring, g2)


def test_induced_from_constant_is_constant(devlin_cols):
    _, K, (_, _, g3) = devlin_cols
    res = induced_coloring(constant(g3.domain), chain(2), (0, 2), K.reduct(("<",)))
    assert res.components == 1


def test_induced_pairs_from_triples(devlin_cols):
    _, K, (_, g2, g3) = devlin_cols
    res = induced_coloring(g3, chain(2), (0, 1), K.reduct(("<",)))
    assert res.components == 2
    assert equivalent(res.coloring, g2.restrict(res.coloring.domain))


def test_induced_coloring_is_finest(devlin_cols):
    """Splitting any component breaks the strong refinement below the triples."""
    _, K, (_, _, g3) = devlin_cols
    res = induced_coloring(g3, chain(2), (1, 2), K.reduct(("<",)))
    col = res.coloring
    kept = set(col.domain)
    copies = [s for s in g3.domain if compose(s, (1, 2)) in kept]
    sub3 = g3.restrict(copies)
    assert strongly_refines(col, sub3, [(1, 2)])
    for comp in col.image:
        members = [f for f in col.domain if col(f) == comp]
        if len(members) < 2:
            continue
        # move one member into its own class: some triple color now sees two classes
        split = Coloring(col.domain, tuple(("new" if f == members[0] else col(f))
                                           for f in col.domain))
        assert not strongly_refines(split, sub3, [(1, 2)])


def test_pulled_back_leaving_domain():
    g = constant([(0, 1)])
    with pytest.raises(ColoringError):
        pulled_back(g, (0, 1), [(1, 2)])


def test_json_round_trip():
    g = Coloring.from_function(DOMAIN, lambda f: f[1] - f[0])
    assert Coloring.from_json(g.to_json()) == g
