from __future__ import annotations

import itertools

import numpy as np
import pytest

from bigramsey import codings
from bigramsey.codings import (CodingError, build_qn, build_rado, build_s2, build_ultrametric,
                               emit_structure, meet, prec, relation_R)


def test_meet():
    assert meet("00", "01") == "0"
    assert meet("0110", "0110") == "0110"
    assert meet("0110", "010") == "01"


def test_prec():
    assert prec("00", "01")
    assert not prec("01", "00")
    with pytest.raises(CodingError):
        prec("0", "01")


def test_relation_R_examples():
    a, b = "00", "010"
    assert relation_R(a, a, b, b)          # |a| <= |b|
    assert relation_R(a, a, a, a)
    assert relation_R(a, b, b, b) == (len(meet(a, b)) <= len(b))
    # (a, b, a, b) is not ⪯-sorted, so it is outside the relation's domain
    with pytest.raises(CodingError):
        relation_R(a, b, a, b)
    # |a| <= |a ∧ b| fails for a non-prefix b branching below a
    assert len(meet(a, b)) < len(a)
    assert not relation_R(a, a, a, b)
    with pytest.raises(CodingError):
        relation_R(b, a, a, a)


def test_first_devlin_round():
    c = codings.build_devlin(1)
    assert c.nodes == ["0", "10"]


@pytest.mark.parametrize("kind", ["devlin", "rado", "qn", "s2"])
def test_invariants_every_round(kind):
    c = codings.new_coding(kind, seed=3, parts=3)
    for r in range(1, 31):
        c.step()
        assert codings.check_invariants(c) == []
        assert len(c.leaves) == r + 1


def test_growth_is_deterministic():
    a = codings.build_rado(25, seed=5)
    b = codings.build_rado(25, seed=5)
    assert a.nodes == b.nodes
    assert codings.build_rado(25, seed=6).nodes != a.nodes


def test_between_density():
    c = codings.build_devlin(12, seed=1)
    seq = c.in_order()
    old = set(seq)
    c = codings.grow(c, 3 * len(seq))
    later = c.in_order()
    pos = {x: i for i, x in enumerate(later)}
    for a, b in zip(seq, seq[1:]):
        between = later[pos[a] + 1:pos[b]]
        assert any(x not in old for x in between), (a, b)


def rado_edges(c):
    K = emit_structure(c, ("E",))
    seq = c.in_order()
    at = {x: i for i, x in enumerate(seq)}
    return K.arrays["E"], at


def test_rado_edge_rule_from_words():
    c = build_rado(30, seed=2)
    words = c.nodes
    E = emit_structure(c, ("E",)).arrays["E"]
    for i, j in itertools.permutations(range(len(words)), 2):
        if len(words[i]) < len(words[j]):
            assert E[i, j] == E[j, i] == (words[j][len(words[i])] == "1")


def test_rado_has_edges_and_non_edges():
    E = emit_structure(build_rado(6), ("E",)).arrays["E"]
    off = E[~np.eye(len(E), dtype=bool)]
    assert off.any() and not off.all()


def test_rado_extension_property():
    k = 5
    c = build_rado(k, seed=0)
    existing = list(c.leaves)
    # root rounds read the creation index of each old leaf through a linear
    # code, so every adjacency pattern shows up within this many rounds
    bound = 4 * 2 ** (1 + k.bit_length())
    c = codings.grow(c, bound)
    E, at = rado_edges(c)
    fresh = [y for y in c.leaves if y not in existing]
    for size in (1, 2, 3):
        for F in itertools.combinations(existing, size):
            for mask in itertools.product((0, 1), repeat=size):
                F1 = [x for x, bit in zip(F, mask) if bit]
                F0 = [x for x, bit in zip(F, mask) if not bit]
                assert any(all(E[at[y], at[x]] for x in F1) and
                           not any(E[at[y], at[x]] for x in F0) for y in fresh), (F1, F0)


def test_R_matches_words():
    c = codings.build_devlin(18, seed=4)
    words = c.nodes
    R = emit_structure(c).arrays["R"]
    n = len(words)
    for t in itertools.combinations_with_replacement(range(n), 4):
        assert R[t] == relation_R(*(words[i] for i in t))
    # tuples that are not ⪯-sorted never hold
    assert not R[1, 0, 2, 3] and not R[0, 2, 1, 3]


def test_R_is_intrinsic_to_sub_antichains():
    c = codings.build_devlin(20, seed=0)
    words = c.nodes
    sub = [words[i] for i in (1, 4, 6, 9, 13)]
    nodes = sorted(set(sub) | {meet(x, y) for x, y in itertools.combinations(sub, 2)}, key=len)
    rank = {len(x): i for i, x in enumerate(nodes)}

    def recoded(p, q, r, s):
        return rank[len(meet(p, q))] <= rank[len(meet(r, s))]

    for t in itertools.combinations_with_replacement(sub, 4):
        assert relation_R(*t) == recoded(*t)


def test_ultrametric_shapes():
    u = build_ultrametric(1, 2)
    assert u.tree_nodes[0] == () and len(u.tree_nodes) == 3
    u = build_ultrametric(2, 2)
    sizes = [sum(len(x) == d for x in u.tree_nodes) for d in range(3)]
    assert sizes == [1, 2, 4]
    pos = {x: i for i, x in enumerate(u.tree_nodes)}
    for x in u.tree_nodes:
        if x:
            assert pos[x[:-1]] < pos[x]


def test_ultrametric_order_has_finite_weight_classes():
    # each node appears after every node of smaller weight, independently of branching
    small = build_ultrametric(2, 3).tree_nodes
    big = build_ultrametric(2, 5).tree_nodes
    assert big[:len([x for x in small if len(x) + sum(x) <= 2])] == \
        [x for x in small if len(x) + sum(x) <= 2]


def test_qn_single_part_is_devlin_plus_unary():
    q = emit_structure(build_qn(1, 15, seed=2))
    d = emit_structure(codings.build_devlin(15, seed=2))
    assert q.reduct(("<", "R")) == d
    assert q.arrays["P0"].all()


def test_qn_labels_round_robin():
    c = build_qn(2, 6)
    assert {c.label(x) for x in c.leaves} == {0, 1}
    for k, leaf in enumerate(c.leaves):
        assert c.label(leaf) == k % 2


def test_s2_rules_and_tournament():
    c = build_s2(20)
    K = emit_structure(c)
    E, P0 = K.arrays["E"], K.arrays["P0"]
    n = K.size
    for x, y in itertools.combinations(range(n), 2):
        assert E[x, y] != E[y, x]
        if P0[x] == P0[y]:
            assert E[x, y]
        else:
            assert E[y, x]
    assert not E.diagonal().any()


def test_emitted_languages():
    assert emit_structure(codings.build_devlin(3)).language.names == ("<", "R")
    assert emit_structure(build_rado(3)).language.names == ("E", "<", "R")
    assert emit_structure(build_qn(2, 3)).language.names == ("<", "P0", "P1", "R")
    assert emit_structure(build_s2(3)).language.names == ("E", "<", "P0", "P1", "R")
    K = emit_structure(codings.build_devlin(6), "base")
    assert K.language.names == ("<",)
    assert K.tuples("<") == list(itertools.combinations(range(7), 2))


def test_json_and_dot():
    c = codings.build_s2(5)
    data = codings.to_json(c)
    assert data["nodes"] == c.nodes and data["labels"] == [c.label(x) for x in c.in_order()]
    dot = codings.to_dot(c)
    assert dot.startswith("digraph") and dot.count("->") == len(c.parent) - 1


def test_bad_kind():
    with pytest.raises(CodingError):
        codings.new_coding("cantor")
