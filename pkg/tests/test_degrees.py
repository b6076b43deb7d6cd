from __future__ import annotations

import functools
import itertools
import math

import numpy as np
import pytest

from bigramsey import codings, degrees
from bigramsey.codings import emit_structure, prec, relation_R
from bigramsey.degrees import (DEFAULT_WINDOW, InvariantViolation, RebuildSource,
                               enumerate_expansions, expansion_classes, stabilized_degree)
from bigramsey.diagonal import devlin_oracle, oracle_expansions
from bigramsey.structures import chain, empty_structure, graph

SCHEDULE = degrees.DEFAULT_SCHEDULES["devlin"]


def tangent_numbers(count):
    """Odd-index tangent numbers from the derivative polynomials of tan."""
    # d/dx tan^k = k tan^(k-1) (1 + tan^2); track the polynomial in tan
    out = []
    poly = {1: 1}
    for n in range(1, 2 * count):
        nxt: dict[int, int] = {}
        for k, c in poly.items():
            if k:
                nxt[k - 1] = nxt.get(k - 1, 0) + k * c
                nxt[k + 1] = nxt.get(k + 1, 0) + k * c
        poly = nxt
        if n % 2 == 1:
            out.append(poly.get(0, 0))
    return out


def test_tangent_numbers_helper():
    assert tangent_numbers(5) == [1, 2, 16, 272, 7936]


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_devlin_oracle_is_tangent_number(k):
    assert devlin_oracle(k) == tangent_numbers(5)[k - 1]


def test_devlin_oracle_range():
    with pytest.raises(ValueError):
        devlin_oracle(6)


def diagonal_antichain_types(k, height):
    """Distinct (<, R) structures of strongly diagonal k-antichains of short words."""
    words = ["".join(w) for n in range(1, height + 1) for w in itertools.product("01", repeat=n)]
    key = functools.cmp_to_key(lambda x, y: -1 if prec(x, y) else 1)
    found = set()
    for S in itertools.combinations(words, k):
        if not codings.is_antichain(S) or not codings.strongly_diagonal(S):
            continue
        S = sorted(S, key=key)
        found.add(frozenset(t for t in itertools.combinations_with_replacement(range(k), 4)
                            if relation_R(*(S[i] for i in t))))
    return len(found)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_oracle_against_short_word_brute_force(k):
    # a strongly diagonal k-antichain needs 2k - 1 distinct levels
    assert diagonal_antichain_types(k, 2 * k - 1) == devlin_oracle(k)


def test_one_point_expansion():
    K = emit_structure(codings.build_devlin(10))
    assert len(enumerate_expansions(K, chain(1), ("<",))) == 1


def test_pair_expansions_differ_in_leaf_levels():
    K = emit_structure(codings.build_devlin(3))
    ex = enumerate_expansions(K, chain(2), ("<",)).expansions
    assert len(ex) == 2
    diff = ex[0].arrays["R"] ^ ex[1].arrays["R"]
    assert [tuple(int(v) for v in t) for t in np.argwhere(diff)] == [(0, 0, 1, 1)]


def test_expansions_reduct_to_base(devlin40):
    _, K = devlin40
    for A in (chain(2), chain(3)):
        es = enumerate_expansions(K, A, ("<",))
        assert all(E.reduct(("<",)) == A for E in es.expansions)
        assert len(set(es.expansions)) == len(es.expansions)


def test_non_embeddable_gives_empty(caplog):
    K = emit_structure(codings.build_devlin(1))
    assert len(enumerate_expansions(K, chain(3), ("<",))) == 0
    assert "does not embed" in caplog.text


def test_stabilized_small_devlin():
    row = stabilized_degree(chain(2), "devlin", SCHEDULE, 2)
    assert row.stabilized and row.degree == 2
    row = stabilized_degree(chain(3), "devlin", SCHEDULE, DEFAULT_WINDOW)
    assert row.stabilized and row.degree == 16
    assert "stable" in row.note


def test_rado_vertex():
    row = stabilized_degree(graph(1, []), "rado", SCHEDULE, DEFAULT_WINDOW)
    assert row.stabilized and row.degree == 1


def test_incremental_count_equals_full_recount():
    row = stabilized_degree(chain(3), "devlin", [8, 16, 24, 32], 99, seed=7)
    for depth, count in row.checkpoints:
        K = emit_structure(codings.build_devlin(depth, seed=7))
        _, _, ex = expansion_classes(K, chain(3), ("<",))
        assert len(ex) == count


def test_depth_monotone_and_chain_monotone():
    rows = [stabilized_degree(chain(k), "devlin", SCHEDULE, DEFAULT_WINDOW) for k in (1, 2, 3)]
    degs = [r.degree for r in rows]
    assert degs == sorted(degs)
    for r in rows:
        counts = [c for _, c in r.checkpoints]
        assert counts == sorted(counts)


def test_count_drop_is_an_invariant_violation():
    sizes = {1: 3, 2: 1}
    src = RebuildSource(lambda d: codings.build_sinf(sizes[d]))
    with pytest.raises(InvariantViolation):
        stabilized_degree(empty_structure(2), "sinf", [1, 2], 5, source=src)


def test_budget_leaves_row_unstabilized():
    row = stabilized_degree(chain(3), "devlin", SCHEDULE, DEFAULT_WINDOW, budget_seconds=0.0)
    assert not row.stabilized and row.note == "unstabilized"


def test_schedule_must_increase():
    with pytest.raises(ValueError):
        stabilized_degree(chain(2), "devlin", [16, 8], 2)


def test_rado_expansions_rederive_edges():
    c = codings.build_rado(40, seed=0)
    K = emit_structure(c)
    words = c.nodes
    for A in (graph(2, [(0, 1)]), graph(2, [])):
        rows, labels, ex = expansion_classes(K, A, ("E",))
        assert len(ex) == len(oracle_expansions(A, "rado"))
        for cls, E in enumerate(ex):
            row = rows[int(np.flatnonzero(labels == cls)[0])]
            a, b = (words[int(x)] for x in row)
            lo, hi = sorted((a, b), key=len)
            assert E.holds("E", 0, 1) == (hi[len(lo)] == "1")


def test_rado_edge_count_is_literal():
    # expansions of the edge are counted on its fixed universe; the edge has
    # two automorphisms, and both orderings of each meet shape occur
    row = stabilized_degree(graph(2, [(0, 1)]), "rado", SCHEDULE, DEFAULT_WINDOW)
    assert row.degree == len(oracle_expansions(graph(2, [(0, 1)]), "rado")) == 4


@pytest.mark.parametrize("family,kmax", [("rado", 2), ("qn", 2), ("s2", 2),
                                         ("ultrametric", 2), ("sinf", 4)])
def test_catalog_matches_oracle(family, kmax):
    table = degrees.degree_table(family, kmax)
    for r in table.rows:
        assert r.stabilized, r
        assert r.degree == r.oracle, r


def test_sinf_is_factorial():
    table = degrees.degree_table("sinf", 4)
    assert [r.degree for r in table.rows] == [math.factorial(n) for n in range(1, 5)]


def test_csv_layout():
    csv = degrees.degree_table("devlin", 2).to_csv().splitlines()
    assert csv[0] == "family,descriptor,degree,depth,stabilized,oracle"
    assert csv[1].startswith("devlin,1,1,") and csv[1].endswith(",true,1")
    assert csv[2].split(",")[2] == "2"
