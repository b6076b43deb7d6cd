from __future__ import annotations

import itertools
import json
import random

import pytest

from bigramsey import acceptance, codings, diagrams
from bigramsey.colorings import expansion_coloring
from bigramsey.diagrams import (Diagram, DiagramError, ap_check, diagram_from_colorings,
                                diagram_of_expansion, expansion_from_diagram, is_isomorphism,
                                isomorphic, jep_check, random_diagram, trivial_diagram, validate,
                                verify_ap, verify_jep)
from bigramsey.structures import chain

CHAINS = [chain(k) for k in (1, 2, 3)]


@pytest.fixture(scope="module")
def d_gamma(devlin_cols):
    _, _, cols = devlin_cols
    return diagram_from_colorings(cols, CHAINS)


def test_trivial_diagram_is_valid():
    assert validate(trivial_diagram(CHAINS)).ok


def test_injected_surjectivity_fault(d_gamma):
    cells = {k: dict(v) for k, v in d_gamma.cells.items()}
    # send every triple type to the same pair type along the first connector
    target = d_gamma.levels[1][0]
    for j in d_gamma.levels[2]:
        cells[(1, 2)][(j, 0)] = target
    broken = Diagram(d_gamma.levels, d_gamma.connectors, cells, d_gamma.structures)
    rep = validate(broken)
    assert len(rep.violations) == 1 and "misses" in rep.violations[0]


def test_injected_coherence_fault():
    # coherence squares need three levels above J_0, so use the four-level diagram
    D = acceptance.devlin_diagram_4()
    cells = {k: dict(v) for k, v in D.cells.items()}
    j = D.levels[3][0]
    p, q = D.levels[1]
    cells[(1, 3)][(j, 0)] = q if cells[(1, 3)][(j, 0)] == p else p
    rep = validate(Diagram(D.levels, D.connectors, cells, D.structures))
    assert rep.violations and all("coherence" in v for v in rep.violations)
    assert all(f"j={j!r}" in v for v in rep.violations)


def test_j0_must_be_a_singleton():
    D = trivial_diagram(CHAINS)
    D2 = D.relabel([{"q0": "a"}, {"q1": "q1"}, {"q2": "q2"}])
    D2.levels[0].append("b")
    assert any("J_0" in v for v in validate(D2).violations)


def test_d_gamma_validates(d_gamma):
    assert validate(d_gamma).ok
    assert [len(J) for J in d_gamma.levels] == [1, 2, 16]


def test_identity_and_relabel(d_gamma):
    sigma = isomorphic(d_gamma, d_gamma)
    assert sigma is not None and is_isomorphism(d_gamma, d_gamma, sigma)
    rng = random.Random(1)
    perm = list(d_gamma.levels[2])
    rng.shuffle(perm)
    push = [{j: j for j in d_gamma.levels[0]}, {j: j for j in d_gamma.levels[1]},
            dict(zip(d_gamma.levels[2], perm))]
    other = d_gamma.relabel(push)
    found = isomorphic(d_gamma, other)
    assert found is not None and is_isomorphism(d_gamma, other, found)
    # the triple types are separated by their restrictions, so the permutation is forced
    assert found[2] == push[2]


def invert(sigma):
    return [{v: k for k, v in s.items()} for s in sigma]


def compose_iso(outer, inner):
    return [{k: o[v] for k, v in i.items()} for o, i in zip(outer, inner)]


def test_isomorphism_is_an_equivalence():
    rng = random.Random(3)
    for _ in range(10):
        D = random_diagram(rng, r=3)
        perms = []
        for _ in range(2):
            perms.append([dict(zip(J, rng.sample(J, len(J)))) for J in D.levels])
        D1 = D.relabel(perms[0])
        D2 = D1.relabel(perms[1])
        s01 = isomorphic(D, D1)
        s12 = isomorphic(D1, D2)
        assert is_isomorphism(D1, D, invert(s01))
        assert is_isomorphism(D, D2, compose_iso(s12, s01))


def test_non_isomorphic_diagrams():
    rng = random.Random(5)
    D = random_diagram(rng, r=2)
    while len(D.levels[1]) < 2:
        D = random_diagram(rng, r=2)
    assert isomorphic(D, trivial_diagram(D.structures)) is None


def test_independent_seeds_give_isomorphic_d_gamma(d_gamma):
    depth = acceptance.devlin_row(3, seed=2).depth
    K = codings.emit_structure(codings.build_devlin(depth, seed=2))
    cols = [expansion_coloring(K, A, ("<",))[0] for A in CHAINS]
    other = diagram_from_colorings(cols, CHAINS)
    assert isomorphic(d_gamma, other) is not None


def test_expansion_of_trivial_diagram():
    E = expansion_from_diagram(trivial_diagram(CHAINS))
    assert [len(level) for level in E] == [1, 1, 1]
    A3 = E[2][0]
    assert A3.tuples("S1_0") == list(itertools.combinations(range(3), 2))
    assert A3.tuples("S0_0") == [(0,), (1,), (2,)]
    assert A3.tuples("S2_0") == [(0, 1, 2)]


def test_expansion_of_two_level_devlin_diagram(d_gamma):
    D = Diagram(d_gamma.levels[:2], {k: v for k, v in d_gamma.connectors.items() if k[1] < 2},
                {k: v for k, v in d_gamma.cells.items() if k[1] < 2}, CHAINS[:2])
    E = expansion_from_diagram(D)
    assert len(E[1]) == 2
    a, b = E[1]
    assert a.reduct(("<",)) == b.reduct(("<",)) == chain(2)
    assert a.tuples("S1_0") != b.tuples("S1_0")


def test_round_trip_random_corpus():
    rng = random.Random(11)
    for _ in range(20):
        D = random_diagram(rng, r=rng.choice((2, 3)))
        assert validate(D).ok
        assert all(len(J) <= 4 for J in D.levels)
        back = diagram_of_expansion(expansion_from_diagram(D), D.structures)
        assert isomorphic(D, back) is not None


def test_single_expansions_give_trivial_diagram():
    D = diagram_of_expansion([[A] for A in CHAINS], CHAINS)
    assert isomorphic(D, trivial_diagram(CHAINS)) is not None


def test_coding_expansions_match_d_gamma(devlin_cols, d_gamma):
    _, K, _ = devlin_cols
    ex = [expansion_coloring(K, A, ("<",))[1] for A in CHAINS]
    assert isomorphic(diagram_of_expansion(ex, CHAINS), d_gamma) is not None


def test_json_round_trip(d_gamma):
    data = json.loads(json.dumps(d_gamma.to_json()))
    back = Diagram.from_json(data)
    assert validate(back).ok
    assert isomorphic(d_gamma.relabel([{j: str(j) for j in J} for J in d_gamma.levels]),
                      back) is not None


def test_jep_trivial_cases(d_gamma):
    p = d_gamma.levels[1][0]
    assert jep_check(d_gamma, 1, p, p, 2) == (1, p, (0, 1))
    T = trivial_diagram(CHAINS)
    assert jep_check(T, 1, "q1", "q1", 2)[0] == 1


def test_jep_pair_types_meet_in_a_triple(d_gamma):
    p, q = d_gamma.levels[1]
    w = jep_check(d_gamma, 1, p, q, 2)
    assert w is not None and w[0] == 2 and verify_jep(d_gamma, 1, p, q, w)
    assert jep_check(d_gamma, 1, p, q, 1) is None


def test_ap_trivial_cases(d_gamma):
    p = d_gamma.levels[2][5]
    w = ap_check(d_gamma, 1, 2, p, p, (0, 1), (0, 1), 2)
    assert w == (2, p, (0, 1, 2), (0, 1, 2))
    T = trivial_diagram(CHAINS)
    w = ap_check(T, 0, 1, "q1", "q1", (1,), (1,), 2)
    assert w == (1, "q1", (0, 1), (0, 1))
    # different points of the 2-chain amalgamate over a common point only
    # once there is room for both copies side by side
    w = ap_check(T, 0, 1, "q1", "q1", (0,), (1,), 2)
    assert w is not None and w[0] == 2 and verify_ap(T, 0, 1, "q1", "q1", (0,), (1,), w)


def test_ap_precondition(d_gamma):
    p, q = d_gamma.levels[1]
    with pytest.raises(DiagramError):
        ap_check(d_gamma, 1, 1, p, q, (0, 1), (0, 1), 1)


def test_ap_triples_over_a_pair():
    D = acceptance.devlin_diagram_4()
    inst = next((p, q, fp, fq) for p, q, fp, fq in acceptance.ap_instances(D, 1, 2) if p != q)
    w = ap_check(D, 1, 2, *inst, 3)
    assert w is not None and w[0] == 3 and verify_ap(D, 1, 2, *inst, w)
