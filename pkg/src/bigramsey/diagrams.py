"""r-diagrams: validation, isomorphism, expansions, and JEP/AP witness search.

A diagram has label sets ``J_0, ..., J_{r-1}``, connector lists ``H[m, n]`` of
maps ``A_m -> A_n`` (image tuples, m <= n) and cells
``D(m, n)(j, f) in J_m`` for ``j in J_n`` and ``f in H[m, n]``.  Witness
searches return ``None`` when nothing is found up to the given depth; that is
"unknown at this depth", never a refutation.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Hashable, Iterator, Sequence

from .colorings import Coloring, coloring_diagram
from .structures import (Language, RelationalStructure, chain, check_chain, compose,
                         embedding_images, induced_substructure)

Map = tuple[int, ...]
Label = Hashable


class DiagramError(ValueError):
    pass


@dataclass
class Diagram:
    levels: list[list[Label]]
    connectors: dict[tuple[int, int], list[Map]]
    cells: dict[tuple[int, int], dict[tuple[Label, int], Label]]
    structures: list[RelationalStructure] | None = field(default=None, repr=False)

    def __post_init__(self):
        self.levels = [list(J) for J in self.levels]
        self.connectors = {k: [tuple(int(x) for x in f) for f in v]
                           for k, v in self.connectors.items()}
        self._index = {k: {f: i for i, f in enumerate(v)} for k, v in self.connectors.items()}

    @property
    def r(self) -> int:
        return len(self.levels)

    def conn(self, m: int, n: int) -> list[Map]:
        return self.connectors.get((m, n), [])

    def index(self, m: int, n: int, f: Sequence[int]) -> int | None:
        return self._index.get((m, n), {}).get(tuple(f))

    def D(self, m: int, n: int, j: Label, f: Sequence[int] | int) -> Label:
        fi = f if isinstance(f, int) else self.index(m, n, f)
        if fi is None:
            raise DiagramError(f"{tuple(f)} is not a connector {m}->{n}")
        return self.cells[(m, n)][(j, fi)]

    def inclusion(self, m: int, n: int) -> Map:
        f = tuple(range(len(self.conn(m, m)[0]))) if self.conn(m, m) else ()
        if self.index(m, n, f) is None:
            raise DiagramError(f"inclusion {m}->{n} is not a connector")
        return f

    def relabel(self, sigma: Sequence[dict]) -> Diagram:
        """Push per-level bijections through every cell."""
        cells = {}
        for (m, n), table in self.cells.items():
            cells[(m, n)] = {(sigma[n][j], fi): sigma[m][v] for (j, fi), v in table.items()}
        levels = [[sigma[n][j] for j in J] for n, J in enumerate(self.levels)]
        return Diagram(levels, dict(self.connectors), cells, self.structures)

    # -- JSON
    def to_json(self) -> dict:
        def key(m, n):
            return f"{m},{n}"

        cells = {}
        for (m, n), table in sorted(self.cells.items()):
            cells[key(m, n)] = {f"{j}|f{fi}": v for (j, fi), v in
                                sorted(table.items(), key=lambda kv: (str(kv[0][0]), kv[0][1]))}
        out = {"levels": self.levels,
               "connectors": {key(m, n): [list(f) for f in v]
                              for (m, n), v in sorted(self.connectors.items())},
               "cells": cells}
        if self.structures is not None:
            out["structures"] = [s.to_json() for s in self.structures]
        return out

    @classmethod
    def from_json(cls, data: dict) -> Diagram:
        def pair(k):
            m, n = k.split(",")
            return int(m), int(n)

        cells = {}
        for k, table in data["cells"].items():
            t = {}
            for jf, v in table.items():
                j, fi = jf.rsplit("|f", 1)
                t[(j, int(fi))] = v
            cells[pair(k)] = t
        levels = [[str(x) for x in J] for J in data["levels"]]
        structures = None
        if "structures" in data:
            structures = [RelationalStructure.from_json(s) for s in data["structures"]]
        conns = {pair(k): [tuple(f) for f in v] for k, v in data["connectors"].items()}
        for (m, n), t in cells.items():
            cells[(m, n)] = {(j, fi): str(v) for (j, fi), v in t.items()}
        return cls(levels, conns, cells, structures)


# --- validation --------------------------------------------------------------------

@dataclass
class ValidationReport:
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate(D: Diagram) -> ValidationReport:
    bad: list[str] = []
    if D.r == 0 or len(D.levels[0]) != 1:
        bad.append("J_0 must have exactly one label")
    for m, n in itertools.combinations_with_replacement(range(D.r), 2):
        table = D.cells.get((m, n), {})
        Jm = set(D.levels[m])
        for fi, f in enumerate(D.conn(m, n)):
            for j in D.levels[n]:
                v = table.get((j, fi))
                if v is None:
                    bad.append(f"cell ({m},{n}) missing at label {j!r}, connector {f}")
                elif v not in Jm:
                    bad.append(f"cell ({m},{n}) at {j!r}, {f} gives unknown label {v!r}")
            hit = {table.get((j, fi)) for j in D.levels[n]}
            missing = Jm - hit
            if missing:
                bad.append(f"D({m},{n})(-, {f}) misses {sorted(map(str, missing))}")
    if bad:
        return ValidationReport(bad)
    for m, n, N in itertools.combinations_with_replacement(range(D.r), 3):
        for f in D.conn(m, n):
            for s in D.conn(n, N):
                sf = compose(s, f)
                if D.index(m, N, sf) is None:
                    bad.append(f"{s} ∘ {f} = {sf} is not a connector {m}->{N}")
                    continue
                for j in D.levels[N]:
                    lhs = D.D(m, N, j, sf)
                    rhs = D.D(m, n, D.D(n, N, j, s), f)
                    if lhs != rhs:
                        bad.append(f"coherence fails at m={m}, n={n}, N={N}, j={j!r}, "
                                   f"s={s}, f={f}: {lhs!r} != {rhs!r}")
    return ValidationReport(bad)


# --- isomorphism ---------------------------------------------------------------------

def _same_connectors(D1: Diagram, D2: Diagram):
    if D1.r != D2.r:
        raise DiagramError("diagrams have different numbers of levels")
    for m, n in itertools.combinations_with_replacement(range(D1.r), 2):
        if D1.conn(m, n) != D2.conn(m, n):
            raise DiagramError(f"connector lists {m}->{n} differ")


def _level_bijections(D1: Diagram, D2: Diagram, n: int, sigma: list[dict]) -> Iterator[dict]:
    """Bijections J_n -> I_n commuting with all cells into lower levels."""
    J, I = D1.levels[n], D2.levels[n]
    if len(J) != len(I):
        return
    lower = [(m, fi) for m in range(n) for fi in range(len(D1.conn(m, n)))]

    def profile1(j):
        return tuple(sigma[m][D1.cells[(m, n)][(j, fi)]] for m, fi in lower)

    def profile2(i):
        return tuple(D2.cells[(m, n)][(i, fi)] for m, fi in lower)

    groups: dict = {}
    for i in I:
        groups.setdefault(profile2(i), []).append(i)
    options = []
    for j in J:
        cands = groups.get(profile1(j))
        if not cands:
            return
        options.append(cands)
    selfmaps = range(len(D1.conn(n, n)))
    image: dict = {}
    used: set = set()

    def ok(j):
        for fi in selfmaps:
            a = D1.cells[(n, n)][(j, fi)]
            if a in image and D2.cells[(n, n)][(image[j], fi)] != image[a]:
                return False
            # the reverse direction is checked when a itself gets assigned
        for b in image:
            for fi in selfmaps:
                if D1.cells[(n, n)][(b, fi)] == j and \
                        D2.cells[(n, n)][(image[b], fi)] != image[j]:
                    return False
        return True

    def rec(k):
        if k == len(J):
            yield dict(image)
            return
        j = J[k]
        for i in options[k]:
            if i in used:
                continue
            image[j] = i
            used.add(i)
            if ok(j):
                yield from rec(k + 1)
            used.discard(i)
            del image[j]

    yield from rec(0)


def isomorphic(D1: Diagram, D2: Diagram) -> list[dict] | None:
    """Per-level bijections σ_n with σ_m(D1(j, f)) = D2(σ_n(j), f), or None."""
    _same_connectors(D1, D2)

    def rec(n, sigma):
        if n == D1.r:
            return list(sigma)
        for s in _level_bijections(D1, D2, n, sigma):
            found = rec(n + 1, sigma + [s])
            if found is not None:
                return found
        return None

    return rec(0, [])


def is_isomorphism(D1: Diagram, D2: Diagram, sigma: Sequence[dict]) -> bool:
    for (m, n), table in D1.cells.items():
        for (j, fi), v in table.items():
            if D2.cells[(m, n)][(sigma[n][j], fi)] != sigma[m][v]:
                return False
    return True


# --- expansions ----------------------------------------------------------------------

def symbol_name(m: int, pi: int) -> str:
    return f"S{m}_{pi}"


def expansion_language(D: Diagram) -> Language:
    base = D.structures[0].language
    sizes = [A.size for A in D.structures]
    extra = tuple((symbol_name(m, pi), sizes[m]) for m in range(D.r)
                  for pi in range(len(D.levels[m])))
    return Language(base.symbols + extra)


def expansion_from_diagram(D: Diagram,
                           exhaustion: Sequence[RelationalStructure] | None = None
                           ) -> list[list[RelationalStructure]]:
    """The structures A_n^q: S_m^p holds of a tuple exactly when, read as a
    map A_m -> A_n, it is a connector sent to p by D(m, n)(q, -)."""
    exhaustion = list(exhaustion if exhaustion is not None else D.structures or [])
    if len(exhaustion) != D.r:
        raise DiagramError("need one exhaustion structure per level")
    report = validate(D)
    if not report.ok:
        raise DiagramError("invalid diagram: " + report.violations[0])
    D = Diagram(D.levels, D.connectors, D.cells, exhaustion)
    lang = expansion_language(D)
    out = []
    for n, A in enumerate(exhaustion):
        level = []
        for q in D.levels[n]:
            rel = {name: A.tuples(name) for name in A.language.names}
            for m in range(D.r):
                for pi, p in enumerate(D.levels[m]):
                    rel[symbol_name(m, pi)] = [f for fi, f in enumerate(D.conn(m, n))
                                               if D.cells[(m, n)][(q, fi)] == p] if m <= n else []
            level.append(RelationalStructure.from_tuples(lang, A.size, rel))
        out.append(level)
    return out


def diagram_of_expansion(expansions: Sequence[Sequence[RelationalStructure]],
                         exhaustion: Sequence[RelationalStructure],
                         labels: Sequence[Sequence[Label]] | None = None) -> Diagram:
    """Cells by literal restriction: D(m, n)(A', f) = A'·f."""
    check_chain(exhaustion)
    r = len(exhaustion)
    if len(expansions) != r:
        raise DiagramError("need one expansion list per level")
    labels = [list(L) for L in labels] if labels else \
        [[str(i) for i in range(len(E))] for E in expansions]
    connectors = {(m, n): [tuple(int(x) for x in row)
                           for row in embedding_images(exhaustion[m], exhaustion[n])]
                  for m, n in itertools.combinations_with_replacement(range(r), 2)}
    lookup = [{E: lab for E, lab in zip(expansions[m], labels[m])} for m in range(r)]
    cells = {}
    for (m, n), conns in connectors.items():
        table = {}
        for q, E in zip(labels[n], expansions[n]):
            for fi, f in enumerate(conns):
                restricted = induced_substructure(E, f)
                if restricted not in lookup[m]:
                    raise DiagramError(f"restriction of expansion {q!r} along {f} is not "
                                       f"among the level-{m} expansions")
                table[(q, fi)] = lookup[m][restricted]
        cells[(m, n)] = table
    return Diagram(labels, connectors, cells, list(exhaustion))


def diagram_from_colorings(colorings: Sequence[Coloring],
                           exhaustion: Sequence[RelationalStructure]) -> Diagram:
    """D_γ: level n carries the colors of γ_n, cells from ``coloring_diagram``."""
    r = len(colorings)
    levels = [list(g.image) for g in colorings]
    connectors = {}
    cells = {}
    for m, n in itertools.combinations_with_replacement(range(r), 2):
        conns = [tuple(int(x) for x in row) for row in embedding_images(exhaustion[m], exhaustion[n])]
        cell = coloring_diagram(colorings[m], colorings[n], conns)
        connectors[(m, n)] = conns
        cells[(m, n)] = dict(cell.table)
    return Diagram(levels, connectors, cells, list(exhaustion))


# --- JEP / AP ------------------------------------------------------------------------

def jep_check(D: Diagram, m: int, p: Label, q: Label, n_max: int):
    """First (n, q', f) with D(m,n)(q', i_m) = p and D(m,n)(q', f) = q."""
    for n in range(m, min(n_max, D.r - 1) + 1):
        inc = D.inclusion(m, n)
        for q2 in D.levels[n]:
            if D.D(m, n, q2, inc) != p:
                continue
            for f in D.conn(m, n):
                if D.D(m, n, q2, f) == q:
                    return n, q2, f
    return None


def verify_jep(D: Diagram, m: int, p: Label, q: Label, witness) -> bool:
    n, q2, f = witness
    return D.D(m, n, q2, D.inclusion(m, n)) == p and D.D(m, n, q2, f) == q


def ap_check(D: Diagram, m: int, n: int, p: Label, q: Label, f_p: Sequence[int],
             f_q: Sequence[int], N_max: int):
    """First (N, q', s_p, s_q) with D(n,N)(q', s_p) = p, D(n,N)(q', s_q) = q and
    s_p ∘ f_p = s_q ∘ f_q."""
    f_p, f_q = tuple(f_p), tuple(f_q)
    if D.D(m, n, p, f_p) != D.D(m, n, q, f_q):
        raise DiagramError("p and q do not restrict to a common label along f_p, f_q")
    for N in range(n, min(N_max, D.r - 1) + 1):
        conns = D.conn(n, N)
        for q2 in D.levels[N]:
            to_p = [s for s in conns if D.D(n, N, q2, s) == p]
            to_q = [s for s in conns if D.D(n, N, q2, s) == q]
            for s_p in to_p:
                target = compose(s_p, f_p)
                for s_q in to_q:
                    if compose(s_q, f_q) == target:
                        return N, q2, s_p, s_q
    return None


def verify_ap(D: Diagram, m: int, n: int, p: Label, q: Label, f_p, f_q, witness) -> bool:
    N, q2, s_p, s_q = witness
    return (D.D(n, N, q2, s_p) == p and D.D(n, N, q2, s_q) == q
            and compose(s_p, tuple(f_p)) == compose(s_q, tuple(f_q)))


# --- random diagrams over chains ----------------------------------------------------

def _derived(D_levels, cells, conns, n, v):
    """Values D(m, n)(q, f) implied by a choice ``v`` of D(n-1, n)(q, g)."""
    vals: dict[tuple[int, Map], set] = {}
    for gi, g in enumerate(conns[(n - 1, n)]):
        if gi not in v:
            continue
        for m in range(n):
            for hi, h in enumerate(conns[(m, n - 1)]):
                f = compose(g, h)
                vals.setdefault((m, f), set()).add(cells[(m, n - 1)][(v[gi], hi)])
    return vals


def _profiles(levels, cells, conns, n, rng, forced):
    gs = conns[(n - 1, n)]
    order = list(range(len(gs)))
    v: dict[int, Label] = dict(forced)

    def consistent():
        return all(len(s) == 1 for s in _derived(levels, cells, conns, n, v).values())

    def rec(k):
        if k == len(order):
            return True
        gi = order[k]
        if gi in v:
            return rec(k + 1)
        cands = list(levels[n - 1])
        rng.shuffle(cands)
        for p in cands:
            v[gi] = p
            if consistent() and rec(k + 1):
                return True
            del v[gi]
        return False

    if not consistent() or not rec(0):
        return None
    return dict(v)


def random_diagram(rng: random.Random, r: int | None = None, max_labels: int = 4,
                   max_size: int = 4, tries: int = 200) -> Diagram:
    """A random valid diagram over an exhaustion by chains."""
    for _ in range(tries):
        rr = r or rng.randint(1, 3)
        sizes = [1] + sorted(rng.sample(range(2, max_size + 1), rr - 1))
        D = _try_random(rng, sizes, max_labels)
        if D is not None and validate(D).ok:
            return D
    raise DiagramError("could not generate a diagram")


def _try_random(rng, sizes, max_labels):
    ex = [chain(c) for c in sizes]
    r = len(sizes)
    conns = {(m, n): [tuple(int(x) for x in row) for row in embedding_images(ex[m], ex[n])]
             for m, n in itertools.combinations_with_replacement(range(r), 2)}
    levels: list[list[Label]] = [["q0"]]
    cells: dict = {(0, 0): {("q0", 0): "q0"}}
    for n in range(1, r):
        profiles = []
        gs = conns[(n - 1, n)]
        for gi in range(len(gs)):
            for p in levels[n - 1]:
                if any(v[gi] == p for v in profiles):
                    continue
                v = _profiles(levels, cells, conns, n, rng, {gi: p})
                if v is None:
                    return None
                profiles.append(v)
        if len(profiles) > max_labels:
            return None
        extra = rng.randint(0, max_labels - len(profiles))
        for _ in range(extra):
            v = _profiles(levels, cells, conns, n, rng, {})
            if v is not None:
                profiles.append(v)
        names = [f"q{n}.{i}" for i in range(len(profiles))]
        levels.append(names)
        for m in range(n):
            table = {}
            for name, v in zip(names, profiles):
                vals = _derived(levels, cells, conns, n, v)
                for fi, f in enumerate(conns[(m, n)]):
                    table[(name, fi)] = next(iter(vals[(m, f)]))
            cells[(m, n)] = table
        self_conns = conns[(n, n)]
        cells[(n, n)] = {(name, fi): name for name in names for fi in range(len(self_conns))}
    return Diagram(levels, conns, cells, ex)


def trivial_diagram(exhaustion: Sequence[RelationalStructure]) -> Diagram:
    r = len(exhaustion)
    conns = {(m, n): [tuple(int(x) for x in row)
                      for row in embedding_images(exhaustion[m], exhaustion[n])]
             for m, n in itertools.combinations_with_replacement(range(r), 2)}
    levels = [[f"q{n}"] for n in range(r)]
    cells = {(m, n): {(f"q{n}", fi): f"q{m}" for fi in range(len(v))}
             for (m, n), v in conns.items()}
    return Diagram(levels, conns, cells, list(exhaustion))
