"""Abstract enumeration of strongly diagonal types, independent of any coding.

A type on ``k`` leaves is a binary tree shape whose leaves are listed left to
right, together with a linear order of its ``2k - 1`` nodes (the levels) in
which every node lies above its parent.  Optional decorations add passing bits
(for graphs) or part labels.  Each type is turned into a structure on
``range(k)``, leaves in left-to-right order, straight from the level data.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .structures import Language, RelationalStructure, induced_substructure


@dataclass(frozen=True)
class Shape:
    """Binary tree on leaves ``0..k-1``; internal nodes are ``k, k+1, ...``."""

    k: int
    parent: tuple[int | None, ...]
    children: tuple[tuple[int, int], ...]  # indexed by internal node - k

    def lca(self, a: int, b: int) -> int:
        up = set()
        x = a
        while x is not None:
            up.add(x)
            x = self.parent[x]
        x = b
        while x not in up:
            x = self.parent[x]
        return x


@lru_cache(maxsize=None)
def shapes(k: int) -> tuple[Shape, ...]:
    if k < 1:
        raise ValueError("k must be >= 1")

    def split(lo, hi):
        # nested tuples: leaf index, or (left, right)
        if hi - lo == 1:
            return [lo]
        out = []
        for s in range(lo + 1, hi):
            for left in split(lo, s):
                for right in split(s, hi):
                    out.append((left, right))
        return out

    result = []
    for tree in split(0, k):
        parent: dict[int, int | None] = {}
        children: list[tuple[int, int]] = []

        def walk(t):
            if isinstance(t, int):
                return t
            node = k + len(children)
            children.append((-1, -1))
            a, b = walk(t[0]), walk(t[1])
            children[node - k] = (a, b)
            parent[a] = parent[b] = node
            return node

        root = walk(tree)
        parent[root] = None
        result.append(Shape(k, tuple(parent[i] for i in range(2 * k - 1)), tuple(children)))
    return tuple(result)


def level_orders(shape: Shape) -> Iterator[tuple[int, ...]]:
    """All node levels (node -> level) with every node above its parent."""
    n = 2 * shape.k - 1
    kids = {shape.k + i: c for i, c in enumerate(shape.children)}
    root = next(x for x in range(n) if shape.parent[x] is None)
    levels = [0] * n

    def rec(frontier, depth):
        if depth == n:
            yield tuple(levels)
            return
        for x in sorted(frontier):
            levels[x] = depth
            nxt = (frontier - {x}) | set(kids.get(x, ()))
            yield from rec(frozenset(nxt), depth + 1)

    yield from rec(frozenset([root]), 0)


@dataclass(frozen=True)
class DiagonalType:
    shape: Shape
    levels: tuple[int, ...]
    bits: tuple[tuple[tuple[int, int], int], ...] = ()  # ((leaf, edge node), bit)
    labels: tuple[int, ...] = ()

    def meet_level(self, a: int, b: int) -> int:
        return self.levels[a] if a == b else self.levels[self.shape.lca(a, b)]

    def crossing_edge(self, leaf: int, level: int) -> int:
        """Lower end of the edge on the path to ``leaf`` that passes ``level``."""
        x = leaf
        while self.shape.parent[x] is not None and self.levels[self.shape.parent[x]] > level:
            x = self.shape.parent[x]
        return x


def passing_slots(shape: Shape, levels: tuple[int, ...]) -> list[tuple[int, int]]:
    """(leaf x, edge e) pairs where edge e passes the level of leaf x."""
    slots = []
    for x in range(shape.k):
        for e, p in enumerate(shape.parent):
            if p is not None and levels[p] < levels[x] < levels[e]:
                slots.append((x, e))
    return slots


def diagonal_types(k: int, graph: bool = False, parts: int = 0) -> Iterator[DiagonalType]:
    for shape in shapes(k):
        for levels in level_orders(shape):
            slots = passing_slots(shape, levels) if graph else []
            for bits in itertools.product((0, 1), repeat=len(slots)):
                labelings = itertools.product(range(parts), repeat=k) if parts else [()]
                for labels in labelings:
                    yield DiagonalType(shape, levels, tuple(zip(slots, bits)), tuple(labels))


def type_structure(t: DiagonalType, kind: str, parts: int = 1) -> RelationalStructure:
    k = t.shape.k
    rel: dict[str, list[tuple[int, ...]]] = {"<": [], "R": []}
    symbols: list[tuple[str, int]] = [("<", 2)]
    rel["<"] = [(i, j) for i in range(k) for j in range(i + 1, k)]
    for p, q, r, s in itertools.combinations_with_replacement(range(k), 4):
        if t.meet_level(p, q) <= t.meet_level(r, s):
            rel["R"].append((p, q, r, s))
    if kind in ("qn", "s2"):
        for i in range(2 if kind == "s2" else parts):
            symbols.append((f"P{i}", 1))
            rel[f"P{i}"] = [(x,) for x in range(k) if t.labels[x] == i]
    if kind == "rado":
        bit = dict(t.bits)
        edges = []
        for a, b in itertools.permutations(range(k), 2):
            if t.levels[a] < t.levels[b] and bit[(a, t.crossing_edge(b, t.levels[a]))]:
                edges += [(a, b), (b, a)]
        rel["E"] = edges
        symbols.insert(0, ("E", 2))
    if kind == "s2":
        rel["E"] = [(a, b) for a, b in itertools.permutations(range(k), 2)
                    if (a < b) == (t.labels[a] == t.labels[b])]
        symbols.insert(0, ("E", 2))
    symbols.append(("R", 4))
    return RelationalStructure.from_tuples(Language(tuple(symbols)), k, rel)


def type_structures(k: int, kind: str, parts: int = 1) -> set[RelationalStructure]:
    """Distinct structures realized by strongly diagonal types of the family."""
    graph = kind == "rado"
    nparts = parts if kind == "qn" else 2 if kind == "s2" else 0
    return {type_structure(t, kind, parts) for t in diagonal_types(k, graph, nparts)}


def devlin_oracle(k: int) -> int:
    """Number of (order, R)-types of k-element subsets, by direct enumeration.

    The structures live on the ≺-sorted universe, so for these rigid
    structures literal equality and isomorphism agree.
    """
    if not 1 <= k <= 5:
        raise ValueError("devlin_oracle supports 1 <= k <= 5")
    return len(type_structures(k, "devlin"))


def oracle_expansions(A: RelationalStructure, kind: str, parts: int = 1) -> set[RelationalStructure]:
    """All expansions of A that some diagonal type realizes, as literal structures."""
    out = set()
    names = A.language.names
    for S in type_structures(A.size, kind, parts):
        for perm in itertools.permutations(range(A.size)):
            E = induced_substructure(S, perm)
            if E.reduct(names) == A:
                out.add(E)
    return out


def linear_extensions(A: RelationalStructure, tree: str = "<=") -> set[RelationalStructure]:
    """Expansions of A by a strict linear order extending its tree order."""
    below = A.arrays[tree]
    out = set()
    symbols = A.language.symbols + (("<", 2),)
    for perm in itertools.permutations(range(A.size)):
        rank = {x: i for i, x in enumerate(perm)}
        if all(rank[a] <= rank[b] for a in range(A.size) for b in range(A.size) if below[a, b]):
            rel = {n: A.tuples(n) for n in A.language.names}
            rel["<"] = [(a, b) for a in range(A.size) for b in range(A.size) if rank[a] < rank[b]]
            out.add(RelationalStructure.from_tuples(Language(symbols), A.size, rel))
    return out
