"""Colorings of embedding sets and their refinement calculus.

Embeddings are handled as image tuples.  A ``Coloring`` of ``Emb(A_m, A_N)``
stores its domain in a fixed order and the color of each member.  The
``persistence_*`` operations are finite truncations: they look at copies
inside one finite ambient structure and say nothing about the limit.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .structures import RelationalStructure, compose, embedding_images

Map = tuple[int, ...]


class ColoringError(ValueError):
    pass


@dataclass(frozen=True)
class Coloring:
    domain: tuple[Map, ...]
    colors: tuple[Hashable, ...]
    source: RelationalStructure | None = field(default=None, compare=False, repr=False)
    target: RelationalStructure | None = field(default=None, compare=False, repr=False)
    _index: dict = field(default=None, init=False, compare=False, repr=False)

    def __post_init__(self):
        domain = tuple(tuple(int(x) for x in f) for f in self.domain)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "colors", tuple(self.colors))
        if len(domain) != len(self.colors):
            raise ColoringError("domain and colors differ in length")
        index = {f: i for i, f in enumerate(domain)}
        if len(index) != len(domain):
            raise ColoringError("repeated embedding in domain")
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_function(cls, domain: Iterable[Sequence[int]], fn: Callable[[Map], Hashable],
                      source=None, target=None) -> Coloring:
        domain = [tuple(int(x) for x in f) for f in domain]
        return cls(tuple(domain), tuple(fn(f) for f in domain), source, target)

    def __call__(self, f: Sequence[int]) -> Hashable:
        i = self._index.get(tuple(f))
        if i is None:
            raise ColoringError(f"{tuple(f)} is not in the domain")
        return self.colors[i]

    def __contains__(self, f) -> bool:
        return tuple(f) in self._index

    def __len__(self):
        return len(self.domain)

    @property
    def image(self) -> list[Hashable]:
        """Colors in order of first occurrence."""
        return list(dict.fromkeys(self.colors))

    def classes(self) -> tuple[int, ...]:
        """Canonical class labels: the i-th new color seen gets label i."""
        first: dict = {}
        return tuple(first.setdefault(c, len(first)) for c in self.colors)

    def canonical(self) -> Coloring:
        return Coloring(self.domain, self.classes(), self.source, self.target)

    def restrict(self, domain: Iterable[Sequence[int]]) -> Coloring:
        domain = [tuple(f) for f in domain]
        return Coloring(tuple(domain), tuple(self(f) for f in domain), self.source, self.target)

    def to_json(self) -> dict:
        return {"domain": [list(f) for f in self.domain],
                "colors": {",".join(map(str, f)): c for f, c in zip(self.domain, self.colors)}}

    @classmethod
    def from_json(cls, data: dict) -> Coloring:
        domain = [tuple(f) for f in data["domain"]]
        colors = data["colors"]
        return cls(tuple(domain), tuple(colors[",".join(map(str, f))] for f in domain))


def _same_domain(g: Coloring, d: Coloring):
    if g.domain != d.domain and set(g.domain) != set(d.domain):
        raise ColoringError("colorings have different domains")


def refines(gamma: Coloring, delta: Coloring) -> bool:
    """True when delta refines gamma: delta-equal embeddings are gamma-equal."""
    _same_domain(gamma, delta)
    seen: dict = {}
    for f in delta.domain:
        c = seen.setdefault(delta(f), gamma(f))
        if c != gamma(f):
            return False
    return True


def equivalent(gamma: Coloring, delta: Coloring) -> bool:
    return refines(gamma, delta) and refines(delta, gamma)


def product(gamma: Coloring, delta: Coloring) -> Coloring:
    _same_domain(gamma, delta)
    pairs = Coloring(gamma.domain, tuple((gamma(f), delta(f)) for f in gamma.domain),
                     gamma.source, gamma.target)
    return pairs.canonical()


def constant(domain: Iterable[Sequence[int]], color: Hashable = 0, source=None,
             target=None) -> Coloring:
    return Coloring.from_function(domain, lambda f: color, source, target)


def pulled_back(gamma: Coloring, inner: Sequence[int], domain: Iterable[Sequence[int]]) -> Coloring:
    """``s -> gamma(s ∘ inner)`` on ``domain`` (the dual map of ``inner``)."""
    out = []
    domain = [tuple(s) for s in domain]
    for s in domain:
        g = compose(s, inner)
        if g not in gamma:
            raise ColoringError(f"{s} ∘ {tuple(inner)} = {g} leaves the coloring's domain")
        out.append(gamma(g))
    return Coloring(tuple(domain), tuple(out))


def strongly_refines(gamma_m: Coloring, delta_n: Coloring, connectors: Iterable[Sequence[int]]) -> bool:
    """gamma_m ≪ delta_n: for each connector f, delta_n refines s -> gamma_m(s∘f)."""
    return all(refines(pulled_back(gamma_m, f, delta_n.domain), delta_n) for f in connectors)


@dataclass(frozen=True)
class ColoringDiagramCell:
    rows: tuple[Hashable, ...]
    connectors: tuple[Map, ...]
    table: dict  # (row color, connector index) -> color of gamma_m

    def __call__(self, j: Hashable, f: Sequence[int]) -> Hashable:
        return self.table[(j, self.connectors.index(tuple(f)))]


def coloring_diagram(gamma_m: Coloring, gamma_n: Coloring,
                     connectors: Iterable[Sequence[int]]) -> ColoringDiagramCell:
    connectors = tuple(tuple(f) for f in connectors)
    table: dict = {}
    witness: dict = {}
    for fi, f in enumerate(connectors):
        for s in gamma_n.domain:
            g = compose(s, f)
            if g not in gamma_m:
                raise ColoringError(f"{s} ∘ {f} = {g} leaves the coloring's domain")
            key = (gamma_n(s), fi)
            c = gamma_m(g)
            if key in table and table[key] != c:
                raise ColoringError(
                    f"not a strong refinement: copies {witness[key]} and {s} share a color "
                    f"but differ after composing with {f}")
            table.setdefault(key, c)
            witness.setdefault(key, s)
    return ColoringDiagramCell(tuple(gamma_n.image), connectors, table)


def persistence_check(gamma_m: Coloring, copies: Iterable[Sequence[int]],
                      connectors: Iterable[Sequence[int]]) -> tuple[bool, Map | None]:
    """Does every copy see every color?  Returns the first copy that does not."""
    connectors = [tuple(f) for f in connectors]
    full = set(gamma_m.image)
    for s in copies:
        s = tuple(s)
        seen = {gamma_m(compose(s, f)) for f in connectors}
        if seen != full:
            return False, s
    return True, None


def refinement_search(gamma: Coloring, delta: Coloring, copies: Iterable[Sequence[int]],
                      connectors: Iterable[Sequence[int]]) -> Map | None:
    """First copy s on which the pulled-back delta refines the pulled-back gamma."""
    connectors = [tuple(f) for f in connectors]
    for s in copies:
        s = tuple(s)
        maps = [compose(s, f) for f in connectors]
        g = Coloring(tuple(connectors), tuple(gamma(h) for h in maps))
        d = Coloring(tuple(connectors), tuple(delta(h) for h in maps))
        if refines(g, d):
            return s
    return None


@dataclass
class InducedColoring:
    coloring: Coloring
    excluded: list[Map]
    components: int


def induced_coloring(gamma_big: Coloring, B: RelationalStructure, i_B: Sequence[int],
                     target: RelationalStructure | None = None) -> InducedColoring:
    """Color Emb(B, A_N) by connected components of the graph joining f and h
    when some color is taken by copies extending both.

    Embeddings that extend to no copy in the domain of ``gamma_big`` are
    excluded and listed; at finite depth this happens near the boundary.
    """
    target = target or gamma_big.target
    if target is None:
        raise ColoringError("need the ambient structure to enumerate Emb(B, A_N)")
    i_B = tuple(i_B)
    domain = [tuple(int(x) for x in r) for r in embedding_images(B, target)]
    S: dict[Map, set] = {f: set() for f in domain}
    for s in gamma_big.domain:
        f = compose(s, i_B)
        if f not in S:
            raise ColoringError(f"{s} ∘ {i_B} is not an embedding of B")
        S[f].add(gamma_big(s))
    parent = {f: f for f in domain}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    by_color: dict = {}
    for f in domain:
        for j in S[f]:
            if j in by_color:
                a, b = find(f), find(by_color[j])
                if a != b:
                    parent[a] = b
            else:
                by_color[j] = f
    kept = [f for f in domain if S[f]]
    excluded = [f for f in domain if not S[f]]
    roots: dict = {}
    colors = tuple(roots.setdefault(find(f), len(roots)) for f in kept)
    return InducedColoring(Coloring(tuple(kept), colors, B, target), excluded, len(roots))


def expansion_coloring(emitted: RelationalStructure, A: RelationalStructure,
                       reduct_language: Sequence[str] | None = None) -> tuple[Coloring, list]:
    """The coloring f -> K'·f of Emb(A, reduct), colors labelled by first occurrence."""
    from .degrees import expansion_classes

    names = tuple(reduct_language) if reduct_language is not None else A.language.names
    rows, labels, expansions = expansion_classes(emitted, A, names)
    col = Coloring(tuple(map(tuple, rows.tolist())), tuple(int(x) for x in labels),
                   A, emitted.reduct(names))
    return col, expansions


def all_copies(A: RelationalStructure, B: RelationalStructure) -> list[Map]:
    return [tuple(int(x) for x in r) for r in embedding_images(A, B)]


def random_coloring(domain: Sequence[Map], ncolors: int, rng: np.random.Generator) -> Coloring:
    return Coloring(tuple(domain), tuple(int(x) for x in rng.integers(0, ncolors, len(domain))))


def partition_blocks(col: Coloring) -> list[frozenset]:
    blocks: dict = {}
    for f, c in zip(col.domain, col.colors):
        blocks.setdefault(c, set()).add(f)
    return [frozenset(b) for b in blocks.values()]


def is_coarsening_of_components(col: Coloring, finer: Coloring) -> bool:
    """Helper for tests: is every block of ``finer`` inside a block of ``col``?"""
    return refines(col, finer)


