"""Finite relational structures, embeddings and 2-types.

Every structure lives on the universe ``{0, ..., n-1}``.  Interpretations are
stored as dense boolean arrays of shape ``(n,) * arity`` so that pulling a
structure back along many embeddings at once is a single gather.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class Language:
    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        symbols = tuple((str(name), int(arity)) for name, arity in self.symbols)
        object.__setattr__(self, "symbols", symbols)
        names = [name for name, _ in symbols]
        if len(set(names)) != len(names):
            raise StructureError(f"duplicate symbol names in {names}")
        for name, arity in symbols:
            if arity < 1:
                raise StructureError(f"symbol {name!r} has arity {arity} < 1")

    @classmethod
    def of(cls, *symbols: tuple[str, int]) -> Language:
        return cls(tuple(symbols))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.symbols)

    def arity(self, name: str) -> int:
        for sym, arity in self.symbols:
            if sym == name:
                return arity
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def extends(self, other: Language) -> bool:
        """True when every symbol of ``other`` occurs here with the same arity."""
        mine = dict(self.symbols)
        return all(mine.get(name) == arity for name, arity in other.symbols)

    def restrict(self, names: Iterable[str]) -> Language:
        keep = set(names)
        missing = keep - set(self.names)
        if missing:
            raise StructureError(f"unknown symbols {sorted(missing)}")
        return Language(tuple(s for s in self.symbols if s[0] in keep))

    def to_json(self) -> list[dict]:
        return [{"name": name, "arity": arity} for name, arity in self.symbols]

    @classmethod
    def from_json(cls, data: Sequence[Mapping]) -> Language:
        return cls(tuple((d["name"], d["arity"]) for d in data))


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=bool)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RelationalStructure:
    """A finite L-structure.  ``arrays[name][a, b, ...]`` is the truth value."""

    language: Language
    size: int
    arrays: Mapping[str, np.ndarray] = field(repr=False)

    def __post_init__(self):
        if self.size < 0:
            raise StructureError("negative size")
        arrays = {}
        for name, arity in self.language.symbols:
            arr = self.arrays.get(name)
            if arr is None:
                arr = np.zeros((self.size,) * arity, dtype=bool)
            if arr.shape != (self.size,) * arity:
                raise StructureError(f"relation {name!r} has shape {arr.shape}")
            arrays[name] = _frozen(arr)
        extra = set(self.arrays) - set(arrays)
        if extra:
            raise StructureError(f"relations {sorted(extra)} not in language")
        object.__setattr__(self, "arrays", arrays)

    @classmethod
    def from_tuples(cls, language: Language, size: int,
                    relations: Mapping[str, Iterable[Sequence[int]]] | None = None) -> RelationalStructure:
        arrays = {}
        for name, arity in language.symbols:
            arr = np.zeros((size,) * arity, dtype=bool)
            for tup in (relations or {}).get(name, ()):
                tup = tuple(int(x) for x in tup)
                if len(tup) != arity or any(x < 0 or x >= size for x in tup):
                    raise StructureError(f"bad tuple {tup} for {name!r} on {size} points")
                arr[tup] = True
            arrays[name] = arr
        unknown = set(relations or {}) - set(language.names)
        if unknown:
            raise StructureError(f"relations {sorted(unknown)} not in language")
        return cls(language, size, arrays)

    def tuples(self, name: str) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in t) for t in np.argwhere(self.arrays[name])]

    def holds(self, name: str, *args: int) -> bool:
        return bool(self.arrays[name][args])

    def reduct(self, names: Iterable[str]) -> RelationalStructure:
        lang = self.language.restrict(names)
        return RelationalStructure(lang, self.size, {n: self.arrays[n] for n in lang.names})

    def _key(self):
        return (self.language, self.size,
                tuple(self.arrays[n].tobytes() for n in self.language.names))

    def __eq__(self, other):
        if not isinstance(other, RelationalStructure):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        counts = ", ".join(f"{n}:{int(a.sum())}" for n, a in self.arrays.items())
        return f"RelationalStructure(size={self.size}, {counts})"

    def to_json(self) -> dict:
        return {
            "language": self.language.to_json(),
            "size": self.size,
            "relations": {n: [list(t) for t in self.tuples(n)] for n in self.language.names},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> RelationalStructure:
        return cls.from_tuples(Language.from_json(data["language"]), int(data["size"]),
                               data.get("relations", {}))


@dataclass(frozen=True)
class Embedding:
    source: RelationalStructure = field(repr=False)
    target: RelationalStructure = field(repr=False)
    map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(int(x) for x in self.map))
        if len(self.map) != self.source.size:
            raise StructureError("map length differs from source size")
        if not is_embedding(self.source, self.target, self.map):
            raise StructureError(f"{self.map} is not an embedding")

    def __call__(self, x: int) -> int:
        return self.map[x]

    def compose(self, inner: Embedding) -> Embedding:
        """``self ∘ inner``."""
        return Embedding(inner.source, self.target, compose(self.map, inner.map))


def compose(outer: Sequence[int], inner: Sequence[int]) -> tuple[int, ...]:
    """Composition of maps given as image tuples: ``x -> outer[inner[x]]``."""
    return tuple(outer[i] for i in inner)


def chain(n: int, name: str = "<") -> RelationalStructure:
    lang = Language.of((name, 2))
    return RelationalStructure(lang, n, {name: np.triu(np.ones((n, n), dtype=bool), 1)})


def empty_structure(n: int, language: Language | None = None) -> RelationalStructure:
    return RelationalStructure(language or Language(()), n, {})


def graph(n: int, edges: Iterable[tuple[int, int]], name: str = "E") -> RelationalStructure:
    sym = []
    for a, b in edges:
        sym += [(a, b), (b, a)]
    return RelationalStructure.from_tuples(Language.of((name, 2)), n, {name: sym})


def _check_language(A: RelationalStructure, B: RelationalStructure):
    if A.language != B.language:
        raise StructureError(f"language mismatch: {A.language.names} vs {B.language.names}")


def induced_substructure(B: RelationalStructure, f: Sequence[int]) -> RelationalStructure:
    """B·f: the structure on ``range(len(f))`` making ``f`` an embedding into B."""
    f = np.asarray(f, dtype=np.intp).reshape(-1)
    if len(set(f.tolist())) != len(f):
        raise StructureError(f"map {f.tolist()} is not injective")
    if len(f) and (f.min() < 0 or f.max() >= B.size):
        raise StructureError("map leaves the target universe")
    arrays = {name: B.arrays[name][np.ix_(*[f] * arity)] if arity else B.arrays[name]
              for name, arity in B.language.symbols}
    return RelationalStructure(B.language, len(f), arrays)


def is_embedding(A: RelationalStructure, B: RelationalStructure, f: Sequence[int]) -> bool:
    if len(f) != A.size or len(set(f)) != len(f):
        return False
    if any(x < 0 or x >= B.size for x in f):
        return False
    if not B.language.extends(A.language):
        return False
    idx = np.asarray(f, dtype=np.intp)
    for name, arity in A.language.symbols:
        if not np.array_equal(B.arrays[name][np.ix_(*[idx] * arity)], A.arrays[name]):
            return False
    return True


def _new_index_tuples(i: int, arity: int) -> list[tuple[int, ...]]:
    return [t for t in itertools.product(range(i + 1), repeat=arity) if i in t]


def _extend(A: RelationalStructure, B: RelationalStructure, lang: Language,
            rows: np.ndarray, upto: int | None = None) -> np.ndarray:
    k = A.size if upto is None else upto
    n = B.size
    cand = np.arange(n, dtype=np.intp)
    for i in range(rows.shape[1], k):
        if len(rows) == 0:
            return np.zeros((0, k), dtype=np.intp)
        mask = np.ones((len(rows), n), dtype=bool)
        for j in range(i):
            mask &= rows[:, j][:, None] != cand[None, :]
        for name, arity in lang.symbols:
            barr = B.arrays[name]
            aarr = A.arrays[name]
            for t in _new_index_tuples(i, arity):
                idx = tuple(cand[None, :] if p == i else rows[:, p][:, None] for p in t)
                vals = barr[idx]
                mask &= vals if aarr[t] else ~vals
        ri, vi = np.nonzero(mask)
        rows = np.concatenate([rows[ri], vi[:, None]], axis=1)
    return rows


def _embedding_language(A, B, language):
    lang = language or A.language
    if not B.language.extends(lang) or not A.language.extends(lang):
        raise StructureError(f"language mismatch: {A.language.names} vs {B.language.names}")
    return lang


def embedding_blocks(A: RelationalStructure, B: RelationalStructure,
                     language: Language | None = None) -> Iterator[np.ndarray]:
    """Embeddings A -> B in lexicographic order, one block per image of point 0."""
    lang = _embedding_language(A, B, language)
    start = np.zeros((1, 0), dtype=np.intp)
    if A.size <= 1:
        yield _extend(A, B, lang, start)
        return
    for v in _extend(A, B, lang, start, upto=1)[:, 0]:
        block = _extend(A, B, lang, np.array([[v]], dtype=np.intp))
        if len(block):
            yield block


def embedding_images(A: RelationalStructure, B: RelationalStructure,
                     language: Language | None = None) -> np.ndarray:
    """All embeddings A -> B (checked on ``language``, default A's) as rows.

    Breadth-first extension keeps rows in lexicographic order of the images.
    """
    lang = _embedding_language(A, B, language)
    return _extend(A, B, lang, np.zeros((1, 0), dtype=np.intp))


def enumerate_embeddings(A: RelationalStructure, B: RelationalStructure) -> list[Embedding]:
    _check_language(A, B)
    return [_trusted(A, B, row) for row in embedding_images(A, B)]


def _trusted(A, B, row) -> Embedding:
    # rows from embedding_images are already verified; skip the re-check
    emb = object.__new__(Embedding)
    object.__setattr__(emb, "source", A)
    object.__setattr__(emb, "target", B)
    object.__setattr__(emb, "map", tuple(int(x) for x in row))
    return emb


def _signatures(A: RelationalStructure) -> list[tuple]:
    sig = []
    for x in range(A.size):
        parts = []
        for name, arity in A.language.symbols:
            arr = A.arrays[name]
            for pos in range(arity):
                parts.append(int(np.take(arr, x, axis=pos).sum()))
            parts.append(bool(arr[(x,) * arity]))
        sig.append(tuple(parts))
    # one round of refinement over binary relations
    refined = []
    for x in range(A.size):
        extra = []
        for name, arity in A.language.symbols:
            if arity == 2:
                arr = A.arrays[name]
                extra.append(tuple(sorted(sig[y] for y in range(A.size) if arr[x, y])))
                extra.append(tuple(sorted(sig[y] for y in range(A.size) if arr[y, x])))
        refined.append((sig[x], tuple(extra)))
    return refined


def _bijections(A: RelationalStructure, B: RelationalStructure) -> Iterator[tuple[int, ...]]:
    if A.size != B.size or A.language != B.language:
        return
    sa, sb = _signatures(A), _signatures(B)
    if sorted(sa) != sorted(sb):
        return
    n = A.size
    image = [-1] * n
    used = [False] * n
    checks = {i: [(name, t) for name, arity in A.language.symbols
                  for t in _new_index_tuples(i, arity)] for i in range(n)}

    def consistent(i):
        for name, t in checks[i]:
            if A.arrays[name][t] != B.arrays[name][tuple(image[p] for p in t)]:
                return False
        return True

    def rec(i):
        if i == n:
            yield tuple(image)
            return
        for y in range(n):
            if not used[y] and sa[i] == sb[y]:
                image[i] = y
                if consistent(i):
                    used[y] = True
                    yield from rec(i + 1)
                    used[y] = False
        image[i] = -1

    yield from rec(0)


def are_isomorphic(A: RelationalStructure, B: RelationalStructure) -> tuple[int, ...] | None:
    """An isomorphism A -> B as an image tuple, or None."""
    return next(_bijections(A, B), None)


def automorphisms(A: RelationalStructure) -> list[Embedding]:
    return [_trusted(A, A, m) for m in _bijections(A, A)]


# --- 2-types -----------------------------------------------------------------

@dataclass(frozen=True)
class TwoType:
    """Canonical joint configuration of a pair of embeddings.

    The union of both images is relabelled by first appearance along
    ``f0`` then ``f1``; every point is in some image, so this relabelling is
    the only isomorphism that can commute with the two maps.
    """

    joint: RelationalStructure
    g0: tuple[int, ...]
    g1: tuple[int, ...]


def two_type(ambient: RelationalStructure, f0: Sequence[int], f1: Sequence[int]) -> TwoType:
    order: list[int] = []
    pos: dict[int, int] = {}
    for x in list(f0) + list(f1):
        if x not in pos:
            pos[x] = len(order)
            order.append(int(x))
    joint = induced_substructure(ambient, order)
    return TwoType(joint, tuple(pos[x] for x in f0), tuple(pos[x] for x in f1))


def enumerate_2types(m_struct: RelationalStructure, ambient: RelationalStructure) -> set[TwoType]:
    maps = [tuple(int(x) for x in row) for row in embedding_images(m_struct, ambient)]
    return {two_type(ambient, f0, f1) for f0 in maps for f1 in maps}


def check_chain(exhaustion: Sequence[RelationalStructure]) -> None:
    """Each level must be the initial-segment substructure of the next."""
    for lo, hi in zip(exhaustion, exhaustion[1:]):
        if lo.language != hi.language or lo.size > hi.size:
            raise StructureError("exhaustion levels are not nested")
        if induced_substructure(hi, range(lo.size)) != lo:
            raise StructureError(f"level of size {lo.size} is not an initial substructure")


def roelcke_witness(m_struct: RelationalStructure, exhaustion: Sequence[RelationalStructure],
                    n_max: int) -> int | None:
    """Least n <= n_max whose level already realizes every 2-type of level n_max.

    None means nothing was realized at depth ``n_max``; it is not a refutation.
    """
    check_chain(exhaustion)
    n_max = min(n_max, len(exhaustion) - 1)
    if n_max < 0:
        return None
    top = enumerate_2types(m_struct, exhaustion[n_max])
    if not top:
        return None
    for n in range(n_max + 1):
        if top <= enumerate_2types(m_struct, exhaustion[n]):
            return n
    return None
