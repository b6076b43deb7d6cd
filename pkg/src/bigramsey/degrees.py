"""Big Ramsey degree tables from coding prefixes, checked against abstract oracles.

The degree of ``A`` is the number of distinct literal expansions ``K'·f`` over
all embeddings ``f`` of ``A`` into the base reduct of a coding prefix.  Counts
are certified by stabilization across checkpoints, which is evidence about
the infinite limit and not a proof.
"""
from __future__ import annotations

import csv
import io
import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import codings
from .diagonal import devlin_oracle, linear_extensions, oracle_expansions
from .pullback import classify_rows, pullback_bits, unpack_structure
from .structures import (Language, RelationalStructure, chain, embedding_blocks,
                         embedding_images, empty_structure, graph)

log = logging.getLogger(__name__)


class InvariantViolation(RuntimeError):
    pass


@dataclass
class ExpansionSet:
    base: RelationalStructure
    expansions: list[RelationalStructure]
    source_depth: int = 0
    stabilized: bool = False

    def __len__(self):
        return len(self.expansions)


def expansion_classes(emitted: RelationalStructure, A: RelationalStructure,
                      reduct_language: Sequence[str] | None = None, threads: int = 1):
    """Embeddings of A into the reduct, with the first-occurrence class of each ``K'·f``.

    Returns ``(rows, labels, expansions)``; ``expansions[labels[i]]`` is the
    pullback of ``emitted`` along ``rows[i]``.
    """
    names = tuple(reduct_language) if reduct_language is not None else A.language.names
    base = emitted.reduct(names)
    if base.language != A.language:
        raise ValueError(f"A is over {A.language.names}, reduct is over {names}")
    rows = embedding_images(A, base)
    bits = pullback_bits(emitted, rows, threads=threads)
    labels, first = classify_rows(bits)
    expansions = [unpack_structure(bits[i], A.size, emitted.language) for i in first]
    return rows, labels, expansions


def enumerate_expansions(coding_emitted: RelationalStructure, A: RelationalStructure,
                         reduct_language: Sequence[str] | None = None,
                         depth: int = 0) -> ExpansionSet:
    rows, _, expansions = expansion_classes(coding_emitted, A, reduct_language)
    if len(rows) == 0:
        log.warning("A does not embed into the reduct; no expansions")
    return ExpansionSet(A, expansions, source_depth=depth)


# --- growth sources -------------------------------------------------------------


class Source:
    """A growing coding prefix.  ``advance`` returns the emitted structure and
    the universe positions that are new since the previous call."""

    depth = 0

    def advance(self, depth: int) -> tuple[RelationalStructure, np.ndarray]:
        raise NotImplementedError


class BinarySource(Source):
    def __init__(self, kind: str, seed: int = 0, parts: int = 1):
        self.coding = codings.new_coding(kind, seed, parts)
        self.known: set[int] = set()

    def advance(self, depth):
        while self.coding.construction_round < depth:
            self.coding.step()
        self.depth = self.coding.construction_round
        seq = self.coding.in_order()
        fresh = np.array([x not in self.known for x in seq], dtype=bool)
        self.known.update(seq)
        return codings.emit_structure(self.coding), fresh


class RebuildSource(Source):
    """Sources without a stable identity of points; every checkpoint is recounted."""

    def __init__(self, build: Callable[[int], object]):
        self.build = build

    def advance(self, depth):
        self.depth = depth
        K = codings.emit_structure(self.build(depth))
        return K, np.ones(K.size, dtype=bool)


def make_source(kind: str, seed: int = 0, parts: int = 1, height: int = 2) -> Source:
    if kind in codings.BINARY_KINDS:
        return BinarySource(kind, seed, parts)
    if kind == "ultrametric":
        return RebuildSource(lambda b: codings.build_ultrametric(height, b))
    if kind == "sinf":
        return RebuildSource(codings.build_sinf)
    raise ValueError(f"unknown coding kind {kind!r}")


# --- stabilization ----------------------------------------------------------------

@dataclass
class DegreeRow:
    family: str
    descriptor: str
    degree: int
    depth: int
    stabilized: bool
    oracle: int | None = None
    checkpoints: list[tuple[int, int]] = field(default_factory=list)

    @property
    def note(self) -> str:
        if not self.stabilized:
            return "unstabilized"
        return f"stable for {len(self.checkpoints)} checkpoints at depth {self.depth}"


def stabilized_degree(A: RelationalStructure, coding_kind: str, round_schedule: Sequence[int],
                      stability_window: int = 3, *, seed: int = 0, parts: int = 1,
                      height: int = 2, descriptor: str = "", family: str | None = None,
                      budget_seconds: float | None = None, threads: int = 1,
                      source: Source | None = None, growth_factor: float = 1.5) -> DegreeRow:
    """Grow the coding along ``round_schedule`` and count expansions of A.

    Only embeddings touching points that are new since the last checkpoint
    are pulled back; points already present keep their induced structure as
    the coding grows, so nothing is lost.  Stabilization means the count did
    not change over ``stability_window`` consecutive checkpoints, and the
    current depth is at least ``growth_factor`` times the depth where it last
    changed.  The second condition guards against late plateaus: a seed can
    sit one short for four checkpoints before the last type appears.
    """
    if list(round_schedule) != sorted(set(round_schedule)):
        raise ValueError("round_schedule must be strictly increasing")
    source = source or make_source(coding_kind, seed, parts, height)
    names = A.language.names
    seen: dict[bytes, None] = {}
    history: list[tuple[int, int]] = []
    start = time.monotonic()
    first_depth = None
    stabilized = False
    for depth in round_schedule:
        if budget_seconds is not None and time.monotonic() - start > budget_seconds:
            log.info("budget exhausted before depth %d", depth)
            break
        K, fresh = source.advance(depth)
        incremental = isinstance(source, BinarySource)
        if not incremental:
            seen = {}
        for rows in embedding_blocks(A, K.reduct(names)):
            if incremental:
                rows = rows[fresh[rows].any(axis=1)]
            bits = pullback_bits(K, rows, threads=threads)
            _, first = classify_rows(bits)
            for i in first:
                seen.setdefault(bits[i].tobytes(), None)
        count = len(seen)
        if history and count < history[-1][1]:
            raise InvariantViolation(f"count dropped from {history[-1][1]} to {count}")
        if not history or count > history[-1][1]:
            first_depth = source.depth
        history.append((source.depth, count))
        log.debug("%s %s depth %d: %d", coding_kind, descriptor, source.depth, count)
        tail = [c for _, c in history[-stability_window:]]
        long_enough = source.depth >= growth_factor * first_depth
        if len(tail) == stability_window and len(set(tail)) == 1 and count > 0 and long_enough:
            stabilized = True
            break
    degree = history[-1][1] if history else 0
    return DegreeRow(family or coding_kind, descriptor, degree,
                     first_depth if first_depth is not None else 0, stabilized,
                     checkpoints=history)


# --- catalog ------------------------------------------------------------------------

FAMILIES = ("devlin", "rado", "qn", "s2", "ultrametric", "sinf")


def labelled_chain(labels: Sequence[int], parts: int) -> RelationalStructure:
    k = len(labels)
    symbols = (("<", 2),) + tuple((f"P{i}", 1) for i in range(parts))
    rel = {"<": [(i, j) for i in range(k) for j in range(i + 1, k)]}
    for i in range(parts):
        rel[f"P{i}"] = [(x,) for x in range(k) if labels[x] == i]
    return RelationalStructure.from_tuples(Language(symbols), k, rel)


def tournament(n: int, arcs) -> RelationalStructure:
    return RelationalStructure.from_tuples(Language.of(("E", 2)), n, {"E": arcs})


def rooted_tree(parents: Sequence[int | None], height: int) -> RelationalStructure:
    """Tree given by parent pointers (root first), with levels L0..L_height."""
    n = len(parents)
    depth = []
    for x, p in enumerate(parents):
        depth.append(0 if p is None else depth[p] + 1)
    below = []
    for y in range(n):
        z = y
        while z is not None:
            below.append((z, y))
            z = parents[z]
    rel = {"<=": below}
    for i in range(height + 1):
        rel[f"L{i}"] = [(x,) for x in range(n) if depth[x] == i]
    symbols = (("<=", 2),) + tuple((f"L{i}", 1) for i in range(height + 1))
    return RelationalStructure.from_tuples(Language(symbols), n, rel)


@dataclass
class CatalogEntry:
    family: str
    descriptor: str
    structure: RelationalStructure
    kind: str
    parts: int = 1
    height: int = 2

    def oracle(self) -> int:
        if self.kind == "devlin":
            return devlin_oracle(self.structure.size)
        if self.kind == "ultrametric":
            return len(linear_extensions(self.structure))
        if self.kind == "sinf":
            return math.factorial(self.structure.size)
        return len(oracle_expansions(self.structure, self.kind, self.parts))


def catalog(family: str, kmax: int = 3, parts: int = 2, height: int = 2) -> list[CatalogEntry]:
    if family == "devlin":
        return [CatalogEntry("devlin", str(k), chain(k), "devlin") for k in range(1, kmax + 1)]
    if family == "sinf":
        return [CatalogEntry("sinf", str(n), empty_structure(n), "sinf")
                for n in range(1, kmax + 1)]
    if family == "rado":
        items = [("vertex", graph(1, [])), ("edge", graph(2, [(0, 1)])),
                 ("non-edge", graph(2, []))]
        return [CatalogEntry("rado", d, s, "rado") for d, s in items]
    if family == "qn":
        out = []
        for k in range(1, min(kmax, 2) + 1):
            for labels in itertools.product(range(parts), repeat=k):
                d = f"{k}:" + "".join(map(str, labels))
                out.append(CatalogEntry("qn", d, labelled_chain(labels, parts), "qn", parts))
        return out
    if family == "s2":
        return [CatalogEntry("s2", "vertex", tournament(1, []), "s2", 2),
                CatalogEntry("s2", "arc", tournament(2, [(0, 1)]), "s2", 2)]
    if family == "ultrametric":
        trees = {"root": [None], "root+child": [None, 0], "cherry": [None, 0, 0],
                 "path3": [None, 0, 1], "cherry+grandchild": [None, 0, 0, 1]}
        return [CatalogEntry("ultrametric", d, rooted_tree(p, height), "ultrametric",
                             height=height) for d, p in trees.items()]
    raise ValueError(f"unknown family {family!r}")


DEFAULT_SCHEDULES = {
    "devlin": list(range(8, 193, 8)),
    "qn": list(range(8, 193, 8)),
    "rado": list(range(8, 193, 8)),
    "s2": list(range(8, 193, 8)),
    "ultrametric": list(range(2, 9)),
    "sinf": list(range(1, 13)),
}
DEFAULT_WINDOW = 4


@dataclass
class DegreeTable:
    rows: list[DegreeRow]

    COLUMNS = ("family", "descriptor", "degree", "depth", "stabilized", "oracle")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for r in self.rows:
            w.writerow([r.family, r.descriptor, r.degree, r.depth, str(r.stabilized).lower(),
                        "" if r.oracle is None else r.oracle])
        return buf.getvalue()


def degree_table(family: str, kmax: int = 3, *, budget_seconds: float | None = None,
                 seed: int = 0, parts: int = 2, height: int = 2,
                 schedule: Sequence[int] | None = None, window: int = DEFAULT_WINDOW,
                 threads: int = 1, with_oracle: bool = True) -> DegreeTable:
    """One row per catalog structure; a shared coding instance per family."""
    entries = catalog(family, kmax, parts, height)
    schedule = list(schedule or DEFAULT_SCHEDULES[family])
    start = time.monotonic()
    rows = []
    for e in entries:
        left = None
        if budget_seconds is not None:
            left = max(0.0, budget_seconds - (time.monotonic() - start))
        row = stabilized_degree(e.structure, e.kind, schedule, window, seed=seed,
                                parts=e.parts, height=e.height, descriptor=e.descriptor,
                                family=family, budget_seconds=left, threads=threads)
        if with_oracle:
            row.oracle = e.oracle()
        rows.append(row)
    return DegreeTable(rows)
