"""Finite semigroups: idempotents, minimal one-sided ideals, and the standard
structure facts, all checked exhaustively on a multiplication table."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np


class SemigroupError(ValueError):
    pass


def check_associativity(table) -> tuple[bool, tuple[int, int, int] | None]:
    """Exhaustive check; returns the first (x, y, z) with (xy)z != x(yz)."""
    t = np.asarray(table, dtype=np.int64)
    n = len(t)
    if t.shape != (n, n) or (n and (t.min() < 0 or t.max() >= n)):
        raise SemigroupError("table must be an n x n matrix with entries in range(n)")
    left = t[t, :]             # left[x, y, z] = (xy)z
    right = t[:, t]            # right[x, y, z] = x(yz)
    bad = np.argwhere(left != right)
    if len(bad):
        return False, tuple(int(v) for v in bad[0])
    return True, None


@dataclass(frozen=True)
class SemigroupTable:
    table: tuple[tuple[int, ...], ...]
    n: int = field(init=False)

    def __post_init__(self):
        table = tuple(tuple(int(v) for v in row) for row in self.table)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "n", len(table))
        ok, witness = check_associativity(table)
        if not ok:
            raise SemigroupError(f"not associative at {witness}")

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    @property
    def elements(self) -> range:
        return range(self.n)

    def right_multiples(self, x: int) -> frozenset:
        """xS"""
        return frozenset(self.table[x])

    def left_multiples(self, x: int) -> frozenset:
        """Sx"""
        return frozenset(row[x] for row in self.table)

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.table]


def idempotents(S: SemigroupTable) -> list[int]:
    out = [x for x in S.elements if S.mul(x, x) == x]
    if S.n and not out:
        raise SemigroupError("finite semigroup without an idempotent")
    return out


def _minimal(sets: list[frozenset]) -> list[frozenset]:
    uniq = sorted(set(sets), key=lambda s: (len(s), sorted(s)))
    return [s for s in uniq if not any(t < s for t in uniq)]


def minimal_right_ideals(S: SemigroupTable) -> list[frozenset]:
    # every right ideal contains some xS, and xS is itself a right ideal
    return _minimal([S.right_multiples(x) for x in S.elements])


def minimal_left_ideals(S: SemigroupTable) -> list[frozenset]:
    return _minimal([S.left_multiples(x) for x in S.elements])


def _is_group(S: SemigroupTable, G: frozenset) -> bool:
    if not G:
        return False
    if any(S.mul(a, b) not in G for a in G for b in G):
        return False
    ids = [e for e in G if S.mul(e, e) == e]
    if len(ids) != 1:
        return False
    e = ids[0]
    if any(S.mul(e, a) != a or S.mul(a, e) != a for a in G):
        return False
    return all(any(S.mul(a, b) == e and S.mul(b, a) == e for b in G) for a in G)


@dataclass
class SemiFactsReport:
    clauses: dict[str, list] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(not w for w in self.clauses.values())

    def lines(self) -> list[str]:
        return [f"{name}: {'pass' if not w else 'FAIL ' + repr(w[:3])}"
                for name, w in self.clauses.items()]


def verify_semifacts(S: SemigroupTable) -> SemiFactsReport:
    rep = SemiFactsReport()
    E = [x for x in S.elements if S.mul(x, x) == x]
    rep.clauses["idempotent exists"] = [] if E else ["no idempotent"]
    # u idempotent and x in uS imply ux = x
    rep.clauses["u idempotent, x in uS => ux = x"] = [
        (u, x) for u in E for x in S.right_multiples(u) if S.mul(u, x) != x]
    R = minimal_right_ideals(S)
    L = minimal_left_ideals(S)
    # right ideals must be closed under right multiplication, and minimal ones
    # are exactly xS for each of their members
    rep.clauses["minimal right ideals are right ideals"] = [
        sorted(M) for M in R if any(S.mul(m, s) not in M for m in M for s in S.elements)]
    rep.clauses["xS = M for x in a minimal right ideal M"] = [
        (sorted(M), x) for M in R for x in M if S.right_multiples(x) != M]
    rep.clauses["M ∩ L is a group with one idempotent"] = [
        (sorted(M), sorted(Lx)) for M in R for Lx in L
        if not _is_group(S, M & Lx) or sum(S.mul(e, e) == e for e in M & Lx) != 1]
    # M, N minimal right ideals, x in M: some y in N with yx in N idempotent
    bad = []
    for M in R:
        for N in R:
            for x in M:
                if not any(S.mul(y, x) in N and S.mul(S.mul(y, x), S.mul(y, x)) == S.mul(y, x)
                           for y in N):
                    bad.append((sorted(M), sorted(N), x))
    rep.clauses["y in N with yx in N idempotent"] = bad
    K = frozenset().union(*R) if R else frozenset()
    rep.clauses["union of minimal right ideals is a two-sided ideal"] = [] if all(
        S.mul(a, s) in K and S.mul(s, a) in K for a in K for s in S.elements) else [sorted(K)]
    rep.clauses["minimal left and right ideals meet"] = [
        (sorted(M), sorted(Lx)) for M in R for Lx in L if not M & Lx]
    return rep


# --- generators ---------------------------------------------------------------------

def all_tables(n: int):
    """Every associative table on range(n), by backtracking over cells.

    A cell is fixed only once all triples it can witness become decidable.
    """
    cells = [(x, y) for x in range(n) for y in range(n)]
    t = [[-1] * n for _ in range(n)]

    def ok():
        for x, y, z in itertools.product(range(n), repeat=3):
            a = t[x][y]
            b = t[y][z]
            if a < 0 or b < 0:
                continue
            l, r = t[a][z], t[x][b]
            if l >= 0 and r >= 0 and l != r:
                return False
        return True

    def rec(k):
        if k == len(cells):
            yield tuple(tuple(row) for row in t)
            return
        x, y = cells[k]
        for v in range(n):
            t[x][y] = v
            if ok():
                yield from rec(k + 1)
        t[x][y] = -1

    yield from rec(0)


@lru_cache(maxsize=None)
def table_catalog(n: int) -> tuple:
    return tuple(all_tables(n))


def random_tables(n: int, samples: int, seed: int = 0) -> list[SemigroupTable]:
    """Uniform draws, with replacement, from all associative tables on range(n).

    Blind rejection sampling over all n^(n*n) tables hits an associative one
    about once per million draws at n = 4, so the draws come from the full
    enumeration instead.
    """
    pool = table_catalog(n)
    rng = random.Random(seed)
    return [SemigroupTable(pool[rng.randrange(len(pool))]) for _ in range(samples)]


def rejection_hit_rate(n: int, trials: int, seed: int = 0) -> float:
    """Fraction of uniformly random n x n tables that happen to be associative."""
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(trials):
        t = rng.integers(0, n, size=(n, n))
        hits += check_associativity(t)[0]
    return hits / trials


# --- named examples ------------------------------------------------------------------

def cyclic_group(n: int) -> SemigroupTable:
    return SemigroupTable(tuple(tuple((x + y) % n for y in range(n)) for x in range(n)))


def left_zero(n: int) -> SemigroupTable:
    return SemigroupTable(tuple(tuple(x for _ in range(n)) for x in range(n)))


def right_zero(n: int) -> SemigroupTable:
    return SemigroupTable(tuple(tuple(range(n)) for _ in range(n)))


def null_semigroup(n: int, zero: int = 0) -> SemigroupTable:
    return SemigroupTable(tuple(tuple(zero for _ in range(n)) for _ in range(n)))


def direct_product(S: SemigroupTable, T: SemigroupTable) -> SemigroupTable:
    pairs = [(a, b) for a in S.elements for b in T.elements]
    idx = {p: i for i, p in enumerate(pairs)}
    return SemigroupTable(tuple(tuple(idx[(S.mul(a, c), T.mul(b, d))] for c, d in pairs)
                                for a, b in pairs))
