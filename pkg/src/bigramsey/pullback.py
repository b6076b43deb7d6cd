"""Batched computation of B·f for many embeddings f at once."""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .structures import Language, RelationalStructure


def _gather(B: RelationalStructure, rows: np.ndarray, language: Language) -> np.ndarray:
    n, k = B.size, rows.shape[1]
    dtype = np.int32 if n ** max([a for _, a in language.symbols] or [1]) < 2 ** 31 else np.int64
    rows = rows.astype(dtype, copy=False)
    flat_cache: dict[tuple[int, ...], np.ndarray] = {}

    def flat(t):
        # flat index of the cells B[f(t0), f(t1), ...], built from halves
        if t not in flat_cache:
            if len(t) == 1:
                flat_cache[t] = rows[:, t[0]]
            else:
                h = len(t) // 2
                flat_cache[t] = flat(t[:h]) * dtype(n ** (len(t) - h)) + flat(t[h:])
        return flat_cache[t]

    cols = []
    for name, arity in language.symbols:
        data = B.arrays[name].reshape(-1)
        for t in itertools.product(range(k), repeat=arity):
            cols.append(data.take(flat(t)))
    if not cols:
        return np.zeros((len(rows), 0), dtype=bool)
    return np.stack(cols, axis=1)


def pullback_bits(B: RelationalStructure, rows: np.ndarray, language: Language | None = None,
                  chunk: int = 50_000, threads: int = 1) -> np.ndarray:
    """Packed truth tables of ``B·f`` for each row ``f`` of ``rows``.

    Row ``i`` of the result determines the induced structure on
    ``range(rows.shape[1])`` completely; equal rows mean literally equal
    structures.
    """
    language = language or B.language
    rows = np.asarray(rows, dtype=np.int64)
    starts = range(0, max(len(rows), 1), chunk)

    def work(s):
        return np.packbits(_gather(B, rows[s:s + chunk], language), axis=1)

    if threads > 1 and len(rows) > chunk:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    return np.concatenate(parts, axis=0)


def unpack_structure(bits: np.ndarray, size: int, language: Language) -> RelationalStructure:
    total = sum(size ** a for _, a in language.symbols)
    flat = np.unpackbits(bits)[:total].astype(bool)
    arrays, at = {}, 0
    for name, arity in language.symbols:
        k = size ** arity
        arrays[name] = flat[at:at + k].reshape((size,) * arity)
        at += k
    return RelationalStructure(language, size, arrays)


def classify_rows(bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """First-occurrence labels for packed rows, plus the index of each class's first row."""
    if len(bits) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    if bits.shape[1] == 0:
        return np.zeros(len(bits), dtype=np.int64), np.zeros(1, dtype=np.int64)
    keys = np.ascontiguousarray(bits).view(np.dtype((np.void, bits.shape[1])))[:, 0]
    _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    # relabel classes by first appearance
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse.reshape(-1)], np.sort(first)
