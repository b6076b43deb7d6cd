"""Finite prefixes of tree-coded structures.

The binary-tree codings (devlin, rado, qn, s2) share one growth engine.  A
coding keeps an abstract diagonal tree: leaves, binary meets, and a linear
order ``order`` of all nodes whose positions are the levels.  Words in
``2^{<ω}`` are materialized from that tree on demand, so every node keeps its
identity while fresh levels are slotted in below or between existing ones.
Relative order of old levels never changes, hence every finite configuration
seen at one depth survives at all later depths.

Each growth round inserts one new meet ``u`` on an existing edge and one new
leaf ``y`` as the other child of ``u``.  Round ``t`` (1-based) is

* a root round when ``t % 4 == 0``: ``u`` becomes the root at level 0 and
  ``y`` sits on top.  For rado the bits of ``y`` follow a linear code in the
  root-round counter, so all adjacency patterns on any three earlier leaves
  show up within a bounded number of root rounds;
* a gap round when ``t`` is odd: the oldest pending gap between ≺-adjacent
  leaves is filled;
* a uniform round otherwise: edge, side and both level slots are drawn at
  random.
"""
from __future__ import annotations

import copy
import itertools
import random
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .structures import Language, RelationalStructure

BINARY_KINDS = ("devlin", "rado", "qn", "s2")
KINDS = BINARY_KINDS + ("ultrametric", "sinf")


class CodingError(ValueError):
    pass


# --- words ---------------------------------------------------------------------

def meet(x: str, y: str) -> str:
    """Longest common initial segment."""
    n = 0
    for a, b in zip(x, y):
        if a != b:
            break
        n += 1
    return x[:n]


def comparable(x: str, y: str) -> bool:
    return x.startswith(y) or y.startswith(x)


def prec(x: str, y: str) -> bool:
    """x ≺ y: x leaves the common stem to the left."""
    if comparable(x, y):
        raise CodingError(f"{x!r} and {y!r} are comparable")
    k = len(meet(x, y))
    return x[k] < y[k]


def preceq(x: str, y: str) -> bool:
    return x == y or prec(x, y)


def relation_R(p: str, q: str, r: str, s: str) -> bool:
    """|p∧q| <= |r∧s| for a ⪯-sorted quadruple."""
    if not (preceq(p, q) and preceq(q, r) and preceq(r, s)):
        raise CodingError("relation_R needs p ⪯ q ⪯ r ⪯ s")
    return len(meet(p, q)) <= len(meet(r, s))


def is_antichain(words) -> bool:
    return all(not comparable(x, y) for x, y in itertools.combinations(words, 2))


def strongly_diagonal(words) -> bool:
    """Leaves and pairwise meets, as nodes, sit on pairwise distinct levels."""
    nodes = set(words) | {meet(x, y) for x, y in itertools.combinations(words, 2)}
    return len({len(x) for x in nodes}) == len(nodes)


# --- binary codings ----------------------------------------------------------------

@dataclass
class TreeCoding:
    kind: str
    parts: int = 1
    seed: int = 0
    construction_round: int = 0
    parent: dict[int, int | None] = field(default_factory=lambda: {0: None})
    kids: dict[int, tuple[int, int]] = field(default_factory=dict)
    order: list[int] = field(default_factory=lambda: [0])
    leaves: list[int] = field(default_factory=lambda: [0])
    # rado passing bits: edge (named by its lower end) -> leaf -> bit
    bits: dict[int, dict[int, int]] = field(default_factory=lambda: {0: {}})
    gaps: deque = field(default_factory=deque)
    root_rounds: int = 0
    rng: random.Random = field(default=None, repr=False)
    next_id: int = 1

    def __post_init__(self):
        if self.kind not in BINARY_KINDS:
            raise CodingError(f"unknown binary coding kind {self.kind!r}")
        if self.parts < 1:
            raise CodingError("parts must be >= 1")
        if self.rng is None:
            self.rng = random.Random(self.seed)

    # -- tree queries
    def levels(self) -> dict[int, int]:
        return {x: i for i, x in enumerate(self.order)}

    def in_order(self) -> list[int]:
        """Leaves sorted by ≺ (left-to-right)."""
        root = self.order[0]
        out, stack = [], [root]
        while stack:
            x = stack.pop()
            if x in self.kids:
                left, right = self.kids[x]
                stack += [right, left]
            else:
                out.append(x)
        return out

    def ancestors(self, x: int) -> list[int]:
        out = []
        while x is not None:
            out.append(x)
            x = self.parent[x]
        return out

    def label(self, leaf: int) -> int:
        return self.leaves.index(leaf) % self.parts

    # -- words
    def word(self, leaf: int, lv: dict[int, int] | None = None) -> str:
        lv = lv or self.levels()
        path = self.ancestors(leaf)[::-1]  # root ... leaf
        onpath = {x: i for i, x in enumerate(path)}
        leafset = set(self.leaves)
        out = []
        for ell in range(lv[leaf]):
            z = self.order[ell]
            if z in onpath:
                child = path[onpath[z] + 1]
                out.append("0" if self.kids[z][0] == child else "1")
                continue
            bit = 0
            if self.kind == "rado" and z in leafset:
                edge = next(e for e in path if lv[e] > ell)
                bit = self.bits[edge][z]
            out.append(str(bit))
        return "".join(out)

    @property
    def nodes(self) -> list[str]:
        lv = self.levels()
        return [self.word(x, lv) for x in self.in_order()]

    # -- growth
    def _insert(self, c: int, side: int, upos: int, ypos: int, ybits=None) -> int:
        u, y = self.next_id, self.next_id + 1
        self.next_id += 2
        p = self.parent[c]
        self.parent[u] = p
        self.parent[c] = u
        self.parent[y] = u
        if p is not None:
            self.kids[p] = tuple(u if z == c else z for z in self.kids[p])
        self.kids[u] = (y, c) if side == 0 else (c, y)
        self.order.insert(upos, u)
        self.order.insert(ypos, y)
        self.leaves.append(y)
        lv = self.levels()
        # the lower part of the split edge now belongs to u
        self.bits[u] = {z: b for z, b in self.bits.get(c, {}).items() if lv[z] < lv[u]}
        if c in self.bits:
            self.bits[c] = {z: b for z, b in self.bits[c].items() if lv[z] > lv[u]}
        # edges crossing the new leaf level get a passing bit for y
        ly = lv[y]
        for e, pe in self.parent.items():
            if pe is not None and e != y and lv[pe] < ly < lv[e]:
                self.bits.setdefault(e, {})[y] = self.rng.randrange(2)
        # the new edge u -> y crosses the levels of some older leaves
        crossed = [z for z in self.leaves if z != y and lv[u] < lv[z] < ly]
        self.bits[y] = {z: (ybits(z) if ybits else self.rng.randrange(2)) for z in crossed}
        self._push_gaps(y)
        return y

    def _push_gaps(self, y: int):
        seq = self.in_order()
        i = seq.index(y)
        if i > 0:
            self.gaps.append((seq[i - 1], y))
        if i + 1 < len(seq):
            self.gaps.append((y, seq[i + 1]))

    def _root_round(self, side: int, ybits=None):
        root = self.order[0]
        self._insert(root, side, 0, len(self.order) + 1, ybits)

    def _gap_round(self) -> bool:
        seq = self.in_order()
        pos = {x: i for i, x in enumerate(seq)}
        while self.gaps:
            a, b = self.gaps.popleft()
            if pos[b] == pos[a] + 1:
                break
        else:
            return False
        m = next(x for x in self.ancestors(a) if x in set(self.ancestors(b)))
        edges = []
        for leaf, side in ((a, 1), (b, 0)):
            path = self.ancestors(leaf)
            for c in path[:path.index(m)]:
                edges.append((c, side))
        c, side = self.rng.choice(edges)
        self._random_slots(c, side)
        return True

    def _random_slots(self, c: int, side: int):
        lv = self.levels()
        p = self.parent[c]
        lo = 0 if p is None else lv[p] + 1
        upos = self.rng.randint(lo, lv[c])
        ypos = self.rng.randint(upos + 1, len(self.order) + 1)
        self._insert(c, side, upos, ypos)

    def step(self):
        t = self.construction_round + 1
        if t % 4 == 0:
            code = self.root_rounds
            self.root_rounds += 1
            index = {z: i for i, z in enumerate(self.leaves)}

            def ybits(z):
                v = 1 | (index[z] << 1)
                return bin(code & v).count("1") % 2

            self._root_round(self.rng.randrange(2), ybits if self.kind == "rado" else None)
        elif t % 2 == 1:
            if not self._gap_round():
                self._root_round(1)
        else:
            c = self.rng.choice(sorted(self.parent))
            self._random_slots(c, self.rng.randrange(2))
        self.construction_round = t


def new_coding(kind: str, seed: int = 0, parts: int = 1) -> TreeCoding:
    if kind == "s2":
        parts = 2
    return TreeCoding(kind=kind, parts=parts, seed=seed)


def grow(coding: TreeCoding, rounds: int) -> TreeCoding:
    out = copy.deepcopy(coding)
    for _ in range(rounds):
        out.step()
    return out


def grow_devlin(coding: TreeCoding, rounds: int) -> TreeCoding:
    if coding.kind != "devlin":
        raise CodingError("grow_devlin needs a devlin coding")
    return grow(coding, rounds)


def grow_rado(coding: TreeCoding, rounds: int) -> TreeCoding:
    if coding.kind != "rado":
        raise CodingError("grow_rado needs a rado coding")
    return grow(coding, rounds)


def build_qn(n: int, rounds: int, seed: int = 0) -> TreeCoding:
    if n < 1:
        raise CodingError("need at least one part")
    return grow(new_coding("qn", seed, n), rounds)


def build_s2(rounds: int, seed: int = 0) -> TreeCoding:
    return grow(new_coding("s2", seed), rounds)


def build_devlin(rounds: int, seed: int = 0) -> TreeCoding:
    return grow(new_coding("devlin", seed), rounds)


def build_rado(rounds: int, seed: int = 0) -> TreeCoding:
    return grow(new_coding("rado", seed), rounds)


# --- ultrametric and S∞ -----------------------------------------------------------

@dataclass
class UltrametricCoding:
    """Full ``branch``-ary tree of height ``height``.

    Nodes are tuples of child indices.  The expansion order lists nodes by
    weight ``depth + sum(indices)`` with ties broken lexicographically; in
    the infinitely branching limit each weight class is finite, so this is an
    ω-order extending the tree order.
    """

    height: int
    branch: int
    tree_nodes: list[tuple[int, ...]] = field(default_factory=list)

    kind = "ultrametric"

    def __post_init__(self):
        if self.height < 1 or self.branch < 2:
            raise CodingError("need height >= 1 and branch >= 2")
        if not self.tree_nodes:
            nodes = [()]
            for d in range(1, self.height + 1):
                nodes += list(itertools.product(range(self.branch), repeat=d))
            self.tree_nodes = sorted(nodes, key=lambda x: (len(x) + sum(x), x))


def build_ultrametric(r: int, b: int) -> UltrametricCoding:
    return UltrametricCoding(r, b)


@dataclass
class LinearOrderCoding:
    """An edgeless set of ``size`` points together with its enumeration order."""

    size: int
    kind = "sinf"


def build_sinf(size: int) -> LinearOrderCoding:
    return LinearOrderCoding(size)


# --- emission ---------------------------------------------------------------------

def base_language(coding) -> tuple[str, ...]:
    kind = coding.kind
    if kind == "devlin":
        return ("<",)
    if kind in ("rado", "s2"):
        return ("E",)
    if kind == "qn":
        return ("<",) + tuple(f"P{i}" for i in range(coding.parts))
    if kind == "ultrametric":
        return ("<=",) + tuple(f"L{i}" for i in range(coding.height + 1))
    if kind == "sinf":
        return ()
    raise CodingError(kind)


def meet_levels(coding: TreeCoding) -> tuple[list[int], np.ndarray]:
    """Leaves in ≺ order and the matrix of meet levels (diagonal = leaf level)."""
    lv = coding.levels()
    seq = coding.in_order()
    anc = [coding.ancestors(x) for x in seq]
    n = len(seq)
    M = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        M[i, i] = lv[seq[i]]
        up = set(anc[i])
        for j in range(i + 1, n):
            m = next(z for z in anc[j] if z in up)
            M[i, j] = M[j, i] = lv[m]
    return seq, M


def _r_array(M: np.ndarray) -> np.ndarray:
    n = len(M)
    le = np.triu(np.ones((n, n), dtype=bool))
    R = M[:, :, None, None] <= M[None, None, :, :]
    R &= le[:, :, None, None]
    R &= le[None, :, :, None]
    R &= le[None, None, :, :]
    return R


def emit_structure(coding, reduct: str | tuple[str, ...] | None = None) -> RelationalStructure:
    """Materialize the coding over the expanded language.

    ``reduct="base"`` strips to the base language; a tuple keeps those symbols.
    """
    full = _emit_full(coding)
    if reduct is None or reduct == "full":
        return full
    if reduct == "base":
        return full.reduct(base_language(coding))
    return full.reduct(reduct)


def _emit_full(coding) -> RelationalStructure:
    if coding.kind == "ultrametric":
        return _emit_ultrametric(coding)
    if coding.kind == "sinf":
        n = coding.size
        return RelationalStructure(Language.of(("<", 2)), n,
                                   {"<": np.triu(np.ones((n, n), dtype=bool), 1)})
    seq, M = meet_levels(coding)
    n = len(seq)
    less = np.triu(np.ones((n, n), dtype=bool), 1)
    arrays = {"<": less, "R": _r_array(M)}
    symbols = [("<", 2)]
    if coding.kind in ("qn", "s2"):
        labels = np.array([coding.label(x) for x in seq])
        for i in range(coding.parts):
            arrays[f"P{i}"] = labels == i
            symbols.append((f"P{i}", 1))
    if coding.kind == "rado":
        lv = coding.levels()
        words = [coding.word(x, lv) for x in seq]
        E = np.zeros((n, n), dtype=bool)
        for i, j in itertools.combinations(range(n), 2):
            a, b = (i, j) if len(words[i]) < len(words[j]) else (j, i)
            E[i, j] = E[j, i] = words[b][len(words[a])] == "1"
        arrays["E"] = E
        symbols = [("E", 2)] + symbols
    if coding.kind == "s2":
        same = labels[:, None] == labels[None, :]
        arrays["E"] = (less & same) | (less.T & ~same)
        symbols = [("E", 2)] + symbols
    symbols.append(("R", 4))
    return RelationalStructure(Language(tuple(symbols)), n, arrays)


def _emit_ultrametric(coding: UltrametricCoding) -> RelationalStructure:
    nodes = coding.tree_nodes
    n = len(nodes)
    below = np.array([[y[:len(x)] == x for y in nodes] for x in nodes], dtype=bool)
    symbols = [("<=", 2)] + [(f"L{i}", 1) for i in range(coding.height + 1)] + [("<", 2)]
    depth = np.array([len(x) for x in nodes])
    arrays = {"<=": below, "<": np.triu(np.ones((n, n), dtype=bool), 1)}
    for i in range(coding.height + 1):
        arrays[f"L{i}"] = depth == i
    return RelationalStructure(Language(tuple(symbols)), n, arrays)


def check_invariants(coding: TreeCoding) -> list[str]:
    """Antichain, transversality and strong diagonality, by a scan over words."""
    words = coding.nodes
    problems = []
    if not is_antichain(words):
        problems.append("not an antichain")
    if len({len(w) for w in words}) != len(words):
        problems.append("not transversal")
    if not strongly_diagonal(words):
        problems.append("not strongly diagonal")
    if any(not prec(x, y) for x, y in zip(words, words[1:])):
        problems.append("nodes not listed in ≺ order")
    return problems


def to_json(coding) -> dict:
    out = {"kind": coding.kind}
    if isinstance(coding, TreeCoding):
        seq = coding.in_order()
        lv = coding.levels()
        out.update(seed=coding.seed, rounds=coding.construction_round,
                   nodes=[coding.word(x, lv) for x in seq])
        if coding.kind in ("qn", "s2"):
            out["parts"] = coding.parts
            out["labels"] = [coding.label(x) for x in seq]
    elif coding.kind == "ultrametric":
        out.update(height=coding.height, branch=coding.branch,
                   nodes=[list(x) for x in coding.tree_nodes])
    else:
        out["size"] = coding.size
    out["structure"] = emit_structure(coding).to_json()
    return out


def to_dot(coding) -> str:
    lines = ["digraph coding {", "  node [shape=point];"]
    if isinstance(coding, TreeCoding):
        lv = coding.levels()
        leaves = set(coding.leaves)
        for x in coding.order:
            shape = "box" if x in leaves else "circle"
            text = coding.word(x, lv) if x in leaves else str(lv[x])
            lines.append(f'  n{x} [shape={shape}, label="{text or "ε"}"];')
        for x, p in sorted(coding.parent.items()):
            if p is not None:
                lines.append(f"  n{p} -> n{x};")
    elif coding.kind == "ultrametric":
        name = {x: f"t{i}" for i, x in enumerate(coding.tree_nodes)}
        for i, x in enumerate(coding.tree_nodes):
            lines.append(f'  {name[x]} [shape=circle, label="{i}"];')
        for x in coding.tree_nodes:
            if x:
                lines.append(f"  {name[x[:-1]]} -> {name[x]};")
    else:
        for i in range(coding.size):
            lines.append(f'  p{i} [shape=circle, label="{i}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
