"""Context trees over a finite alphabet.

A context is a tuple of symbol codes written oldest symbol first, so the
context ``(0, 1, 1)`` means "two steps back a 0, then 1, then a 1 most
recently".  The root context is the empty tuple.  The children of a node
``s`` are ``(k,) + s``: growing the tree looks one symbol further into the past.

Nodes of the maximal tree are stored level by level.  Inside level ``d`` a node
gets the integer whose base-m digits, most significant first, are the symbols
read from the most recent one backwards.  Child ``k`` of node ``r`` at level
``d`` is therefore ``r * m + k`` at level ``d + 1``: siblings are contiguous,
and the ancestors of a past are found by reading it backwards.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterator

from .errors import BudgetError, TreeError
from .symbols import Alphabet

Context = tuple[int, ...]

ROOT: Context = ()
DEFAULT_NODE_BUDGET = 10**7
DEFAULT_ENUMERATION_BOUND = 10**6


def node_budget() -> int:
    env = os.environ.get("BCT_NODE_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise BudgetError(f"BCT_NODE_BUDGET must be an integer, got {env!r}") from None
    return DEFAULT_NODE_BUDGET


@dataclass(frozen=True)
class TreeSpace:
    """All full m-ary context trees of depth at most ``L``."""

    m: int
    L: int

    def __post_init__(self):
        if self.m < 2:
            raise TreeError("alphabet size must be at least 2")
        if self.L < 0:
            raise TreeError("maximal depth must be non-negative")

    @property
    def node_count(self) -> int:
        return (self.m ** (self.L + 1) - 1) // (self.m - 1)

    def level_size(self, d: int) -> int:
        return self.m**d

    def check_budget(self, budget: int | None = None) -> None:
        budget = node_budget() if budget is None else budget
        if self.node_count > budget:
            raise BudgetError(
                f"maximal tree for m={self.m}, L={self.L} has {self.node_count} nodes, "
                f"above the node budget of {budget} (set BCT_NODE_BUDGET to raise it)"
            )

    def tree_count(self) -> int:
        """|T_L| from the recurrence |T_0| = 1, |T_{k+1}| = |T_k|^m + 1."""
        t = 1
        for _ in range(self.L):
            t = t**self.m + 1
        return t


def context_code(s: Context, m: int) -> int:
    r = 0
    for sym in reversed(s):
        r = r * m + sym
    return r


def code_context(r: int, d: int, m: int) -> Context:
    syms = []
    for _ in range(d):
        r, sym = divmod(r, m)
        syms.append(sym)
    # least significant digit is the oldest symbol
    return tuple(syms)


def format_context(s: Context, alphabet: Alphabet | None = None) -> str:
    if not s:
        return "λ"
    if alphabet is None:
        return "".join(str(c) for c in s)
    return alphabet.decode(s)


def parse_context(text: str, alphabet: Alphabet) -> Context:
    text = text.strip()
    if text in ("", "λ"):
        return ROOT
    return tuple(alphabet.code(ch) for ch in text)


def _is_suffix(a: Context, b: Context) -> bool:
    return len(a) <= len(b) and (len(a) == 0 or b[-len(a):] == a)


@dataclass(frozen=True)
class ContextTree:
    leaves: frozenset
    m: int

    @property
    def depth(self) -> int:
        return max(len(s) for s in self.leaves)

    @cached_property
    def inner_nodes(self) -> frozenset:
        inner = set()
        for s in self.leaves:
            for i in range(1, len(s) + 1):
                inner.add(s[i:])
        return frozenset(inner)

    def __len__(self):
        return len(self.leaves)

    def __iter__(self):
        return iter(sorted(self.leaves, key=lambda s: (len(s), tuple(reversed(s)))))

    def __contains__(self, s):
        return s in self.leaves

    def labels(self, alphabet: Alphabet | None = None) -> list[str]:
        return [format_context(s, alphabet) for s in self]

    def __repr__(self):
        return "ContextTree({" + ", ".join(self.labels()) + "})"


def validate_tree(leaves, space: TreeSpace) -> ContextTree:
    """Check that ``leaves`` is a proper, complete leaf set and return the tree."""
    leaves = [tuple(int(c) for c in s) for s in leaves]
    if not leaves:
        raise TreeError("a tree needs at least one leaf")
    if len(set(leaves)) != len(leaves):
        dup = next(s for s in leaves if leaves.count(s) > 1)
        raise TreeError(f"duplicate leaf {format_context(dup)}")
    for s in leaves:
        if len(s) > space.L:
            raise TreeError(f"leaf {format_context(s)} deeper than L={space.L}")
        if any(not 0 <= c < space.m for c in s):
            raise TreeError(f"leaf {format_context(s)} has a symbol outside 0..{space.m - 1}")
    by_len = sorted(leaves, key=len)
    leaf_set = set(leaves)
    for s in by_len:
        for i in range(1, len(s) + 1):
            if s[i:] in leaf_set:
                raise TreeError(
                    f"leaf {format_context(s[i:])} is a suffix of leaf {format_context(s)}"
                )
    tree = ContextTree(frozenset(leaves), space.m)
    present = leaf_set | tree.inner_nodes
    for u in sorted(tree.inner_nodes, key=len):
        for k in range(space.m):
            if (k,) + u not in present:
                raise TreeError(
                    f"inner node {format_context(u)} is missing child {format_context((k,) + u)}"
                )
    return tree


def suffix_map(tree: ContextTree, past) -> Context:
    """The leaf of ``tree`` that is a suffix of ``past`` (oldest symbol first)."""
    past = list(past)
    node: Context = ROOT
    while node not in tree.leaves:
        if len(node) >= len(past):
            raise TreeError(f"past of length {len(past)} too short for tree of depth {tree.depth}")
        node = (int(past[-len(node) - 1]),) + node
    return node


def structural_distance(a: ContextTree, b: ContextTree) -> int:
    return len(a.inner_nodes ^ b.inner_nodes)


def maximal_tree(space: TreeSpace, budget: int | None = None) -> ContextTree:
    space.check_budget(budget)
    leaves = [code_context(r, space.L, space.m) for r in range(space.m**space.L)]
    return ContextTree(frozenset(leaves), space.m)


def root_tree(space: TreeSpace) -> ContextTree:
    return ContextTree(frozenset([ROOT]), space.m)


def enumerate_trees(space: TreeSpace, bound: int = DEFAULT_ENUMERATION_BOUND) -> Iterator[ContextTree]:
    """Yield every tree of the space once.

    A tree rooted at ``s`` is either the single leaf ``s`` or a choice of one
    subtree for each child ``ks``.  Meant as a brute-force oracle for small spaces.
    """
    total = space.tree_count()
    if total > bound:
        raise BudgetError(f"{total} trees in T_{space.L} (m={space.m}) exceeds enumeration bound {bound}")

    def below(s: Context) -> list[frozenset]:
        if len(s) == space.L:
            return [frozenset([s])]
        out = [frozenset([s])]
        combos = [frozenset()]
        for k in range(space.m):
            subs = below((k,) + s)
            combos = [c | t for c in combos for t in subs]
        out.extend(combos)
        return out

    for leaves in below(ROOT):
        yield ContextTree(leaves, space.m)


def parse_tree_text(text: str, alphabet: Alphabet, space: TreeSpace, source: str = "<tree>") -> ContextTree:
    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        raw = line.strip()
        if not raw or raw.startswith("#"):
            continue
        try:
            entries.append((lineno, parse_context(raw, alphabet)))
        except Exception as exc:
            raise TreeError(f"{source}: line {lineno}: {exc}") from None
    if not entries:
        entries.append((1, ROOT))
    seen: dict[Context, int] = {}
    for lineno, s in entries:
        if s in seen:
            raise TreeError(f"{source}: line {lineno}: duplicate leaf {format_context(s, alphabet)}")
        for t, t_line in seen.items():
            if _is_suffix(t, s) or _is_suffix(s, t):
                short, long_ = (t, s) if len(t) <= len(s) else (s, t)
                raise TreeError(
                    f"{source}: line {lineno}: leaf {format_context(short, alphabet)} is a suffix of "
                    f"leaf {format_context(long_, alphabet)} (line {t_line})"
                )
        seen[s] = lineno
    try:
        return validate_tree([s for _, s in entries], space)
    except TreeError as exc:
        raise TreeError(f"{source}: {exc}") from None


def parse_tree_file(path, alphabet: Alphabet, space: TreeSpace) -> ContextTree:
    return parse_tree_text(Path(path).read_text(encoding="utf-8"), alphabet, space, str(path))


def write_tree_file(tree: ContextTree, path, alphabet: Alphabet) -> None:
    Path(path).write_text("\n".join(tree.labels(alphabet)) + "\n", encoding="utf-8")
