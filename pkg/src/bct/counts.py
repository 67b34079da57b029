"""Transition counts for every node of the maximal tree."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SequenceError, TreeError
from .symbols import Sequence
from .trees import Context, TreeSpace, context_code, format_context


@dataclass(frozen=True)
class CountTable:
    """``levels[d][r, k]`` counts how often symbol ``k`` followed a past whose
    last ``d`` symbols form the node with code ``r`` (see :mod:`bct.trees`)."""

    space: TreeSpace
    levels: tuple
    n_effective: int

    def node_counts(self, s: Context) -> np.ndarray:
        if len(s) > self.space.L:
            raise TreeError(f"context {format_context(s)} deeper than L={self.space.L}")
        return self.levels[len(s)][context_code(s, self.space.m)].copy()

    def __add__(self, other: "CountTable") -> "CountTable":
        if other.space != self.space:
            raise TreeError("cannot merge count tables from different spaces")
        levels = tuple(a + b for a, b in zip(self.levels, other.levels))
        for lv in levels:
            lv.flags.writeable = False
        return CountTable(self.space, levels, self.n_effective + other.n_effective)


def _count_positions(z: np.ndarray, space: TreeSpace, targets: np.ndarray) -> list[np.ndarray]:
    """Count the transitions into positions ``targets`` (0-based, all >= L)."""
    m, L = space.m, space.L
    nxt = z[targets]
    code = np.zeros(targets.size, dtype=np.int64)
    levels = []
    for d in range(L + 1):
        if d > 0:
            code = code * m + z[targets - d]
        flat = np.bincount(code * m + nxt, minlength=m ** (d + 1))
        levels.append(flat.astype(np.int64).reshape(m**d, m))
    return levels


def build_counts(z: Sequence, space: TreeSpace, chunks: int = 1) -> CountTable:
    """Count every transition ``z[t-1-L..t-1] -> z[t]`` at all ``L + 1`` ancestors.

    The first ``L`` symbols only serve as context.  ``chunks`` splits the
    transition positions into independent blocks merged by addition.
    """
    if z.alphabet.m != space.m:
        raise SequenceError(f"sequence alphabet has {z.alphabet.m} symbols, space expects {space.m}")
    if z.n <= space.L:
        raise SequenceError(f"sequence of length {z.n} needs more than L={space.L} symbols")
    space.check_budget()
    codes = z.codes
    positions = np.arange(space.L, z.n)
    parts = np.array_split(positions, max(1, int(chunks)))
    total = None
    for part in parts:
        lv = _count_positions(codes, space, part)
        total = lv if total is None else [a + b for a, b in zip(total, lv)]
    for lv in total:
        lv.flags.writeable = False
    return CountTable(space, tuple(total), int(positions.size))


def node_counts(table: CountTable, s: Context) -> np.ndarray:
    return table.node_counts(s)
