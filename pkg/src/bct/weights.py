"""Node weight functions and the tree functions they define.

A node weight ``f`` gives every node of the maximal tree a non-negative weight;
a tree is worth the product of the weights at its leaves.  Weights are carried
as natural logarithms, with ``LOG_ZERO`` (-inf) standing for a weight of 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import WeightError
from .symbols import Alphabet
from .trees import Context, ContextTree, TreeSpace, format_context

LOG_ZERO = -math.inf


def is_zero(logw: float) -> bool:
    return logw == LOG_ZERO


class NodeWeightFunction:
    """Base class.  Subclasses provide ``level_log_weights`` and ``spec``."""

    space: TreeSpace

    def level_log_weights(self, d: int) -> np.ndarray:
        raise NotImplementedError

    def log_weight(self, s: Context) -> float:
        raise NotImplementedError

    @property
    def spec(self) -> str:
        raise NotImplementedError

    def __mul__(self, other):
        if not isinstance(other, NodeWeightFunction):
            return NotImplemented
        return product(self, other)

    def __str__(self):
        return self.spec


class _DepthWeight(NodeWeightFunction):
    """Weights that only look at the node depth."""

    def _log_at_depth(self, d: int) -> float:
        raise NotImplementedError

    def level_log_weights(self, d):
        return np.full(self.space.m**d, self._log_at_depth(d), dtype=float)

    def log_weight(self, s):
        return self._log_at_depth(len(s))


@dataclass(frozen=True)
class Unity(_DepthWeight):
    space: TreeSpace

    def _log_at_depth(self, d):
        return 0.0

    @property
    def spec(self):
        return "unity"


@dataclass(frozen=True)
class DepthIndicator(_DepthWeight):
    space: TreeSpace
    l: int

    def __post_init__(self):
        if not 0 <= self.l <= self.space.L:
            raise WeightError(f"depth indicator needs 0 <= l <= {self.space.L}, got {self.l}")

    def _log_at_depth(self, d):
        return 0.0 if d <= self.l else LOG_ZERO

    @property
    def spec(self):
        return f"depth:{self.l}"


@dataclass(frozen=True)
class RenewalIndicator(NodeWeightFunction):
    """Weight 1 unless symbol ``a`` shows up anywhere but the oldest position."""

    space: TreeSpace
    a: int
    symbol: str | None = None

    def __post_init__(self):
        if not 0 <= self.a < self.space.m:
            raise WeightError(f"renewal symbol code {self.a} outside 0..{self.space.m - 1}")

    def log_weight(self, s):
        return LOG_ZERO if self.a in s[1:] else 0.0

    def level_log_weights(self, d):
        m = self.space.m
        # drop the least significant digit (the oldest symbol), test the rest
        rest = np.arange(m**d, dtype=np.int64) // m
        bad = np.zeros(rest.size, dtype=bool)
        for _ in range(max(d - 1, 0)):
            rest, digit = np.divmod(rest, m)
            bad |= digit == self.a
        return np.where(bad, LOG_ZERO, 0.0)

    @property
    def spec(self):
        return f"renewal:{self.symbol if self.symbol is not None else self.a}"


@dataclass(frozen=True)
class Exponential(_DepthWeight):
    space: TreeSpace
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise WeightError(f"exponential rate must be positive, got {self.rate}")

    def _log_at_depth(self, d):
        return -float(self.rate)

    @property
    def spec(self):
        return f"exp:{self.rate:g}"


@dataclass(frozen=True)
class LengthExponential(_DepthWeight):
    space: TreeSpace

    def _log_at_depth(self, d):
        return -float(d)

    @property
    def spec(self):
        return "lenexp"


@dataclass(frozen=True)
class CTW(_DepthWeight):
    space: TreeSpace

    def _log_at_depth(self, d):
        return math.log(0.25) if d < self.space.L else math.log(0.5)

    @property
    def spec(self):
        return "ctw"


@dataclass(frozen=True)
class GeneralCTW(_DepthWeight):
    space: TreeSpace
    beta: float

    def __post_init__(self):
        if not 0 < self.beta < 1:
            raise WeightError(f"general CTW needs 0 < beta < 1, got {self.beta}")

    def _log_at_depth(self, d):
        stop = math.log1p(-self.beta) / (self.space.m - 1)
        return stop + math.log(self.beta) if d < self.space.L else stop

    @property
    def spec(self):
        return f"gctw:{self.beta:g}"


@dataclass(frozen=True)
class TargetDepth(_DepthWeight):
    space: TreeSpace
    c: float
    l: int

    def __post_init__(self):
        if not self.c > 1:
            raise WeightError(f"target depth needs c > 1, got {self.c}")
        if not 0 <= self.l <= self.space.L:
            raise WeightError(f"target depth needs 0 <= l <= {self.space.L}, got {self.l}")

    def _log_at_depth(self, d):
        return -abs(d - self.l) * math.log(self.c)

    @property
    def spec(self):
        return f"target:{self.c:g},{self.l}"


@dataclass(frozen=True)
class Product(NodeWeightFunction):
    space: TreeSpace
    factors: tuple

    def level_log_weights(self, d):
        out = np.zeros(self.space.m**d, dtype=float)
        for f in self.factors:
            out = out + f.level_log_weights(d)
        return out

    def log_weight(self, s):
        parts = [f.log_weight(s) for f in self.factors]
        if any(is_zero(w) for w in parts):
            return LOG_ZERO
        return math.fsum(parts)

    @property
    def spec(self):
        return "*".join(f.spec for f in self.factors)


def product(F: NodeWeightFunction, G: NodeWeightFunction) -> Product:
    if F.space != G.space:
        raise WeightError(f"cannot multiply weights over {F.space} and {G.space}")
    parts = []
    for w in (F, G):
        parts.extend(w.factors if isinstance(w, Product) else [w])
    return Product(F.space, tuple(parts))


def eval_node(F: NodeWeightFunction, s: Context) -> float:
    if len(s) > F.space.L:
        raise WeightError(f"context {format_context(s)} deeper than L={F.space.L}")
    return F.log_weight(s)


def eval_tree(F: NodeWeightFunction, tree: ContextTree) -> float:
    """log F(tree), the sum of leaf log-weights (``LOG_ZERO`` if any leaf weighs 0)."""
    total = []
    for s in tree:
        w = eval_node(F, s)
        if is_zero(w):
            return LOG_ZERO
        total.append(w)
    return math.fsum(total)


def _number(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise WeightError(f"{what}: expected a number, got {text!r}") from None


def _integer(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise WeightError(f"{what}: expected an integer, got {text!r}") from None


def parse_prior(text: str, space: TreeSpace, alphabet: Alphabet | None = None) -> NodeWeightFunction:
    """Parse the prior mini-language, e.g. ``"target:8,3*depth:5"``."""
    terms = [t.strip() for t in text.split("*")]
    if not text.strip() or any(not t for t in terms):
        raise WeightError(f"empty term in prior specification {text!r}")
    out = []
    for term in terms:
        name, _, arg = term.partition(":")
        name = name.strip().lower()
        arg = arg.strip()
        if name in ("unity", "lenexp", "ctw") and arg:
            raise WeightError(f"{name} takes no parameter")
        if name == "unity":
            out.append(Unity(space))
        elif name == "depth":
            out.append(DepthIndicator(space, _integer(arg, term)))
        elif name == "renewal":
            if alphabet is not None:
                if len(arg) != 1:
                    raise WeightError(f"{term}: renewal takes a single alphabet symbol")
                out.append(RenewalIndicator(space, alphabet.code(arg), arg))
            else:
                out.append(RenewalIndicator(space, _integer(arg, term)))
        elif name == "exp":
            out.append(Exponential(space, _number(arg, term)))
        elif name == "lenexp":
            out.append(LengthExponential(space))
        elif name == "ctw":
            out.append(CTW(space))
        elif name == "gctw":
            out.append(GeneralCTW(space, _number(arg, term)))
        elif name == "target":
            c, sep, l = arg.partition(",")
            if not sep:
                raise WeightError(f"{term}: target needs C,L")
            out.append(TargetDepth(space, _number(c, term), _integer(l, term)))
        else:
            raise WeightError(f"unknown prior term {name!r}")
    if len(out) == 1:
        return out[0]
    return Product(space, tuple(out))
