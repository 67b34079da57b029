"""Sums and maxima of tree functions over all trees of bounded depth.

Everything is computed bottom-up over the maximal tree in the natural-log
domain.  For a node ``s`` above the deepest level

    sigma(s)   = logaddexp(sum_k sigma(ks), log f(s))
    upsilon(s) = max(sum_k upsilon(ks), log f(s))

and both equal ``log f(s)`` on the deepest level.  The value at the root is the
log of the sum (resp. maximum) of ``F(tree)`` over every tree in the space.
Multiplying ``f`` by the Dirichlet-marginal node terms of a data set gives the
unnormalized posterior, so evidence, posterior probabilities and the MAP tree
all come out of the same recursion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .counts import CountTable, build_counts
from .errors import PriorError, TreeError
from .symbols import Sequence
from .trees import ContextTree, TreeSpace, code_context, context_code
from .weights import LOG_ZERO, NodeWeightFunction, eval_tree, is_zero

LOG10_E = math.log10(math.e)


def q_alpha_node_term(counts, alpha: float, m: int | None = None) -> float:
    """log of the Dirichlet(alpha)-marginal probability of one node's counts.

    With ``alpha = 1/2`` and two symbols this is the Krichevsky-Trofimov
    block probability.  All-zero counts give exactly 0.0.
    """
    c = np.asarray(counts, dtype=float)
    m = c.size if m is None else m
    if c.size != m:
        raise ValueError(f"expected {m} counts, got {c.size}")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not c.any():
        return 0.0
    return float(
        gammaln(m * alpha) - m * gammaln(alpha)
        + gammaln(c + alpha).sum() - gammaln(c.sum() + m * alpha)
    )


def q_alpha_levels(table: CountTable, alpha: float) -> list[np.ndarray]:
    """Vectorized :func:`q_alpha_node_term` for every node, level by level."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    m = table.space.m
    const = gammaln(m * alpha) - m * gammaln(alpha)
    out = []
    for lv in table.levels:
        c = lv.astype(float)
        q = const + gammaln(c + alpha).sum(axis=1) - gammaln(c.sum(axis=1) + m * alpha)
        q[lv.sum(axis=1) == 0] = 0.0
        out.append(q)
    return out


@dataclass(frozen=True)
class RecursionTable:
    space: TreeSpace
    weight: NodeWeightFunction
    log_f: tuple
    sigma: tuple
    upsilon: tuple
    upsilon_below: tuple
    alpha: float | None = None

    @property
    def log_sum(self) -> float:
        return float(self.sigma[0][0])

    @property
    def log_max(self) -> float:
        return float(self.upsilon[0][0])

    def node_sigma(self, s) -> float:
        return float(self.sigma[len(s)][context_code(s, self.space.m)])

    def node_upsilon(self, s) -> float:
        return float(self.upsilon[len(s)][context_code(s, self.space.m)])

    def tree_log_value(self, tree: ContextTree) -> float:
        """log of the product of node values over the leaves of ``tree``."""
        parts = []
        for s in tree:
            if len(s) > self.space.L:
                raise TreeError(f"tree deeper than L={self.space.L}")
            w = float(self.log_f[len(s)][context_code(s, self.space.m)])
            if is_zero(w):
                return LOG_ZERO
            parts.append(w)
        return math.fsum(parts)


def _children_sum(level: np.ndarray, m: int) -> np.ndarray:
    return level.reshape(-1, m).sum(axis=1)


def build_recursion(F: NodeWeightFunction, q=None, alpha: float | None = None) -> RecursionTable:
    """Fill sigma/upsilon for every node.

    ``q`` optionally holds per-level log node terms (see :func:`q_alpha_levels`);
    the recursion then runs on the pointwise product of ``F`` and those terms.
    """
    space = F.space
    space.check_budget()
    m, L = space.m, space.L
    log_f = []
    for d in range(L + 1):
        lf = F.level_log_weights(d)
        if q is not None:
            lf = lf + q[d]
        log_f.append(lf)
    sigma = [None] * (L + 1)
    upsilon = [None] * (L + 1)
    below = [None] * L
    sigma[L] = log_f[L].copy()
    upsilon[L] = log_f[L].copy()
    with np.errstate(invalid="ignore"):
        for d in range(L - 1, -1, -1):
            sigma[d] = np.logaddexp(_children_sum(sigma[d + 1], m), log_f[d])
            below[d] = _children_sum(upsilon[d + 1], m)
            upsilon[d] = np.maximum(below[d], log_f[d])
    for arrs in (log_f, sigma, upsilon, below):
        for a in arrs:
            a.flags.writeable = False
    return RecursionTable(
        space, F, tuple(log_f), tuple(sigma), tuple(upsilon), tuple(below), alpha
    )


def truncated_log_sums(log_f) -> np.ndarray:
    """``out[k]`` is the root sigma when every node deeper than ``k`` weighs 0.

    Equals ``build_recursion(F * D_k).log_sum`` without rebuilding the weights.
    """
    L = len(log_f) - 1
    out = np.empty(L + 1)
    with np.errstate(invalid="ignore"):
        for k in range(L + 1):
            s = np.asarray(log_f[k], dtype=float)
            for d in range(k - 1, -1, -1):
                m = s.size // log_f[d].size
                s = np.logaddexp(_children_sum(s, m), log_f[d])
            out[k] = s[0]
    return out


def sum_over_trees(F: NodeWeightFunction) -> float:
    """log of the sum of F(tree) over every tree of the space."""
    return build_recursion(F).log_sum


def max_over_trees(F: NodeWeightFunction) -> float:
    return build_recursion(F).log_max


def _extract_map(table: RecursionTable) -> tuple[ContextTree, bool]:
    if is_zero(table.log_max):
        raise PriorError("every tree has weight zero; no maximizing tree")
    m, L = table.space.m, table.space.L
    leaves = []
    ties = False
    stack = [(0, 0)]
    while stack:
        d, r = stack.pop()
        if d == L:
            leaves.append(code_context(r, d, m))
            continue
        f = table.log_f[d][r]
        below = table.upsilon_below[d][r]
        if f >= below:
            if f == below:
                ties = True
            leaves.append(code_context(r, d, m))
        else:
            stack.extend((d + 1, r * m + k) for k in range(m - 1, -1, -1))
    return ContextTree(frozenset(leaves), m), ties


def map_tree(table: RecursionTable) -> ContextTree:
    """A tree attaining the maximum, found by top-down pruning.

    A node becomes a leaf as soon as its own value is at least the best
    product over its children, so ties resolve to the smaller tree.
    """
    return _extract_map(table)[0]


@dataclass(frozen=True)
class PosteriorSummary:
    log_evidence: float
    map_tree: ContextTree
    map_log_posterior: float
    log_prior_normalizer: float
    log_posterior_normalizer: float
    map_ties: bool = False
    reference_tree: ContextTree | None = None
    reference_log_prior: float | None = None
    reference_log_posterior: float | None = None
    n_effective: int = 0

    @property
    def log10_evidence(self) -> float:
        return self.log_evidence * LOG10_E


def _counts_for(z, space: TreeSpace) -> CountTable:
    if isinstance(z, CountTable):
        if z.space != space:
            raise TreeError(f"count table built for {z.space}, weight defined on {space}")
        return z
    if isinstance(z, Sequence):
        return build_counts(z, space)
    raise TypeError(f"expected a Sequence or CountTable, got {type(z).__name__}")


def _prior_table(F: NodeWeightFunction) -> RecursionTable:
    table = build_recursion(F)
    if is_zero(table.log_sum):
        raise PriorError(f"prior {F.spec} gives every tree weight zero and cannot be normalized")
    return table


def posterior_tables(z, F: NodeWeightFunction, alpha: float) -> tuple[RecursionTable, RecursionTable]:
    """The prior recursion for ``F`` and the posterior recursion for ``F * Q_alpha``."""
    counts = _counts_for(z, F.space)
    prior = _prior_table(F)
    post = build_recursion(F, q_alpha_levels(counts, alpha), alpha)
    return prior, post


def evidence(z, F: NodeWeightFunction, alpha: float, reference: ContextTree | None = None) -> PosteriorSummary:
    """Marginal likelihood, MAP tree and (optionally) a reference tree's probabilities.

    ``z`` may be a :class:`Sequence` or an already built :class:`CountTable`.
    """
    counts = _counts_for(z, F.space)
    prior, post = posterior_tables(counts, F, alpha)
    tree, ties = _extract_map(post)
    ref_prior = ref_post = None
    if reference is not None:
        ref_prior = _minus(prior.tree_log_value(reference), prior.log_sum)
        ref_post = _minus(post.tree_log_value(reference), post.log_sum)
    return PosteriorSummary(
        log_evidence=post.log_sum - prior.log_sum,
        map_tree=tree,
        map_log_posterior=post.log_max - post.log_sum,
        log_prior_normalizer=prior.log_sum,
        log_posterior_normalizer=post.log_sum,
        map_ties=ties,
        reference_tree=reference,
        reference_log_prior=ref_prior,
        reference_log_posterior=ref_post,
        n_effective=counts.n_effective,
    )


def _minus(a: float, b: float) -> float:
    return LOG_ZERO if is_zero(a) else a - b


def posterior_prob(z, F: NodeWeightFunction, alpha: float, tree: ContextTree) -> float:
    """log posterior probability of ``tree``."""
    counts = _counts_for(z, F.space)
    post = build_recursion(F, q_alpha_levels(counts, alpha), alpha)
    if is_zero(post.log_sum):
        raise PriorError(f"prior {F.spec} gives every tree weight zero")
    return _minus(post.tree_log_value(tree), post.log_sum)


def prior_prob(F: NodeWeightFunction, tree: ContextTree) -> float:
    """log prior probability of ``tree`` under the prior proportional to ``F``."""
    return _minus(eval_tree(F, tree), _prior_table(F).log_sum)


def log_evidence_by_depth(z, F: NodeWeightFunction, alpha: float) -> np.ndarray:
    """``out[k]`` = log evidence of the prior ``F * D_k`` for k = 0..L.

    Entries are ``nan`` where ``F * D_k`` cannot be normalized.
    """
    counts = _counts_for(z, F.space)
    prior = build_recursion(F)
    post = build_recursion(F, q_alpha_levels(counts, alpha), alpha)
    num = truncated_log_sums(post.log_f)
    den = truncated_log_sums(prior.log_f)
    out = np.full(den.size, np.nan)
    ok = den > LOG_ZERO
    out[ok] = num[ok] - den[ok]
    return out
