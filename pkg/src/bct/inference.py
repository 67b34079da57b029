"""Bayes factors and sequential depth / model selection."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .counts import CountTable
from .engine import LOG10_E, _counts_for, evidence, log_evidence_by_depth
from .errors import PriorError
from .trees import TreeSpace
from .weights import DepthIndicator, NodeWeightFunction, Unity, product

# Kass & Raftery grades for |log10 BF|
_GRADES = ((0.5, "negligible"), (1.0, "substantial"), (2.0, "strong"))


def interpret(log10_bf: float) -> str:
    size = abs(log10_bf)
    for bound, label in _GRADES:
        if size < bound:
            return label
    return "decisive"


@dataclass(frozen=True)
class BayesFactorReport:
    log10_bf: float
    numerator_model: str
    denominator_model: str
    alpha: float
    log10_evidence_numerator: float
    log10_evidence_denominator: float

    @property
    def interpretation(self) -> str:
        return interpret(self.log10_bf)

    @property
    def favours(self) -> str:
        return self.numerator_model if self.log10_bf >= 0 else self.denominator_model


def bayes_factor(z, F: NodeWeightFunction, G: NodeWeightFunction, alpha: float) -> BayesFactorReport:
    """log10 of E(z; F) / E(z; G)."""
    counts = _counts_for(z, F.space)
    ef = evidence(counts, F, alpha).log10_evidence
    eg = evidence(_counts_for(counts, G.space), G, alpha).log10_evidence
    return BayesFactorReport(ef - eg, F.spec, G.spec, alpha, ef, eg)


@dataclass(frozen=True)
class TraceStep:
    stage: str
    incumbent: str
    challenger: str
    log10_bf: float
    switched: bool


@dataclass
class SelectionTrace:
    steps: list = field(default_factory=list)
    selection: str = ""
    best_candidate: str = ""
    best_depth: int = -1
    depths: dict = field(default_factory=dict)
    log10_evidence: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.steps)


def _sequential_depth(log10_e: np.ndarray, c: float, label: str, stage: str, trace: SelectionTrace) -> int:
    L = log10_e.size - 1
    l = L
    for k in range(L - 1, -1, -1):
        if math.isnan(log10_e[l]):
            # incumbent not normalizable: any normalizable challenger wins
            bf = -math.inf if not math.isnan(log10_e[k]) else math.nan
        elif math.isnan(log10_e[k]):
            bf = math.inf
        else:
            bf = float(log10_e[l] - log10_e[k])
        switched = bf < c
        trace.steps.append(TraceStep(stage, f"{label}*depth:{l}", f"{label}*depth:{k}", bf, switched))
        if switched:
            l = k
    return l


def select_depth(z, space: TreeSpace, alpha: float, c: float = 0.0) -> tuple[int, SelectionTrace]:
    """Start at depth L and step down, moving to depth k whenever log10 BF(D_l, D_k) < c."""
    counts = _counts_for(z, space)
    log10_e = log_evidence_by_depth(counts, Unity(space), alpha) * LOG10_E
    trace = SelectionTrace()
    l = _sequential_depth(log10_e, c, "unity", "depth", trace)
    trace.selection = f"depth:{l}"
    trace.best_candidate, trace.best_depth = "unity", l
    trace.depths["unity"] = l
    trace.log10_evidence = {f"depth:{k}": float(v) for k, v in enumerate(log10_e)}
    return l, trace


def select_model(
    z,
    space: TreeSpace,
    alpha: float,
    candidates: list,
    c1: float = 0.0,
    c2: float = 0.0,
) -> tuple[NodeWeightFunction, SelectionTrace]:
    """Pick a depth for every candidate prior, then compare the winners in order.

    Returns the product ``F * D_l`` of the chosen candidate and its depth.
    """
    if not candidates:
        raise ValueError("select_model needs at least one candidate")
    counts: CountTable = _counts_for(z, space)
    trace = SelectionTrace()
    picked = []
    for F in candidates:
        log10_e = log_evidence_by_depth(counts, F, alpha) * LOG10_E
        l = _sequential_depth(log10_e, c1, F.spec, "depth", trace)
        if math.isnan(log10_e[l]):
            raise PriorError(f"candidate {F.spec} cannot be normalized at any depth")
        trace.depths[F.spec] = l
        trace.log10_evidence[f"{F.spec}*depth:{l}"] = float(log10_e[l])
        picked.append((F, l, float(log10_e[l])))

    best_F, best_l, best_e = picked[0]
    for F, l, e in picked[1:]:
        bf = best_e - e
        switched = bf < c2
        trace.steps.append(
            TraceStep("model", f"{best_F.spec}*depth:{best_l}", f"{F.spec}*depth:{l}", bf, switched)
        )
        if switched:
            best_F, best_l, best_e = F, l, e
    trace.selection = f"{best_F.spec}*depth:{best_l}"
    trace.best_candidate, trace.best_depth = best_F.spec, best_l
    return product(best_F, DepthIndicator(space, best_l)), trace
