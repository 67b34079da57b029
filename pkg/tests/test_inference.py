import math

import numpy as np
import pytest

from bct.engine import evidence, log_evidence_by_depth
from bct.inference import bayes_factor, interpret, select_depth, select_model
from bct.symbols import Sequence, parse_alphabet
from bct.trees import TreeSpace
from bct.weights import CTW, DepthIndicator, GeneralCTW, RenewalIndicator, TargetDepth, Unity, product

BIN = parse_alphabet("01")
Z5 = Sequence([0, 1, 0, 1, 1], BIN)


def _random_seq(seed, n=200, m=2):
    return Sequence(np.random.default_rng(seed).integers(0, m, n), parse_alphabet("abc"[:m]))


@pytest.mark.parametrize("x,label", [
    (0.0, "negligible"), (0.49, "negligible"), (-0.49, "negligible"), (0.5, "substantial"),
    (-0.99, "substantial"), (1.0, "strong"), (1.99, "strong"), (2.0, "decisive"), (-7, "decisive"),
])
def test_interpret(x, label):
    assert interpret(x) == label


def test_small_bayes_factor():
    space = TreeSpace(2, 1)
    r = bayes_factor(Z5, DepthIndicator(space, 1), DepthIndicator(space, 0), 0.5)
    assert r.log10_bf == pytest.approx(math.log10(0.04296875 / 0.0390625), abs=1e-12)
    assert r.log10_bf == pytest.approx(0.0414, abs=1e-4)
    assert r.interpretation == "negligible"
    assert r.favours == "depth:1"


def test_self_factor_is_zero():
    space = TreeSpace(2, 4)
    assert bayes_factor(_random_seq(1), CTW(space), CTW(space), 0.5).log10_bf == 0.0


def test_antisymmetry_and_chain_rule():
    space = TreeSpace(2, 4)
    F, G, H = CTW(space), GeneralCTW(space, 0.7), TargetDepth(space, 2, 1)
    for seed in range(5):
        z = _random_seq(seed)
        fg = bayes_factor(z, F, G, 0.5).log10_bf
        gf = bayes_factor(z, G, F, 0.5).log10_bf
        gh = bayes_factor(z, G, H, 0.5).log10_bf
        fh = bayes_factor(z, F, H, 0.5).log10_bf
        assert fg == pytest.approx(-gf, abs=1e-9)
        assert fh == pytest.approx(fg + gh, abs=1e-9)


def test_depth_selection_trace():
    space = TreeSpace(2, 6)
    z = _random_seq(2, 400)
    l, trace = select_depth(z, space, 0.5)
    assert len(trace) == space.L
    assert trace.selection == f"depth:{l}"
    by_depth = log_evidence_by_depth(z, Unity(space), 0.5) / math.log(10)
    # replay the rule from the recorded evidences
    cur = space.L
    for k in range(space.L - 1, -1, -1):
        if by_depth[cur] - by_depth[k] < 0:
            cur = k
    assert cur == l


def test_depth_selection_boundaries():
    space = TreeSpace(2, 5)
    z = _random_seq(3, 300)
    assert select_depth(z, space, 0.5, c=-math.inf)[0] == space.L
    assert select_depth(z, space, 0.5, c=math.inf)[0] == 0


def test_iid_uniform_prefers_depth_zero():
    space = TreeSpace(2, 5)
    picks = [select_depth(_random_seq(s, 60), space, 0.5)[0] for s in range(10)]
    assert picks.count(0) > 5


def test_model_selection_single_candidate():
    space = TreeSpace(2, 5)
    z = _random_seq(4, 300)
    best, trace = select_model(z, space, 0.5, [Unity(space)])
    l, _ = select_depth(z, space, 0.5)
    assert best == product(Unity(space), DepthIndicator(space, l))
    assert len(trace) == space.L


def test_model_selection_trace_length():
    space = TreeSpace(2, 4)
    z = _random_seq(5, 300)
    cands = [CTW(space), RenewalIndicator(space, 0), GeneralCTW(space, 0.2)]
    _, trace = select_model(z, space, 0.5, cands)
    assert len(trace) == len(cands) * space.L + len(cands) - 1


def test_model_selection_returns_winning_evidence():
    space = TreeSpace(2, 4)
    z = _random_seq(6, 500)
    cands = [CTW(space), TargetDepth(space, 3, 1), GeneralCTW(space, 0.2)]
    best, trace = select_model(z, space, 0.5, cands, c1=0, c2=0)
    # with c2 = 0 the final pick has the largest evidence among the depth-restricted winners
    winners = {k: v for k, v in trace.log10_evidence.items() if "*depth:" in k}
    assert trace.selection == max(winners, key=winners.get)
    assert evidence(z, best, 0.5).log10_evidence == pytest.approx(winners[trace.selection], abs=1e-9)


def test_model_selection_needs_candidates():
    with pytest.raises(ValueError):
        select_model(Z5, TreeSpace(2, 1), 0.5, [])


def test_renewal_structure_is_detected():
    # a 0-renewing source with strong memory after runs of 1s
    from bct.simulate import builtin_model, sample_sequence
    space = TreeSpace(2, 10)
    z = sample_sequence(builtin_model("scenario-b"), 1000, 0, space)
    cands = [DepthIndicator(space, 10), CTW(space), RenewalIndicator(space, 0)]
    _, trace = select_model(z, space, 0.5, cands)
    assert trace.best_candidate == "renewal:0"
