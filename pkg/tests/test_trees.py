import itertools

import pytest

from bct.errors import BudgetError, TreeError
from bct.symbols import parse_alphabet
from bct.trees import (
    ROOT,
    TreeSpace,
    code_context,
    context_code,
    enumerate_trees,
    maximal_tree,
    parse_tree_file,
    root_tree,
    structural_distance,
    suffix_map,
    validate_tree,
    write_tree_file,
)
from conftest import TREE_A, make_tree
from oracles import all_trees, inner_nodes, leaf_for


def test_depth3_tree_inner_nodes():
    space = TreeSpace(2, 3)
    t = make_tree(TREE_A, space)
    assert sorted(t.inner_nodes) == sorted([(), (0,), (1,), (0, 0), (1, 0), (0, 1)])
    assert t.depth == 3


def test_root_tree_valid():
    t = validate_tree([ROOT], TreeSpace(2, 3))
    assert t.inner_nodes == frozenset()
    assert t == root_tree(TreeSpace(2, 3))


def test_suffix_violation_names_pair():
    with pytest.raises(TreeError, match="leaf 0 is a suffix of leaf 00"):
        validate_tree([(0,), (0, 0)], TreeSpace(2, 3))


def test_missing_sibling():
    with pytest.raises(TreeError, match="inner node 1 is missing child 11"):
        validate_tree([(0,), (0, 1)], TreeSpace(2, 3))


def test_depth_overflow():
    with pytest.raises(TreeError, match="deeper"):
        validate_tree([(0, 0), (1, 0), (1,)], TreeSpace(2, 1))


@pytest.mark.parametrize("past,leaf", [([1, 1, 0], (0,)), ([1, 0, 1], (0, 1)), ([0, 1, 1], (1, 1))])
def test_suffix_map(past, leaf):
    t = make_tree(["0", "01", "11"], TreeSpace(2, 2))
    assert suffix_map(t, past) == leaf
    assert suffix_map(t, past) == leaf_for(t.leaves, past)


def test_suffix_map_root_tree():
    assert suffix_map(root_tree(TreeSpace(2, 0)), [1, 0]) == ROOT
    assert suffix_map(root_tree(TreeSpace(2, 0)), []) == ROOT


def test_suffix_map_short_past():
    t = make_tree(["0", "01", "11"], TreeSpace(2, 2))
    with pytest.raises(TreeError):
        suffix_map(t, [1])


def test_suffix_map_property_all_pasts():
    space = TreeSpace(2, 3)
    for t in enumerate_trees(space):
        for past in itertools.product(range(2), repeat=3):
            s = suffix_map(t, past)
            assert s in t.leaves
            assert tuple(past[len(past) - len(s):]) == s


def test_example_distance():
    space = TreeSpace(2, 2)
    t1 = make_tree(["0", "01", "11"], space)
    t2 = make_tree(["00", "10", "1"], space)
    assert structural_distance(t1, t2) == 2
    assert structural_distance(t1, t1) == 0
    assert structural_distance(root_tree(space), make_tree(["0", "1"], space)) == 1


def test_maximal_tree():
    assert maximal_tree(TreeSpace(2, 2)).leaves == {(0, 0), (1, 0), (0, 1), (1, 1)}
    assert maximal_tree(TreeSpace(2, 0)).leaves == {ROOT}
    assert len(maximal_tree(TreeSpace(3, 2))) == 9


def test_maximal_tree_budget():
    with pytest.raises(BudgetError):
        maximal_tree(TreeSpace(2, 10), budget=100)


def test_node_budget_env(monkeypatch):
    monkeypatch.setenv("BCT_NODE_BUDGET", "10")
    with pytest.raises(BudgetError, match="BCT_NODE_BUDGET"):
        TreeSpace(2, 3).check_budget()


def test_node_count():
    assert TreeSpace(2, 10).node_count == 2047
    assert TreeSpace(3, 2).node_count == 13


@pytest.mark.parametrize("m,L,count", [(2, 0, 1), (2, 1, 2), (2, 2, 5), (2, 3, 26), (2, 4, 677), (3, 1, 2), (3, 2, 9)])
def test_enumeration_counts(m, L, count):
    space = TreeSpace(m, L)
    trees = list(enumerate_trees(space))
    assert len(trees) == count == space.tree_count()
    assert len(set(trees)) == count


@pytest.mark.parametrize("m,L", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_enumeration_matches_growth_oracle(m, L):
    space = TreeSpace(m, L)
    trees = {t.leaves for t in enumerate_trees(space)}
    assert trees == set(all_trees(m, L))
    for leaves in trees:
        t = validate_tree(leaves, space)
        assert t.inner_nodes == inner_nodes(leaves)


def test_enumeration_bound():
    with pytest.raises(BudgetError):
        list(enumerate_trees(TreeSpace(2, 5), bound=1000))


def test_distance_is_metric_exhaustive():
    trees = list(enumerate_trees(TreeSpace(2, 3)))
    D = {(a, b): structural_distance(a, b) for a in trees for b in trees}
    for a in trees:
        for b in trees:
            assert (D[a, b] == 0) == (a == b)
            assert D[a, b] == D[b, a]
            for c in trees:
                assert D[a, c] <= D[a, b] + D[b, c]


def test_node_code_round_trip():
    for d in range(4):
        for r in range(2**d):
            assert context_code(code_context(r, d, 2), 2) == r
    # most recent symbol is the most significant digit
    assert context_code((0, 1), 2) == 2
    assert context_code((1, 0), 2) == 1


def test_parse_tree_file(tmp_path, binary):
    space = TreeSpace(2, 3)
    p = tmp_path / "t.tree"
    p.write_text("11\n0\n01\n")
    assert parse_tree_file(p, binary, space) == make_tree(["0", "01", "11"], space)


def test_parse_tree_file_root(tmp_path, binary):
    space = TreeSpace(2, 3)
    p = tmp_path / "t.tree"
    p.write_text("λ\n")
    assert parse_tree_file(p, binary, space) == root_tree(space)
    p.write_text("\n")
    assert parse_tree_file(p, binary, space) == root_tree(space)


def test_parse_tree_file_suffix_line(tmp_path, binary):
    p = tmp_path / "t.tree"
    p.write_text("0\n00\n")
    with pytest.raises(TreeError, match="line 2"):
        parse_tree_file(p, binary, TreeSpace(2, 3))


def test_parse_tree_file_bad_symbol(tmp_path, binary):
    p = tmp_path / "t.tree"
    p.write_text("0\n2\n")
    with pytest.raises(TreeError, match="line 2"):
        parse_tree_file(p, binary, TreeSpace(2, 3))


def test_tree_file_round_trip(tmp_path, binary):
    space = TreeSpace(2, 3)
    for t in enumerate_trees(space):
        p = tmp_path / "t.tree"
        write_tree_file(t, p, binary)
        assert parse_tree_file(p, binary, space) == t
