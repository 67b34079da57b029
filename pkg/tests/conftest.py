import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bct.symbols import parse_alphabet  # noqa: E402
from bct.trees import TreeSpace, parse_context, validate_tree  # noqa: E402

TREE_A = "000 100 010 110 001 101 11".split()
TREE_B = "0 01 011 0111 1111".split()


@pytest.fixture
def binary():
    return parse_alphabet("01")


@pytest.fixture
def space10():
    return TreeSpace(2, 10)


def make_tree(labels, space, alphabet=None):
    alphabet = alphabet or parse_alphabet("01")
    return validate_tree([parse_context(x, alphabet) for x in labels], space)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
