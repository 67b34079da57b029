"""Sampling sequences from a context tree with transition probabilities."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ModelError
from .symbols import Alphabet, Sequence, parse_alphabet
from .trees import (
    ContextTree,
    TreeSpace,
    code_context,
    format_context,
    parse_context,
    suffix_map,
    validate_tree,
)

GENERATOR = "numpy.random.PCG64"
SIMPLEX_TOL = 1e-12


@dataclass(frozen=True)
class TransitionModel:
    tree: ContextTree
    probs: dict
    alphabet: Alphabet
    initial: str = "repeat"

    def __post_init__(self):
        if set(self.probs) != set(self.tree.leaves):
            missing = set(self.tree.leaves) - set(self.probs)
            extra = set(self.probs) - set(self.tree.leaves)
            raise ModelError(
                f"probability rows must match the leaves (missing {sorted(map(format_context, missing))}, "
                f"extra {sorted(map(format_context, extra))})"
            )
        for s, p in self.probs.items():
            p = np.asarray(p, dtype=float)
            if p.shape != (self.tree.m,):
                raise ModelError(f"leaf {format_context(s)}: expected {self.tree.m} probabilities")
            if (p < 0).any() or abs(p.sum() - 1.0) > SIMPLEX_TOL:
                raise ModelError(f"leaf {format_context(s)}: {p.tolist()} is not a probability vector")
        _initial_policy(self.initial, self.alphabet)


def _initial_policy(policy: str, alphabet: Alphabet):
    kind, _, arg = policy.partition(":")
    if kind == "repeat":
        return kind, alphabet.code(arg or alphabet.symbols[0])
    if kind == "given":
        return kind, alphabet.encode(arg)
    if kind == "uniform":
        return kind, None
    raise ModelError(f"unknown initial-symbol policy {policy!r} (use repeat:SYM, given:STRING or uniform)")


def _leaf_table(tree: ContextTree, m: int) -> tuple[list, list]:
    """Leaf index for every window of the last ``depth`` symbols.

    The window is keyed by its base-m value read oldest symbol first, which is
    what a rolling ``code * m + next`` update produces.
    """
    D = tree.depth
    leaves = list(tree)
    index = {s: i for i, s in enumerate(leaves)}
    table = [index[suffix_map(tree, code_context(c, D, m)[::-1])] for c in range(m**D)]
    return leaves, table


def sample_sequence(model: TransitionModel, n: int, seed: int, space: TreeSpace) -> Sequence:
    """Draw ``n`` symbols; the first ``L`` come from the initial policy."""
    m, L = space.m, space.L
    if model.tree.m != m:
        raise ModelError("model alphabet size differs from the tree space")
    if model.tree.depth > L:
        raise ModelError(f"model tree depth {model.tree.depth} exceeds L={L}")
    if n <= L:
        raise ModelError(f"n={n} must exceed L={L}")
    rng = np.random.Generator(np.random.PCG64(seed))
    z = np.empty(n, dtype=np.int64)
    kind, arg = _initial_policy(model.initial, model.alphabet)
    if kind == "repeat":
        z[:L] = arg
    elif kind == "given":
        if len(arg) < L:
            raise ModelError(f"initial string has {len(arg)} symbols, need {L}")
        z[:L] = arg[len(arg) - L:]
    else:
        z[:L] = rng.integers(0, m, size=L)

    leaves, table = _leaf_table(model.tree, m)
    cum = []
    for s in leaves:
        row = np.cumsum(model.probs[s]).tolist()
        row[-1] = 1.0
        cum.append(row)
    D = model.tree.depth
    mod = m**D
    code = 0
    for i in range(L - D, L):
        code = (code * m + int(z[i])) % mod
    u = rng.random(n - L).tolist()
    out = z.tolist()
    for t in range(L, n):
        row = cum[table[code]]
        x = u[t - L]
        k = 0
        while k < m - 1 and x >= row[k]:
            k += 1
        out[t] = k
        code = (code * m + k) % mod
    return Sequence(out, model.alphabet)


def _model(alphabet: Alphabet, rows: dict, space: TreeSpace) -> TransitionModel:
    leaves = [parse_context(k, alphabet) for k in rows]
    tree = validate_tree(leaves, space)
    probs = {parse_context(k, alphabet): tuple(v) for k, v in rows.items()}
    return TransitionModel(tree, probs, alphabet)


BUILTIN_MODELS = {
    "scenario-a": {
        "11": (0.4, 0.6),
        "101": (0.4, 0.6),
        "001": (0.8, 0.2),
        "110": (0.3, 0.7),
        "010": (0.7, 0.3),
        "100": (0.6, 0.4),
        "000": (0.9, 0.1),
    },
    "scenario-b": {
        "0": (0.1, 0.9),
        "01": (0.5, 0.5),
        "011": (0.5, 0.5),
        "0111": (0.5, 0.5),
        "1111": (0.9, 0.1),
    },
}


def builtin_model(name: str) -> TransitionModel:
    """The two binary generator models used in the simulation study."""
    try:
        rows = BUILTIN_MODELS[name]
    except KeyError:
        raise ModelError(f"unknown model {name!r}; choose from {sorted(BUILTIN_MODELS)}") from None
    alphabet = parse_alphabet("01")
    depth = max(len(k) for k in rows)
    return _model(alphabet, rows, TreeSpace(2, depth))


def parse_model_text(text: str, source: str = "<model>") -> tuple[TransitionModel, TreeSpace]:
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), 1)]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ModelError(f"{source}: empty model file")
    header = dict(tok.split("=", 1) for tok in lines[0][1].split() if "=" in tok)
    if "alphabet" not in header or "L" not in header:
        raise ModelError(f"{source}:{lines[0][0]}: header must read 'alphabet=<chars> L=<int>'")
    alphabet = parse_alphabet(header["alphabet"])
    try:
        space = TreeSpace(alphabet.m, int(header["L"]))
    except ValueError:
        raise ModelError(f"{source}: L must be an integer") from None
    rows = {}
    for lineno, line in lines[1:]:
        leaf, sep, rest = line.partition(":")
        if not sep:
            raise ModelError(f"{source}:{lineno}: expected '<leaf> : p0,p1,...'")
        try:
            probs = tuple(float(x) for x in rest.split(","))
        except ValueError:
            raise ModelError(f"{source}:{lineno}: bad probability list {rest.strip()!r}") from None
        rows[leaf.strip()] = probs
    initial = header.get("initial", "repeat")
    model = _model(alphabet, rows, space)
    return TransitionModel(model.tree, model.probs, alphabet, initial), space


def load_model(path) -> tuple[TransitionModel, TreeSpace]:
    return parse_model_text(Path(path).read_text(encoding="utf-8"), str(path))


def format_model(model: TransitionModel, L: int) -> str:
    out = [f"alphabet={model.alphabet.spec} L={L}"]
    for s in model.tree:
        probs = ",".join(f"{p:.12g}" for p in model.probs[s])
        out.append(f"{format_context(s, model.alphabet)} : {probs}")
    return "\n".join(out) + "\n"
