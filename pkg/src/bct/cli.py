"""Command-line interface: ``bct <command> ...``.

Exit status 0 on success, 1 on data or validation errors, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import __version__
from .counts import build_counts
from .engine import LOG10_E, evidence, posterior_prob, prior_prob
from .errors import BCTError
from .inference import bayes_factor, select_depth, select_model
from .simulate import GENERATOR, builtin_model, load_model, sample_sequence
from .symbols import load_sequence, parse_alphabet, write_sequence
from .trees import (
    ContextTree,
    TreeSpace,
    parse_context,
    parse_tree_file,
    structural_distance,
    write_tree_file,
)
from .weights import parse_prior


def num(x):
    """Round to 12 significant digits; non-finite values become None."""
    if x is None:
        return None
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.12g}")


def logprob(ln_value) -> dict:
    p = None if ln_value is None else (0.0 if ln_value == -math.inf else math.exp(ln_value))
    return {
        "ln": num(ln_value),
        "log10": num(None if ln_value is None else ln_value * LOG10_E),
        "prob": num(p),
    }


class _Ctx:
    def __init__(self, args):
        self.args = args
        self.alphabet = parse_alphabet(args.alphabet)
        L = getattr(args, "max_depth", None)
        self.space = TreeSpace(self.alphabet.m, L) if L is not None else None

    def prior(self, text):
        return parse_prior(text, self.space, self.alphabet)

    def data(self):
        return load_sequence(self.args.data, self.alphabet, self.args.data_format)

    def tree(self, path):
        return parse_tree_file(path, self.alphabet, self.space)

    def labels(self, tree: ContextTree):
        return tree.labels(self.alphabet)


def _meta(args, **extra) -> dict:
    config = {k: v for k, v in vars(args).items() if k != "func"}
    meta = {"tool": "bct", "version": __version__, "config": config}
    meta.update(extra)
    return meta


def _summary_payload(ctx: _Ctx, s, prior_spec: str) -> dict:
    out = {
        "prior": prior_spec,
        "alpha": ctx.args.alpha,
        "L": ctx.space.L,
        "n_transitions": s.n_effective,
        "log_evidence": {"ln": num(s.log_evidence), "log10": num(s.log10_evidence)},
        "map_tree": ctx.labels(s.map_tree),
        "map_log_posterior": logprob(s.map_log_posterior),
        "map_ties": s.map_ties,
    }
    if s.reference_tree is not None:
        out["reference_tree"] = ctx.labels(s.reference_tree)
        out["reference_prior"] = logprob(s.reference_log_prior)
        out["reference_posterior"] = logprob(s.reference_log_posterior)
        out["distance_reference_map"] = structural_distance(s.reference_tree, s.map_tree)
    return out


def cmd_evidence(ctx: _Ctx):
    a = ctx.args
    ref = ctx.tree(a.tree) if a.tree else None
    s = evidence(ctx.data(), ctx.prior(a.prior), a.alpha, ref)
    return _summary_payload(ctx, s, a.prior)


def cmd_map(ctx: _Ctx):
    payload = cmd_evidence(ctx)
    if ctx.args.tree_out:
        leaves = [parse_context(x, ctx.alphabet) for x in payload["map_tree"]]
        write_tree_file(ContextTree(frozenset(leaves), ctx.alphabet.m), ctx.args.tree_out, ctx.alphabet)
        payload["tree_file"] = str(ctx.args.tree_out)
    return payload


def cmd_posterior(ctx: _Ctx):
    a = ctx.args
    tree = ctx.tree(a.tree)
    lp = posterior_prob(ctx.data(), ctx.prior(a.prior), a.alpha, tree)
    return {"prior": a.prior, "alpha": a.alpha, "tree": ctx.labels(tree), "posterior": logprob(lp)}


def cmd_prior(ctx: _Ctx):
    a = ctx.args
    tree = ctx.tree(a.tree)
    lp = prior_prob(ctx.prior(a.prior), tree)
    return {"prior": a.prior, "tree": ctx.labels(tree), "prior_probability": logprob(lp)}


def cmd_bf(ctx: _Ctx):
    a = ctx.args
    rep = bayes_factor(ctx.data(), ctx.prior(a.prior), ctx.prior(a.vs), a.alpha)
    return {
        "numerator": rep.numerator_model,
        "denominator": rep.denominator_model,
        "alpha": a.alpha,
        "log10_bf": num(rep.log10_bf),
        "ln_bf": num(rep.log10_bf / LOG10_E),
        "log10_evidence": {
            rep.numerator_model: num(rep.log10_evidence_numerator),
            rep.denominator_model: num(rep.log10_evidence_denominator),
        },
        "interpretation": rep.interpretation,
        "favours": rep.favours,
    }


def _trace_rows(trace):
    return [
        {
            "stage": st.stage,
            "incumbent": st.incumbent,
            "challenger": st.challenger,
            "log10_bf": num(st.log10_bf),
            "switched": st.switched,
        }
        for st in trace.steps
    ]


def cmd_select_depth(ctx: _Ctx):
    a = ctx.args
    depth, trace = select_depth(ctx.data(), ctx.space, a.alpha, a.c)
    return {
        "selected_depth": depth,
        "threshold": a.c,
        "log10_evidence": {k: num(v) for k, v in trace.log10_evidence.items()},
        "rows": _trace_rows(trace),
    }


def cmd_select_model(ctx: _Ctx):
    a = ctx.args
    z = build_counts(ctx.data(), ctx.space)
    cands = [ctx.prior(p) for p in a.priors]
    best, trace = select_model(z, ctx.space, a.alpha, cands, a.c1, a.c2)
    s = evidence(z, best, a.alpha)
    return {
        "selected": {"prior": trace.best_candidate, "depth": trace.best_depth},
        "selected_model": best.spec,
        "log10_evidence": num(s.log10_evidence),
        "map_tree": ctx.labels(s.map_tree),
        "depths": trace.depths,
        "candidate_log10_evidence": {k: num(v) for k, v in trace.log10_evidence.items()},
        "rows": _trace_rows(trace),
    }


def cmd_distance(ctx: _Ctx):
    a = ctx.args
    if ctx.space is None:
        depth = 0
        for path in (a.tree_a, a.tree_b):
            for line in Path(path).read_text(encoding="utf-8").splitlines():
                line = line.strip()
                if line and line != "λ" and not line.startswith("#"):
                    depth = max(depth, len(line))
        ctx.space = TreeSpace(ctx.alphabet.m, depth)
    ta, tb = ctx.tree(a.tree_a), ctx.tree(a.tree_b)
    return {"tree_a": ctx.labels(ta), "tree_b": ctx.labels(tb), "distance": structural_distance(ta, tb)}


def _load_model(ctx: _Ctx):
    a = ctx.args
    if a.model_file:
        model, space = load_model(a.model_file)
        L = a.max_depth if a.max_depth is not None else space.L
    else:
        model = builtin_model(a.model)
        L = a.max_depth if a.max_depth is not None else model.tree.depth
    space = TreeSpace(model.tree.m, L)
    ctx.alphabet, ctx.space = model.alphabet, space
    return model, space


def cmd_simulate(ctx: _Ctx):
    a = ctx.args
    model, space = _load_model(ctx)
    z = sample_sequence(model, a.n, a.seed, space)
    if a.sequence_out:
        write_sequence(z, a.sequence_out)
    out = {
        "model": a.model_file or a.model,
        "tree": ctx.labels(model.tree),
        "n": z.n,
        "L": space.L,
        "seed": a.seed,
        "generator": GENERATOR,
        "initial": model.initial,
    }
    if a.sequence_out:
        out["sequence_file"] = str(a.sequence_out)
    else:
        out["sequence"] = z.to_text()
    return out


REPORT_COLUMNS = ["F", "n", "seed", "delta", "prior", "posterior", "log10_evidence", "map_tree"]
SUMMARY_COLUMNS = [
    "F", "n", "seeds", "mean_delta", "exact_map_fraction", "prior", "mean_posterior", "mean_log10_evidence",
]


def report_rows(model, space: TreeSpace, priors: list, ns: list, seeds: list, alpha: float):
    """One row per (n, seed, prior); rows come out in that sorted order."""
    weights = [(p, parse_prior(p, space, model.alphabet)) for p in priors]
    rows = []
    for n in sorted(ns):
        for seed in sorted(seeds):
            counts = build_counts(sample_sequence(model, n, seed, space), space)
            for spec, F in weights:
                s = evidence(counts, F, alpha, model.tree)
                rows.append({
                    "F": spec,
                    "n": n,
                    "seed": seed,
                    "delta": structural_distance(model.tree, s.map_tree),
                    "prior": math.exp(s.reference_log_prior),
                    "posterior": math.exp(s.reference_log_posterior),
                    "log10_evidence": s.log10_evidence,
                    "map_tree": " ".join(s.map_tree.labels(model.alphabet)),
                })
    return rows


def summarize(rows, priors):
    out = []
    for n in sorted({r["n"] for r in rows}):
        for spec in priors:
            sel = [r for r in rows if r["n"] == n and r["F"] == spec]
            k = len(sel)
            out.append({
                "F": spec,
                "n": n,
                "seeds": k,
                "mean_delta": sum(r["delta"] for r in sel) / k,
                "exact_map_fraction": sum(r["delta"] == 0 for r in sel) / k,
                "prior": sel[0]["prior"],
                "mean_posterior": sum(r["posterior"] for r in sel) / k,
                "mean_log10_evidence": round(sum(r["log10_evidence"] for r in sel) / k, 2),
            })
    return out


def _csv_text(rows, columns, meta) -> str:
    buf = io.StringIO()
    buf.write(f"# {meta['tool']} {meta['version']} generator={meta['generator']}\n")
    buf.write("# config: " + json.dumps(meta["config"], sort_keys=True) + "\n")
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.12g}" if isinstance(v, float) else v) for k, v in r.items() if k in columns})
    return buf.getvalue()


def cmd_report(ctx: _Ctx):
    a = ctx.args
    model, space = _load_model(ctx)
    rows = report_rows(model, space, a.priors, a.n, a.seeds, a.alpha)
    summary = summarize(rows, a.priors)
    meta = _meta(a, generator=GENERATOR, seeds=sorted(a.seeds))
    outdir = Path(a.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    table_path = outdir / "table.csv"
    summary_path = outdir / "summary.csv"
    table_path.write_text(_csv_text(rows, REPORT_COLUMNS, meta), encoding="utf-8")
    summary_path.write_text(_csv_text(summary, SUMMARY_COLUMNS, meta), encoding="utf-8")
    return {"table": str(table_path), "summary": str(summary_path), "rows": len(rows)}


def _flatten(d, prefix=""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            continue
        elif isinstance(v, list):
            yield key, " ".join(map(str, v))
        else:
            yield key, v


def _emit(payload: dict, args) -> str:
    if args.format == "json":
        return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    buf = io.StringIO()
    meta = payload["meta"]
    buf.write(f"# {meta['tool']} {meta['version']}\n")
    rows = payload.get("rows")
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    else:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["field", "value"])
        for k, v in _flatten({k: v for k, v in payload.items() if k != "meta"}):
            w.writerow([k, v])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bct", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"bct {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help, data=False, prior=False, depth=True):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        sp.add_argument("--alphabet", default="01", help="symbols in code order (default 01)")
        if depth:
            sp.add_argument("-L", "--max-depth", type=int, required=True, help="maximal tree depth")
        if data:
            sp.add_argument("--data", required=True, help="sequence file")
            sp.add_argument("--data-format", choices=["chars", "csv-int"], default="chars")
            sp.add_argument("--alpha", type=float, default=0.5, help="Dirichlet parameter (default 0.5)")
        if prior:
            sp.add_argument("--prior", required=True, help="prior spec, e.g. ctw or target:8,3*depth:5")
        sp.add_argument("-o", "--output", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        return sp

    sp = add("evidence", cmd_evidence, "log evidence and MAP tree", data=True, prior=True)
    sp.add_argument("--tree", help="reference tree file")
    sp = add("map", cmd_map, "MAP tree", data=True, prior=True)
    sp.add_argument("--tree", help="reference tree file")
    sp.add_argument("--tree-out", help="write the MAP tree to this tree file")
    sp = add("posterior", cmd_posterior, "posterior probability of a tree", data=True, prior=True)
    sp.add_argument("--tree", required=True)
    sp = add("prior", cmd_prior, "prior probability of a tree", prior=True)
    sp.add_argument("--tree", required=True)
    sp = add("bf", cmd_bf, "Bayes factor of two priors", data=True, prior=True)
    sp.add_argument("--vs", required=True, help="denominator prior spec")
    sp = add("select-depth", cmd_select_depth, "sequential maximal depth selection", data=True)
    sp.add_argument("-c", type=float, default=0.0, help="log10 BF threshold (default 0)")
    sp = add("select-model", cmd_select_model, "sequential model selection", data=True)
    sp.add_argument("--priors", nargs="+", required=True, help="candidate prior specs, in order")
    sp.add_argument("--c1", type=float, default=0.0)
    sp.add_argument("--c2", type=float, default=0.0)
    sp = sub.add_parser("distance", help="structural distance between two tree files")
    sp.set_defaults(func=cmd_distance)
    sp.add_argument("--alphabet", default="01")
    sp.add_argument("-L", "--max-depth", type=int, default=None)
    sp.add_argument("--tree-a", required=True)
    sp.add_argument("--tree-b", required=True)
    sp.add_argument("-o", "--output")
    sp.add_argument("--format", choices=["json", "csv"], default="json")

    for name, func, help in (
        ("simulate", cmd_simulate, "sample a sequence from a model"),
        ("report", cmd_report, "simulation-study tables as CSV"),
    ):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func, alphabet="01")
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--model", choices=["scenario-a", "scenario-b"])
        src.add_argument("--model-file")
        sp.add_argument("-L", "--max-depth", type=int, default=None)
        sp.add_argument("-o", "--output")
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        if name == "simulate":
            sp.add_argument("-n", type=int, required=True)
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--sequence-out", help="write the sequence here")
        else:
            sp.add_argument("--priors", nargs="+", required=True)
            sp.add_argument("-n", "--n", nargs="+", type=int, required=True)
            sp.add_argument("--seeds", nargs="+", type=int, default=[0])
            sp.add_argument("--alpha", type=float, default=0.5)
            sp.add_argument("--output-dir", required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "alpha", 1.0) <= 0:
        parser.error("--alpha must be positive")
    try:
        ctx = _Ctx(args)
        payload = args.func(ctx)
        payload["meta"] = _meta(args, generator=GENERATOR)
        text = _emit(payload, args)
    except (BCTError, OSError, ValueError) as exc:
        print(f"bct: error: {exc}", file=sys.stderr)
        return 1
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
