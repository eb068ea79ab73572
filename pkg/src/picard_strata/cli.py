"""Command-line interface.

Exit status: 0 on success, 2 on invalid input, 1 when an internal invariant
(a combinatorial claim, or oracle agreement) fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from picard_strata import balance, degree_class, oracle, strata
from picard_strata.balance import Multidegree
from picard_strata.dual_graph import DualGraph, stable_model
from picard_strata.errors import InvariantViolation, ValidationError

FORMAT = 1


def _load_graph(path: str) -> DualGraph:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read graph file {path!r}: {exc.strerror}") from None
    return DualGraph.from_json(text)


def _parse_multidegree(text: str) -> list[int]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed multidegree JSON: {exc}") from None
    if not isinstance(data, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in data):
        raise ValidationError("multidegree must be a JSON array of integers")
    return data


def _multidegree_arg(args, graph: DualGraph) -> Multidegree:
    if args.md_file:
        try:
            text = Path(args.md_file).read_text(encoding="utf-8")
        except OSError as exc:
            raise ValidationError(f"cannot read multidegree file {args.md_file!r}: {exc.strerror}") from None
    elif args.multidegree is not None:
        text = args.multidegree
    else:
        raise ValidationError("pass --multidegree or --md-file")
    md = Multidegree(graph, tuple(_parse_multidegree(text)))
    if args.degree is not None and md.total != args.degree:
        raise ValidationError(f"multidegree sums to {md.total}, not --degree {args.degree}")
    return md


def _emit(payload: dict | list) -> str:
    return json.dumps(payload, sort_keys=False)


def _table(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    cells = [[str(h) for h in header]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in cells)


# -- commands -------------------------------------------------------------------

def cmd_classify(args) -> str:
    graph = _load_graph(args.graph)
    md = _multidegree_arg(args, graph)
    verdict = balance.classify(md)
    if args.json:
        return _emit({"format": FORMAT, "vertices": list(graph.ids), "degree": md.total,
                      "multidegree": md.to_json(), "class": str(verdict)})
    return str(verdict)


def cmd_balanced(args) -> str:
    graph = _load_graph(args.graph)
    mds = balance.enumerate_balanced(graph, args.degree)
    classes = balance.classify_many(graph, [m.degrees for m in mds], args.degree) if mds else []
    pairs = [(m, c) for m, c in zip(mds, classes)
             if not args.stably_only or c is balance.BalanceClass.STABLY_BALANCED]
    general = all(c is balance.BalanceClass.STABLY_BALANCED for c in classes)
    if args.json:
        return _emit({
            "format": FORMAT, "vertices": list(graph.ids), "degree": args.degree,
            "genus": graph.genus, "d_general": general,
            "multidegrees": [{"multidegree": m.to_json(), "class": str(c)} for m, c in pairs],
        })
    head = (f"# genus {graph.genus}, degree {args.degree}, "
            f"{'d-general' if general else 'd-special'}, {len(pairs)} multidegrees")
    return head + "\n" + _table(list(graph.ids) + ["class"], [list(m.degrees) + [c] for m, c in pairs])


def cmd_class_group(args) -> str:
    graph = _load_graph(args.graph)
    group = degree_class.class_group(graph)
    reps = degree_class.class_representatives(graph, args.degree) if args.degree is not None else None
    if args.json:
        out = {"format": FORMAT, "vertices": list(graph.ids),
               "invariant_factors": list(group.invariant_factors), "order": group.order}
        if reps is not None:
            out["degree"] = args.degree
            out["representatives"] = [m.to_json() for m in reps]
        return _emit(out)
    factors = " x ".join(f"Z/{x}" for x in group.invariant_factors) or "trivial"
    text = f"invariant factors: {list(group.invariant_factors)}\norder: {group.order}\ngroup: {factors}"
    if reps is not None:
        text += f"\n# semibalanced representatives, degree {args.degree}\n"
        text += _table(list(graph.ids), [m.degrees for m in reps])
    return text


def cmd_strata_generators(args) -> str:
    gens = strata.enumerate_special_vine_generators(args.genus, args.degree)
    inv = strata.gcd_invariant(args.genus, args.degree)
    if args.json:
        return _emit({"format": FORMAT, "genus": args.genus, "degree": args.degree, "gcd": inv.value,
                      "generators": [v.to_json() for v in gens]})
    head = f"# genus {args.genus}, degree {args.degree}, G_d = {inv.value}, {len(gens)} generators"
    return head + "\n" + _table(["g1", "g2", "k", "m"],
                                [(v.g1, v.g2, v.k, ",".join(map(str, v.m_values))) for v in gens])


def cmd_lattice(args) -> str:
    lat = strata.divisor_lattice(args.genus)
    if args.dot:
        return lat.to_dot().rstrip("\n")
    if args.json:
        return _emit(lat.to_json())
    return f"# genus {lat.g}: divisors of {lat.bottom}\n" + _table(
        ["M", "degree", "contained in"],
        [(M, lat.degree_for(M), ",".join(str(b) for a, b in lat.covers if a == M) or "-")
         for M in lat.nodes])


def cmd_stable_model(args) -> str:
    graph = _load_graph(args.graph)
    model = stable_model(graph)
    if args.dot:
        return model.to_dot().rstrip("\n")
    if args.json:
        return _emit(model.to_json())
    lines = [f"# genus {model.genus}, {model.n} components, {len(model.edges)} nodes"]
    lines += [f"{v}: genus {g}" for v, g in model.vertices]
    lines += [f"{a} -- {b}" for a, b in model.edges]
    return "\n".join(lines)


def _degree_range(text: str | None):
    if text is None:
        return None
    try:
        lo, hi = (int(x) for x in text.split(".."))
    except ValueError:
        raise ValidationError(f"--degree-range must look like a..b, got {text!r}") from None
    return lambda graph: range(lo, hi + 1)


STABILITY = {"stable": oracle.STABLE, "quasistable": oracle.QUASISTABLE}


def cmd_oracle_verify(args) -> str:
    spec = oracle.CorpusSpec(args.max_vertices, args.max_genus, args.max_edges, STABILITY[args.stability])
    graphs = oracle.generate_corpus(spec)
    bad = oracle.verify(graphs, _degree_range(args.degree_range), workers=args.workers)
    if bad is not None:
        raise _Disagreement(bad)
    if args.json:
        return _emit({"format": FORMAT, "graphs": len(graphs), "disagreements": 0})
    return f"oracle-verify: {len(graphs)} graphs, 0 disagreements"


class _Disagreement(Exception):
    def __init__(self, witness: oracle.Disagreement):
        super().__init__(witness.check)
        self.witness = witness


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="picard-strata",
        description="Balanced multidegrees, degree class groups and d-special strata of stable curves.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, graph=True):
        p = sub.add_parser(name, help=help_)
        if graph:
            p.add_argument("--graph", required=True, help="dual graph JSON file")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    p = add("classify", cmd_classify, "classify one multidegree")
    p.add_argument("--degree", type=int)
    p.add_argument("--multidegree", help='JSON array, e.g. "[1,0]"')
    p.add_argument("--md-file", help="file holding the multidegree JSON array")

    p = add("balanced", cmd_balanced, "enumerate balanced multidegrees")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--stably-only", action="store_true")

    p = add("class-group", cmd_class_group, "degree class group and class representatives")
    p.add_argument("--degree", type=int, help="also list one semibalanced representative per class")

    p = add("strata-generators", cmd_strata_generators, "vine curves generating the d-special locus",
            graph=False)
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)

    p = add("lattice", cmd_lattice, "lattice of d-general strata", graph=False)
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--dot", action="store_true")

    p = add("stable-model", cmd_stable_model, "contract exceptional components")
    p.add_argument("--dot", action="store_true")

    p = add("oracle-verify", cmd_oracle_verify, "check fast paths against brute force", graph=False)
    p.add_argument("--max-vertices", type=int, default=3)
    p.add_argument("--max-genus", type=int, default=3)
    p.add_argument("--max-edges", type=int)
    p.add_argument("--degree-range", help="inclusive range a..b (default 0..2g-3 per graph)")
    p.add_argument("--stability", choices=sorted(STABILITY), default="stable")
    p.add_argument("--workers", type=int, help="process count (default $PICARD_STRATA_THREADS or 1)")
    return parser


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out = args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except _Disagreement as exc:
        print(json.dumps(exc.witness.to_json()), file=stdout)
        print(f"oracle disagreement in {exc.witness.check}", file=stderr)
        return 1
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=stderr)
        return 1
    print(out, file=stdout)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
