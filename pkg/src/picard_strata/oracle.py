"""Brute-force references and exhaustive small-graph corpora.

Nothing here reuses the fast paths of the other modules: subsets are
enumerated by ``itertools``, connectivity is checked by depth-first search,
and bounds are exact ``Fraction`` values straight from the Basic Inequality.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Callable, Iterable, Iterator

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from picard_strata.balance import BalanceClass, Multidegree
from picard_strata.dual_graph import DualGraph, StabilityClass
from picard_strata.errors import ValidationError

MAX_VERTICES = 5
MAX_EDGES = 10

STABLE = frozenset({StabilityClass.STABLE})
QUASISTABLE = frozenset({StabilityClass.STABLE, StabilityClass.QUASISTABLE_NOT_STABLE})
SEMISTABLE = QUASISTABLE | {StabilityClass.SEMISTABLE_NOT_QUASISTABLE}


@dataclass(frozen=True)
class CorpusSpec:
    """Bounds for exhaustive generation.

    ``stability`` is the set of admissible stability classes, or ``None`` to
    keep every connected graph (any genus).  ``max_edges`` defaults to the
    largest edge count compatible with ``max_genus``.
    """

    max_vertices: int
    max_genus: int
    max_edges: int | None = None
    stability: frozenset[StabilityClass] | None = STABLE
    min_genus: int = 0

    @property
    def edge_bound(self) -> int:
        if self.max_edges is not None:
            return self.max_edges
        return max(self.max_genus + self.max_vertices - 1, 0)


# -- canonical forms ---------------------------------------------------------

def _vertex_keys(n: int, genera, mult) -> list[tuple]:
    base = [(genera[i], mult[i][i], sum(mult[i][j] for j in range(n) if j != i)) for i in range(n)]
    return [base[i] + (tuple(sorted((mult[i][j], base[j]) for j in range(n) if j != i and mult[i][j])),)
            for i in range(n)]


def canonical_form(n: int, genera, mult) -> tuple:
    """Isomorphism-invariant encoding of a genus-weighted multigraph."""
    keys = _vertex_keys(n, genera, mult)
    order = sorted(range(n), key=lambda i: keys[i])
    blocks: list[list[int]] = []
    for i in order:
        if blocks and keys[blocks[-1][0]] == keys[i]:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    best = None
    for parts in product(*(permutations(b) for b in blocks)):
        perm = [v for p in parts for v in p]
        enc = tuple(mult[perm[a]][perm[b]] for a in range(n) for b in range(a, n))
        if best is None or enc < best:
            best = enc
    return (n, tuple(keys[i] for i in order), best)


def _graph_from_form(form: tuple) -> DualGraph:
    n, keys, enc = form
    genera = [k[0] for k in keys]
    edges = []
    it = iter(enc)
    for a in range(n):
        for b in range(a, n):
            edges.extend([(a, b)] * next(it))
    return DualGraph.from_data(genera, edges)


def _connected(n: int, mult) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in range(n):
            if y not in seen and mult[x][y]:
                seen.add(y)
                stack.append(y)
    return len(seen) == n


@lru_cache(maxsize=None)
def _multigraphs(n: int, max_edges: int, loops: bool) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Unlabelled connected multigraphs on n vertices, as multiplicity matrices."""
    slots = [(a, b) for a in range(n) for b in range(a, n) if loops or a != b]
    empty = tuple(tuple(0 for _ in range(n)) for _ in range(n))
    level = {canonical_form(n, [0] * n, empty): empty}
    found = []
    for _ in range(max_edges + 1):
        for mat in level.values():
            if _connected(n, mat):
                found.append(mat)
        nxt: dict = {}
        for mat in level.values():
            for a, b in slots:
                m = [list(r) for r in mat]
                m[a][b] += 1
                if a != b:
                    m[b][a] += 1
                m = tuple(tuple(r) for r in m)
                key = canonical_form(n, [0] * n, m)
                if key not in nxt:
                    nxt[key] = m
        level = nxt
    return tuple(found)


def generate_multigraphs(max_vertices: int, max_edges: int, loops: bool = True) -> list[DualGraph]:
    """Connected multigraphs (all genera 0) up to isomorphism."""
    _check_bounds(max_vertices, max_edges)
    out = []
    for n in range(1, max_vertices + 1):
        forms = sorted(canonical_form(n, [0] * n, m) for m in _multigraphs(n, max_edges, loops))
        out.extend(_graph_from_form(f) for f in forms)
    return out


def _check_bounds(max_vertices: int, max_edges: int) -> None:
    if max_vertices > MAX_VERTICES or max_edges > MAX_EDGES:
        raise ValidationError(
            f"corpus bounds too large (max {MAX_VERTICES} vertices, {MAX_EDGES} edges); "
            f"got {max_vertices} vertices, {max_edges} edges")
    if max_vertices < 0 or max_edges < 0:
        raise ValidationError("corpus bounds must be nonnegative")


def _stability_of(n: int, genera, mult) -> StabilityClass:
    deg = [sum(mult[i]) + mult[i][i] for i in range(n)]
    rational = [i for i in range(n) if genera[i] == 0]
    if any(deg[i] < 2 for i in rational):
        return StabilityClass.NOT_SEMISTABLE
    if all(deg[i] >= 3 for i in rational):
        return StabilityClass.STABLE
    exc = [i for i in rational if deg[i] == 2 and mult[i][i] == 0]
    if any(mult[a][b] for a, b in combinations(exc, 2)):
        return StabilityClass.SEMISTABLE_NOT_QUASISTABLE
    return StabilityClass.QUASISTABLE_NOT_STABLE


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _corpus(spec: CorpusSpec) -> tuple[DualGraph, ...]:
    if spec.max_vertices <= 0:
        return ()
    _check_bounds(spec.max_vertices, spec.edge_bound)
    forms = set()
    for n in range(1, spec.max_vertices + 1):
        for mat in _multigraphs(n, spec.edge_bound, True):
            betti = sum(mat[a][b] for a in range(n) for b in range(a, n)) - n + 1
            for budget in range(max(spec.min_genus - betti, 0), spec.max_genus - betti + 1):
                for genera in _compositions(budget, n):
                    g = betti + budget
                    if spec.stability is not None:
                        if g < 2 or _stability_of(n, genera, mat) not in spec.stability:
                            continue
                    forms.add(canonical_form(n, genera, mat))
    ordered = sorted(forms, key=lambda f: (f[0], sum(k[0] for k in f[1]) + sum(f[2]) - f[0] + 1, f))
    return tuple(_graph_from_form(f) for f in ordered)


def generate_corpus(spec: CorpusSpec) -> list[DualGraph]:
    """All graphs within ``spec``, one per isomorphism class, deterministic order."""
    return list(_corpus(spec))


# -- brute-force balance -------------------------------------------------------

def _genus(graph: DualGraph) -> int:
    return sum(graph.genera) + len(graph.edges) - graph.n + 1


def _induced_connected(graph: DualGraph, members: frozenset[int]) -> bool:
    start = next(iter(members))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for a, b in graph.edge_indices:
            for u, v in ((a, b), (b, a)):
                if u == x and v in members and v not in seen:
                    seen.add(v)
                    stack.append(v)
    return seen == members


def _proper_connected_subcurves(graph: DualGraph) -> list[frozenset[int]]:
    out = []
    for size in range(1, graph.n):
        for combo in combinations(range(graph.n), size):
            z = frozenset(combo)
            if _induced_connected(graph, z):
                out.append(z)
    return out


def _w_and_k(graph: DualGraph, z: frozenset[int]) -> tuple[int, int]:
    k = sum(1 for a, b in graph.edge_indices if (a in z) != (b in z))
    w = 0
    for i in z:
        valence = sum((a == i) + (b == i) for a, b in graph.edge_indices)
        w += 2 * graph.genera[i] - 2 + valence
    return w, k


def _exceptional(graph: DualGraph) -> set[int]:
    out = set()
    for i in range(graph.n):
        if graph.genera[i] != 0:
            continue
        loops = sum(1 for a, b in graph.edge_indices if a == b == i)
        outer = sum(1 for a, b in graph.edge_indices if (a == i) != (b == i))
        if loops == 0 and outer == 2:
            out.add(i)
    return out


def basic_inequality(graph: DualGraph, z: frozenset[int], d: int) -> tuple[Fraction, Fraction]:
    g = _genus(graph)
    w, k = _w_and_k(graph, z)
    centre = Fraction(d * w, 2 * g - 2)
    return centre - Fraction(k, 2), centre + Fraction(k, 2)


def brute_classify(md: Multidegree) -> BalanceClass:
    """The definition of (semi/stably) balanced, applied literally."""
    graph = md.graph
    if _genus(graph) < 2 or _stability_of(graph.n, graph.genera, graph.multiplicity) not in SEMISTABLE:
        raise ValidationError("balance is only defined on semistable graphs of genus >= 2")
    d = md.total
    exc = _exceptional(graph)
    subs = _proper_connected_subcurves(graph)
    attained_low = []
    for z in subs:
        deg = sum(md.degrees[i] for i in z)
        lo, hi = basic_inequality(graph, z, d)
        if not lo <= deg <= hi:
            return BalanceClass.NOT_SEMIBALANCED
        if deg == lo:
            attained_low.append(z)
    if any(md.degrees[e] != 1 for e in exc):
        return BalanceClass.SEMIBALANCED_NOT_BALANCED
    everything = frozenset(range(graph.n))
    for z in attained_low:
        if not (everything - z) <= exc:
            return BalanceClass.BALANCED_NOT_STABLY
    return BalanceClass.STABLY_BALANCED


def search_box(graph: DualGraph, d: int, margin: int = 0) -> list[range]:
    """Per-vertex ranges from the singleton inequalities, widened by ``margin``."""
    if graph.n == 1:
        return [range(d, d + 1)]
    box = []
    for i in range(graph.n):
        lo, hi = basic_inequality(graph, frozenset([i]), d)
        box.append(range(math.ceil(lo) - margin, math.floor(hi) + margin + 1))
    return box


def multidegrees_in(graph: DualGraph, box: list[range], d: int) -> Iterator[Multidegree]:
    for head in product(*box[:-1]):
        last = d - sum(head)
        if last in box[-1]:
            yield Multidegree(graph, head + (last,))


def brute_balanced(graph: DualGraph, d: int) -> dict[tuple[int, ...], BalanceClass]:
    out = {}
    for md in multidegrees_in(graph, search_box(graph, d), d):
        cls = brute_classify(md)
        if cls.is_balanced:
            out[md.degrees] = cls
    return out


def brute_d_general(graph: DualGraph, d: int) -> bool:
    """Every balanced multidegree of degree d is stably balanced."""
    return all(c is BalanceClass.STABLY_BALANCED for c in brute_balanced(graph, d).values())


# -- brute-force degree class group ------------------------------------------

def brute_class_count(graph: DualGraph) -> int:
    """Number of degree-0 classes modulo twisters, by graph search in a box.

    Degree-0 vectors with entries in ``[-R, R]`` are joined whenever they differ
    by a single twister, and the classes met by the inner box ``[-r, r]`` are
    counted.  ``r = 2|E|`` is large enough for every class to meet the inner box
    (reduced divisors have entries below the valence away from one vertex);
    ``R`` grows until the count survives two enlargements unchanged.
    """
    n = graph.n
    if n == 1:
        return 1
    twisters = []
    for i in range(n):
        t = [0] * n
        for a, b in graph.edge_indices:
            if a == b:
                continue
            if a == i:
                t[a] -= 1
                t[b] += 1
            elif b == i:
                t[b] -= 1
                t[a] += 1
        twisters.append(t)
    inner = 2 * len(graph.edges)
    step = max(max(abs(x) for x in t) for t in twisters)
    outer = inner + step
    history = [_count_components(n, twisters, inner, outer)]
    while len(history) < 3 or len(set(history[-3:])) != 1:
        outer += step
        history.append(_count_components(n, twisters, inner, outer))
    return history[-1]


def _count_components(n: int, twisters, inner: int, outer: int) -> int:
    side = 2 * outer + 1
    grid = np.indices((side,) * (n - 1)).reshape(n - 1, -1).T - outer
    ok = np.abs(grid.sum(axis=1)) <= outer
    grid = grid[ok]
    index = np.full(side ** (n - 1), -1, dtype=np.int64)
    weights = side ** np.arange(n - 2, -1, -1)
    index[(grid + outer) @ weights] = np.arange(len(grid))
    src, dst = [], []
    for t in twisters:
        moved = grid + np.array(t[:-1])
        keep = np.all(np.abs(moved) <= outer, axis=1) & (np.abs(moved.sum(axis=1)) <= outer)
        src.append(np.arange(len(grid))[keep])
        dst.append(index[(moved[keep] + outer) @ weights])
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    adj = coo_matrix((np.ones(len(src)), (src, dst)), shape=(len(grid), len(grid)))
    _, labels = connected_components(adj, directed=False)
    full = np.column_stack([grid, -grid.sum(axis=1)])
    in_inner = np.all(np.abs(full) <= inner, axis=1)
    return len(set(labels[in_inner].tolist()))


# -- corpus-wide verification -----------------------------------------------

@dataclass
class Disagreement:
    check: str
    graph: DualGraph
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"format": 1, "check": self.check, "graph": self.graph.to_json(), **self.detail}


def _verify_graph(args: tuple[DualGraph, tuple[int, ...]]) -> Disagreement | None:
    # local imports keep the oracle's own code paths free of the fast modules
    from picard_strata import balance, degree_class, strata

    graph, degrees = args
    for d in degrees:
        for md in multidegrees_in(graph, search_box(graph, d, margin=1), d):
            fast, slow = balance.classify(md), brute_classify(md)
            if fast is not slow:
                return Disagreement("classify", graph, {"degree": d, "multidegree": list(md.degrees),
                                                        "fast": str(fast), "brute": str(slow)})
        reference = brute_d_general(graph, d)
        methods = [strata.Method.EXHAUSTIVE] + ([strata.Method.CRITERION] if graph.is_stable else [])
        for method in methods:
            if strata.is_d_general(graph, d, method) != reference:
                return Disagreement("is_d_general", graph, {"degree": d, "method": method.value,
                                                            "brute": reference})
        for rep in degree_class.class_representatives(graph, d):
            if brute_classify(rep) is BalanceClass.NOT_SEMIBALANCED:
                return Disagreement("semibalanced_representative", graph,
                                    {"degree": d, "multidegree": list(rep.degrees)})
    order = degree_class.class_group(graph).order
    count = brute_class_count(graph)
    if order != count:
        return Disagreement("class_group", graph, {"smith_order": order, "brute_count": count})
    return None


def thread_cap() -> int:
    raw = os.environ.get("PICARD_STRATA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValidationError(f"PICARD_STRATA_THREADS must be an integer, got {raw!r}") from None


def verify(graphs: Iterable[DualGraph],
           degrees: Callable[[DualGraph], Iterable[int]] | None = None,
           workers: int | None = None) -> Disagreement | None:
    """Compare fast paths against the brute-force references; first mismatch or None.

    ``degrees`` maps a graph to the degrees to test, by default ``[0, 2g - 2)``.
    """
    if degrees is None:
        def degrees(graph):
            return range(0, 2 * graph.genus - 2)
    jobs = [(gr, tuple(degrees(gr))) for gr in graphs]
    workers = workers or thread_cap()
    if workers == 1:
        for job in jobs:
            bad = _verify_graph(job)
            if bad is not None:
                return bad
        return None
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for bad in pool.map(_verify_graph, jobs, chunksize=4):
            if bad is not None:
                return bad
    return None
