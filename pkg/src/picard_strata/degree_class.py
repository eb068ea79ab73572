"""Degree class group: multidegrees modulo the lattice spanned by twisters.

The twister supported on a component C_i has multidegree given by row i of
the intersection matrix (minus the graph Laplacian).  Classes are labelled
through a Smith normal form ``U A V = D``: two vectors are equivalent iff
their images under ``V`` agree modulo the diagonal of ``D``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import prod
from typing import Sequence

import numpy as np

from picard_strata import balance
from picard_strata.balance import Multidegree
from picard_strata.dual_graph import DualGraph
from picard_strata.errors import InvariantViolation, ValidationError

Matrix = list[list[int]]


@dataclass(frozen=True)
class TwisterLattice:
    graph: DualGraph
    matrix: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        diag, _, _ = smith_normal_form([list(r) for r in self.matrix])
        return sum(1 for x in diag if x)


def twister_lattice(graph: DualGraph) -> TwisterLattice:
    mult = graph.multiplicity
    n = graph.n
    rows = []
    for i in range(n):
        row = [mult[i][j] if j != i else 0 for j in range(n)]
        row[i] = -sum(row)
        rows.append(tuple(row))
    return TwisterLattice(graph, tuple(rows))


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[list[int], Matrix, Matrix]:
    """Return ``(diag, U, V)`` with ``U @ a @ V`` diagonal, unimodular U and V.

    ``diag`` is nonnegative and each entry divides the next; zeros come last.
    """
    m = [list(map(int, r)) for r in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    u, v = _identity(rows), _identity(cols)

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in m:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, c):  # row dst += c * row src
        m[dst] = [x + c * y for x, y in zip(m[dst], m[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, c):
        for r in m:
            r[dst] += c * r[src]
        for r in v:
            r[dst] += c * r[src]

    for t in range(min(rows, cols)):
        while True:
            nonzero = [(abs(m[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if m[i][j]]
            if not nonzero:
                break
            _, pi, pj = min(nonzero)
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = m[t][t]
            dirty = False
            for i in range(t + 1, rows):
                q = m[i][t] // p
                if q:
                    add_row(t, i, -q)
                dirty |= m[i][t] != 0
            for j in range(t + 1, cols):
                q = m[t][j] // p
                if q:
                    add_col(t, j, -q)
                dirty |= m[t][j] != 0
            if dirty:
                continue
            # pivot must divide the rest of the block
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if m[i][j] % p), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if t < rows and t < cols and m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
    diag = [m[i][i] for i in range(min(rows, cols))]
    return diag, u, v


@dataclass(frozen=True)
class DegreeClassGroup:
    """Finite abelian group of degree-0 multidegree classes.

    ``invariant_factors`` omits the trivial factors 1.
    """

    graph: DualGraph
    invariant_factors: tuple[int, ...]
    diagonal: tuple[int, ...]
    transform: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    def label(self, degrees: Sequence[int]) -> tuple[int, ...]:
        """Canonical class label, constant exactly on twister-lattice cosets."""
        if len(degrees) != self.graph.n:
            raise ValidationError("multidegree length does not match the graph")
        n = self.graph.n
        image = [sum(degrees[i] * self.transform[i][j] for i in range(n)) for j in range(n)]
        out = []
        for x, dj in zip(image, self.diagonal):
            if dj == 0:
                out.append(x)
            elif dj > 1:
                out.append(x % dj)
        return tuple(out)


@lru_cache(maxsize=4096)
def class_group(graph: DualGraph) -> DegreeClassGroup:
    lattice = twister_lattice(graph)
    diag, _, v = smith_normal_form(lattice.matrix)
    return DegreeClassGroup(
        graph=graph,
        invariant_factors=tuple(x for x in diag if x > 1),
        diagonal=tuple(diag),
        transform=tuple(tuple(r) for r in v),
    )


def same_class(a: Multidegree, b: Multidegree) -> bool:
    if a.graph != b.graph:
        raise ValidationError("multidegrees live on different graphs")
    if a.total != b.total:
        raise ValidationError(f"total degrees differ ({a.total} vs {b.total})")
    group = class_group(a.graph)
    return group.label(a.degrees) == group.label(b.degrees)


def _semibalanced_in_box(graph: DualGraph, d: int) -> np.ndarray:
    pts = balance.box_points(balance.singleton_box(graph, d, pin_exceptional=False), d)
    if graph.n == 1 or len(pts) == 0:
        return pts
    codes = balance.classify_many(graph, pts, d)
    keep = [c is not balance.BalanceClass.NOT_SEMIBALANCED for c in codes]
    return pts[np.array(keep, dtype=bool)]


def _require_quasistable(graph: DualGraph) -> None:
    if graph.genus < 2 or not graph.is_quasistable:
        raise ValidationError("semibalanced representatives are only guaranteed on quasistable graphs")


def semibalanced_representative(graph: DualGraph, md: Multidegree) -> Multidegree:
    """Semibalanced multidegree equivalent to ``md``, nearest in twister steps.

    Ties at the minimal number of twister additions are broken by
    lexicographic order.  Raises :class:`InvariantViolation` if the class has
    no semibalanced member at all.
    """
    _require_quasistable(graph)
    if md.graph != graph:
        raise ValidationError("multidegree is not on this graph")
    group = class_group(graph)
    target = group.label(md.degrees)
    d = md.total
    candidates = {tuple(int(x) for x in row) for row in _semibalanced_in_box(graph, d)
                  if group.label(row) == target}
    if not candidates:
        raise InvariantViolation(
            f"no semibalanced representative for class of {list(md.degrees)} on {graph.to_json()}")
    steps = [r for row in twister_lattice(graph).matrix if any(row)
             for r in (row, tuple(-x for x in row))]
    start = md.degrees
    frontier = [start]
    seen = {start}
    while True:
        hits = sorted(x for x in frontier if x in candidates)
        if hits:
            return Multidegree(graph, hits[0])
        nxt = []
        for x in frontier:
            for s in steps:
                y = tuple(a + b for a, b in zip(x, s))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt


def class_representatives(graph: DualGraph, d: int) -> list[Multidegree]:
    """One semibalanced representative (lexicographically least) per degree-d class."""
    _require_quasistable(graph)
    group = class_group(graph)
    reps: dict[tuple[int, ...], tuple[int, ...]] = {}
    for row in _semibalanced_in_box(graph, d):
        key = group.label(row)
        if key not in reps:
            reps[key] = tuple(int(x) for x in row)
    if len(reps) != group.order:
        raise InvariantViolation(
            f"found semibalanced representatives for {len(reps)} of {group.order} classes")
    return [Multidegree(graph, reps[k]) for k in sorted(reps, key=lambda k: reps[k])]


def balanced_class_census(graph: DualGraph, d: int) -> dict[tuple[int, ...], list[Multidegree]]:
    """Group the balanced multidegrees of degree ``d`` by class label."""
    group = class_group(graph)
    out: dict[tuple[int, ...], list[Multidegree]] = {}
    for md in balance.enumerate_balanced(graph, d):
        out.setdefault(group.label(md.degrees), []).append(md)
    return out


__all__ = [
    "DegreeClassGroup", "TwisterLattice", "balanced_class_census", "class_group",
    "class_representatives", "same_class", "semibalanced_representative",
    "smith_normal_form", "twister_lattice",
]
