"""Basic Inequality bounds and balanced multidegrees.

Every bound is kept as an integer scaled by ``2(2g-2)`` so that endpoint
attainment is decided exactly.  ``m_doubled`` and ``M_doubled`` are the lower
and upper bounds of the inequality times that scale.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np

from picard_strata.dual_graph import DualGraph, Subcurve
from picard_strata.errors import ValidationError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Multidegree:
    graph: DualGraph
    degrees: tuple[int, ...]

    def __post_init__(self) -> None:
        degs = tuple(int(x) for x in self.degrees)
        if len(degs) != self.graph.n:
            raise ValidationError(
                f"multidegree has {len(degs)} entries but the graph has {self.graph.n} vertices")
        object.__setattr__(self, "degrees", degs)

    @property
    def total(self) -> int:
        return sum(self.degrees)

    def on(self, mask: int) -> int:
        return sum(x for i, x in enumerate(self.degrees) if mask >> i & 1)

    def to_json(self) -> list[int]:
        return list(self.degrees)


@dataclass(frozen=True)
class BasicBounds:
    subcurve: Subcurve
    m_doubled: int
    M_doubled: int
    scale: int

    @property
    def lower(self) -> Fraction:
        return Fraction(self.m_doubled, self.scale)

    @property
    def upper(self) -> Fraction:
        return Fraction(self.M_doubled, self.scale)

    def admits(self, degree: int) -> bool:
        return self.m_doubled <= self.scale * degree <= self.M_doubled

    def integer_range(self) -> range:
        lo = -((-self.m_doubled) // self.scale)
        hi = self.M_doubled // self.scale
        return range(lo, hi + 1)


class BalanceClass(enum.Enum):
    NOT_SEMIBALANCED = "NotSemibalanced"
    SEMIBALANCED_NOT_BALANCED = "SemibalancedNotBalanced"
    BALANCED_NOT_STABLY = "BalancedNotStably"
    STABLY_BALANCED = "StablyBalanced"

    @property
    def is_balanced(self) -> bool:
        return self in (BalanceClass.BALANCED_NOT_STABLY, BalanceClass.STABLY_BALANCED)

    def __str__(self) -> str:
        return self.value


def _genus_at_least_two(graph: DualGraph) -> int:
    g = graph.genus
    if g < 2:
        raise ValidationError(f"arithmetic genus {g} < 2; the Basic Inequality needs g >= 2")
    return g


def _scaled(graph: DualGraph, mask: int, d: int) -> tuple[int, int, int]:
    g = graph.genus
    w, k = graph.canonical_degree(mask), graph.boundary(mask)
    return 2 * d * w - (2 * g - 2) * k, 2 * d * w + (2 * g - 2) * k, 2 * (2 * g - 2)


def basic_bounds(z: Subcurve, d: int) -> BasicBounds:
    _genus_at_least_two(z.graph)
    if not z.is_proper:
        raise ValidationError("Basic Inequality bounds need a proper subcurve")
    lo, hi, scale = _scaled(z.graph, z.mask, d)
    return BasicBounds(z, lo, hi, scale)


@dataclass(frozen=True)
class _Table:
    """Per-graph arrays over connected proper subcurves, for bulk checks."""

    genus: int
    masks: tuple[int, ...]
    incidence: np.ndarray        # (S, n) 0/1
    w: np.ndarray                # (S,)
    k: np.ndarray                # (S,)
    tolerated: np.ndarray        # (S,) complement is a union of exceptional components
    exceptional: tuple[int, ...]

    @property
    def scale(self) -> int:
        return 2 * (2 * self.genus - 2)


@lru_cache(maxsize=4096)
def _table(graph: DualGraph) -> _Table:
    g = _genus_at_least_two(graph)
    if not graph.is_semistable:
        raise ValidationError("balance is only defined on semistable graphs")
    masks = graph.connected_proper_masks
    n = graph.n
    inc = np.array([[m >> i & 1 for i in range(n)] for m in masks], dtype=np.int64).reshape(len(masks), n)
    exc_mask = sum(1 << e for e in graph.exceptional)
    tolerated = np.array([(graph.full_mask & ~m) & ~exc_mask == 0 for m in masks], dtype=bool)
    return _Table(
        genus=g,
        masks=masks,
        incidence=inc,
        w=np.array([graph.canonical_degree(m) for m in masks], dtype=np.int64),
        k=np.array([graph.boundary(m) for m in masks], dtype=np.int64),
        tolerated=tolerated,
        exceptional=graph.exceptional,
    )


def _classify_rows(table: _Table, rows: np.ndarray, d: int) -> np.ndarray:
    """Vectorised classification; returns an int code per row (BalanceClass order)."""
    deg_z = rows @ table.incidence.T
    lower = 2 * d * table.w - (2 * table.genus - 2) * table.k
    scaled = table.scale * deg_z
    # lower bounds on every connected proper subcurve imply the upper bounds
    semibalanced = np.all(scaled >= lower, axis=1)
    if table.exceptional:
        balanced = semibalanced & np.all(rows[:, list(table.exceptional)] == 1, axis=1)
    else:
        balanced = semibalanced
    offending = (scaled == lower) & ~table.tolerated
    stably = balanced & ~np.any(offending, axis=1)
    code = np.zeros(len(rows), dtype=np.int64)
    code[semibalanced] = 1
    code[balanced] = 2
    code[stably] = 3
    return code


_CODES = (BalanceClass.NOT_SEMIBALANCED, BalanceClass.SEMIBALANCED_NOT_BALANCED,
          BalanceClass.BALANCED_NOT_STABLY, BalanceClass.STABLY_BALANCED)


def classify(md: Multidegree) -> BalanceClass:
    table = _table(md.graph)
    if not table.masks:
        return BalanceClass.STABLY_BALANCED
    rows = np.array([md.degrees], dtype=np.int64)
    return _CODES[int(_classify_rows(table, rows, md.total)[0])]


def classify_many(graph: DualGraph, rows: Sequence[Sequence[int]], d: int) -> list[BalanceClass]:
    """Classify several multidegrees of total degree ``d`` at once."""
    table = _table(graph)
    arr = np.asarray(rows, dtype=np.int64).reshape(-1, graph.n)
    if np.any(arr.sum(axis=1) != d):
        raise ValidationError(f"every multidegree must have total degree {d}")
    if not table.masks:
        return [BalanceClass.STABLY_BALANCED] * len(arr)
    return [_CODES[c] for c in _classify_rows(table, arr, d)]


def singleton_box(graph: DualGraph, d: int, pin_exceptional: bool = True) -> list[range]:
    """Per-vertex integer ranges allowed by the singleton Basic Inequalities."""
    _genus_at_least_two(graph)
    if graph.n == 1:
        return [range(d, d + 1)]
    box = []
    for i in range(graph.n):
        lo, hi, scale = _scaled(graph, 1 << i, d)
        r = range(-((-lo) // scale), hi // scale + 1)
        if pin_exceptional and i in graph.exceptional:
            r = range(1, 2) if 1 in r else range(0)
        box.append(r)
    return box


def box_points(box: Sequence[range], d: int) -> np.ndarray:
    """All integer points of ``box`` with coordinate sum ``d``, lexicographically sorted."""
    n = len(box)
    if n == 1:
        return np.array([[d]], dtype=np.int64) if d in box[0] else np.zeros((0, 1), dtype=np.int64)
    if any(len(r) == 0 for r in box):
        return np.zeros((0, n), dtype=np.int64)
    head = np.array(list(product(*box[:-1])), dtype=np.int64).reshape(-1, n - 1)
    last = d - head.sum(axis=1)
    keep = (last >= box[-1].start) & (last < box[-1].stop)
    return np.column_stack([head[keep], last[keep]])


def balanced_rows(graph: DualGraph, d: int, stably_only: bool = False) -> np.ndarray:
    table = _table(graph)
    if not graph.is_quasistable:
        log.warning("graph is semistable but not quasistable; it carries no balanced multidegree")
    pts = box_points(singleton_box(graph, d), d)
    if not table.masks:
        return pts
    code = _classify_rows(table, pts, d)
    return pts[code == 3] if stably_only else pts[code >= 2]


def enumerate_balanced(graph: DualGraph, d: int, stably_only: bool = False) -> list[Multidegree]:
    """Balanced (or stably balanced) multidegrees of total degree ``d`` in lex order."""
    return [Multidegree(graph, tuple(int(x) for x in row))
            for row in balanced_rows(graph, d, stably_only)]


def twist(md: Multidegree, n: int) -> Multidegree:
    """Tensor with the n-th power of the dualizing sheaf."""
    w = md.graph.canonical_degrees
    return Multidegree(md.graph, tuple(x + n * wi for x, wi in zip(md.degrees, w)))


def reflect_twist(md: Multidegree, n: int) -> Multidegree:
    """Dual twisted by the n-th power of the dualizing sheaf: deg_i -> n w_i - deg_i."""
    w = md.graph.canonical_degrees
    return Multidegree(md.graph, tuple(n * wi - x for x, wi in zip(md.degrees, w)))

