"""Dual graphs of nodal curves.

A nodal curve is encoded by a connected multigraph whose vertices are the
irreducible components (weighted by geometric genus) and whose edges are the
nodes.  A loop is a self-node of a component.  Subcurves are unions of whole
components, i.e. vertex subsets.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from picard_strata.errors import ValidationError

FORMAT_VERSION = 1


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(frozen=True)
class DualGraph:
    """Genus-weighted connected multigraph.

    ``vertices`` is an ordered tuple of ``(id, genus)`` pairs; ``edges`` a tuple
    of ``(id, id)`` pairs, where ``(v, v)`` is a loop.  The vertex order is the
    order used by every multidegree on this graph.
    """

    vertices: tuple[tuple[str, int], ...]
    edges: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        verts = tuple((str(v), int(g)) for v, g in self.vertices)
        if not verts:
            raise ValidationError("a dual graph needs at least one vertex")
        ids = [v for v, _ in verts]
        if len(set(ids)) != len(ids):
            raise ValidationError(f"duplicate vertex ids in {ids}")
        for v, g in verts:
            if g < 0:
                raise ValidationError(f"vertex {v!r} has negative genus {g}")
        pos = {v: i for i, v in enumerate(ids)}
        norm = []
        for e in self.edges:
            if len(e) != 2:
                raise ValidationError(f"edge {e!r} must have exactly two endpoints")
            a, b = str(e[0]), str(e[1])
            for x in (a, b):
                if x not in pos:
                    raise ValidationError(f"edge {e!r} references unknown vertex {x!r}")
            if pos[a] > pos[b]:
                a, b = b, a
            norm.append((a, b))
        norm.sort(key=lambda e: (pos[e[0]], pos[e[1]]))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(norm))
        uf = _UnionFind(len(verts))
        for a, b in norm:
            uf.union(pos[a], pos[b])
        if len({uf.find(i) for i in range(len(verts))}) != 1:
            raise ValidationError("dual graph is disconnected; a curve must be connected")

    @classmethod
    def from_data(cls, genera: Sequence[int], edges: Iterable[tuple[int, int]],
                  prefix: str = "C") -> DualGraph:
        """Build from 0-based index edges; vertex ids are ``C1, C2, ...``."""
        ids = [f"{prefix}{i + 1}" for i in range(len(genera))]
        return cls(tuple(zip(ids, genera)), tuple((ids[a], ids[b]) for a, b in edges))

    @classmethod
    def vine(cls, g1: int, g2: int, k: int) -> DualGraph:
        """Two components of genera ``g1``, ``g2`` meeting in ``k`` nodes."""
        return cls.from_data([g1, g2], [(0, 1)] * k)

    # -- basic structure -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def ids(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.vertices)

    @cached_property
    def genera(self) -> tuple[int, ...]:
        return tuple(g for _, g in self.vertices)

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.ids)}

    @cached_property
    def edge_indices(self) -> tuple[tuple[int, int], ...]:
        return tuple((self.index[a], self.index[b]) for a, b in self.edges)

    @cached_property
    def multiplicity(self) -> tuple[tuple[int, ...], ...]:
        """Symmetric matrix of edge counts; the diagonal counts loops."""
        m = [[0] * self.n for _ in range(self.n)]
        for a, b in self.edge_indices:
            m[a][b] += 1
            if a != b:
                m[b][a] += 1
        return tuple(tuple(row) for row in m)

    @cached_property
    def loops(self) -> tuple[int, ...]:
        return tuple(self.multiplicity[i][i] for i in range(self.n))

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        """Vertex valence, loops counted twice."""
        deg = [0] * self.n
        for a, b in self.edge_indices:
            deg[a] += 1
            deg[b] += 1
        return tuple(deg)

    @cached_property
    def outer_degrees(self) -> tuple[int, ...]:
        """Number of non-loop edges at each vertex (k of the singleton subcurve)."""
        return tuple(d - 2 * l for d, l in zip(self.degrees, self.loops))

    @cached_property
    def canonical_degrees(self) -> tuple[int, ...]:
        """Degree of the dualizing sheaf on each component: 2 genus - 2 + valence."""
        return tuple(2 * g - 2 + d for g, d in zip(self.genera, self.degrees))

    @cached_property
    def genus(self) -> int:
        return arithmetic_genus(self)

    def mask(self, members: Iterable[str]) -> int:
        bits = 0
        for v in members:
            if v not in self.index:
                raise ValidationError(f"unknown vertex id {v!r}")
            bits |= 1 << self.index[v]
        return bits

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def members(self, mask: int) -> tuple[str, ...]:
        return tuple(v for i, v in enumerate(self.ids) if mask >> i & 1)

    # -- subset invariants on bitmasks ------------------------------------

    def boundary(self, mask: int) -> int:
        """k_Z: edges with exactly one endpoint in the subset."""
        return sum(1 for a, b in self.edge_indices if (mask >> a & 1) != (mask >> b & 1))

    def internal_edges(self, mask: int) -> int:
        return sum(1 for a, b in self.edge_indices if mask >> a & 1 and mask >> b & 1)

    def canonical_degree(self, mask: int) -> int:
        """w_Z, the degree of the dualizing sheaf restricted to the subset."""
        w = self.canonical_degrees
        return sum(w[i] for i in range(self.n) if mask >> i & 1)

    def components(self, mask: int) -> list[int]:
        """Connected components of the induced subgraph, as masks."""
        uf = _UnionFind(self.n)
        for a, b in self.edge_indices:
            if mask >> a & 1 and mask >> b & 1:
                uf.union(a, b)
        comps: dict[int, int] = {}
        for i in range(self.n):
            if mask >> i & 1:
                r = uf.find(i)
                comps[r] = comps.get(r, 0) | 1 << i
        return [comps[r] for r in sorted(comps)]

    def is_connected_subset(self, mask: int) -> bool:
        return mask != 0 and len(self.components(mask)) == 1

    def subset_genus(self, mask: int) -> int:
        """Arithmetic genus of the subcurve; additive over connected components."""
        total = 0
        for comp in self.components(mask):
            size = bin(comp).count("1")
            total += sum(self.genera[i] for i in range(self.n) if comp >> i & 1) \
                + self.internal_edges(comp) - size + 1
        return total

    @cached_property
    def connected_proper_masks(self) -> tuple[int, ...]:
        """Connected nonempty proper subsets, ordered by size then index tuple."""
        out = []
        for size in range(1, self.n):
            for combo in combinations(range(self.n), size):
                mask = sum(1 << i for i in combo)
                if self.is_connected_subset(mask):
                    out.append(mask)
        return tuple(out)

    # -- stability ---------------------------------------------------------

    @cached_property
    def exceptional(self) -> tuple[int, ...]:
        """Indices of exceptional components: genus 0, no loops, two outer edges."""
        return tuple(i for i in range(self.n)
                     if self.genera[i] == 0 and self.loops[i] == 0 and self.outer_degrees[i] == 2)

    @cached_property
    def stability(self) -> StabilityClass:
        return classify_stability(self)

    @property
    def is_stable(self) -> bool:
        return self.stability is StabilityClass.STABLE

    @property
    def is_quasistable(self) -> bool:
        return self.stability in (StabilityClass.STABLE, StabilityClass.QUASISTABLE_NOT_STABLE)

    @property
    def is_semistable(self) -> bool:
        return self.stability is not StabilityClass.NOT_SEMISTABLE

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "vertices": [{"id": v, "genus": g} for v, g in self.vertices],
            "edges": [[a, b] for a, b in self.edges],
        }

    @classmethod
    def from_json(cls, data: dict | str) -> DualGraph:
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"malformed graph JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ValidationError("graph JSON must be an object")
        if data.get("format", FORMAT_VERSION) != FORMAT_VERSION:
            raise ValidationError(f"unsupported graph format {data['format']!r}")
        try:
            verts = tuple((v["id"], v["genus"]) for v in data["vertices"])
            edges = tuple(tuple(e) for e in data.get("edges", []))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"graph JSON missing field: {exc}") from None
        for _, g in verts:
            if not isinstance(g, int) or isinstance(g, bool):
                raise ValidationError(f"vertex genus must be an integer, got {g!r}")
        return cls(verts, edges)

    def to_dot(self, name: str = "dual_graph") -> str:
        lines = [f"graph {name} {{"]
        for v, g in self.vertices:
            lines.append(f'  "{v}" [label="{v}:g={g}"];')
        for a, b in self.edges:
            lines.append(f'  "{a}" -- "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Subcurve:
    """A nonempty set of components of ``graph``."""

    graph: DualGraph
    members: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", frozenset(self.members))
        if not self.members:
            raise ValidationError("a subcurve must contain at least one component")
        self.graph.mask(self.members)

    @classmethod
    def from_mask(cls, graph: DualGraph, mask: int) -> Subcurve:
        return cls(graph, frozenset(graph.members(mask)))

    @property
    def mask(self) -> int:
        return self.graph.mask(self.members)

    @property
    def is_proper(self) -> bool:
        return self.mask != self.graph.full_mask

    def complement(self) -> Subcurve:
        return Subcurve.from_mask(self.graph, self.graph.full_mask & ~self.mask)

    def sorted_members(self) -> tuple[str, ...]:
        return self.graph.members(self.mask)


@dataclass(frozen=True)
class SubcurveInvariants:
    k: int
    w: int
    genus: int
    connected: bool


class StabilityClass(enum.Enum):
    STABLE = "Stable"
    QUASISTABLE_NOT_STABLE = "QuasistableNotStable"
    SEMISTABLE_NOT_QUASISTABLE = "SemistableNotQuasistable"
    NOT_SEMISTABLE = "NotSemistable"

    def __str__(self) -> str:
        return self.value


def arithmetic_genus(graph: DualGraph) -> int:
    """Sum of component genera plus the first Betti number of the graph."""
    if not graph.is_connected_subset(graph.full_mask):
        raise ValidationError("arithmetic genus needs a connected graph")
    return sum(graph.genera) + len(graph.edges) - graph.n + 1


def subcurve_invariants(z: Subcurve) -> SubcurveInvariants:
    g, mask = z.graph, z.mask
    return SubcurveInvariants(
        k=g.boundary(mask),
        w=g.canonical_degree(mask),
        genus=g.subset_genus(mask),
        connected=g.is_connected_subset(mask),
    )


def enumerate_connected_proper_subcurves(graph: DualGraph) -> list[Subcurve]:
    return [Subcurve.from_mask(graph, m) for m in graph.connected_proper_masks]


def _require_genus_two(graph: DualGraph) -> int:
    g = graph.genus
    if g < 2:
        raise ValidationError(f"arithmetic genus {g} < 2; stability needs genus >= 2")
    return g


def classify_stability(graph: DualGraph) -> StabilityClass:
    _require_genus_two(graph)
    rational = [i for i in range(graph.n) if graph.genera[i] == 0]
    if any(graph.degrees[i] < 2 for i in rational):
        return StabilityClass.NOT_SEMISTABLE
    if all(graph.degrees[i] >= 3 for i in rational):
        return StabilityClass.STABLE
    exc = graph.exceptional
    mult = graph.multiplicity
    for a, b in combinations(exc, 2):
        if mult[a][b]:
            return StabilityClass.SEMISTABLE_NOT_QUASISTABLE
    return StabilityClass.QUASISTABLE_NOT_STABLE


def stable_model(graph: DualGraph) -> DualGraph:
    """Contract exceptional components one at a time until none remain."""
    if not graph.is_semistable:
        raise ValidationError("stable model is only defined for semistable graphs")
    current = graph
    while current.exceptional:
        e = current.exceptional[0]
        eid = current.ids[e]
        ends = []
        kept = []
        for a, b in current.edges:
            if a == eid:
                ends.append(b)
            elif b == eid:
                ends.append(a)
            else:
                kept.append((a, b))
        assert len(ends) == 2
        kept.append((ends[0], ends[1]))
        verts = tuple(v for v in current.vertices if v[0] != eid)
        current = DualGraph(verts, tuple(kept))
    return current


@lru_cache(maxsize=None)
def vine(g1: int, g2: int, k: int) -> DualGraph:
    return DualGraph.vine(g1, g2, k)
