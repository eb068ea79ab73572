"""d-general / d-special curves and the stratification by gcd(d - g + 1, 2g - 2)."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import gcd

from picard_strata import balance
from picard_strata.dual_graph import DualGraph
from picard_strata.errors import ValidationError


class Method(enum.Enum):
    EXHAUSTIVE = "exhaustive"
    CRITERION = "criterion"


@dataclass(frozen=True)
class GcdInvariant:
    g: int
    d: int
    value: int

    @property
    def modulus(self) -> int:
        """(2g - 2) / G_d: the divisor of w_Z that makes a subcurve d-special."""
        return (2 * self.g - 2) // self.value


def _check_genus(g: int) -> None:
    if g < 2:
        raise ValidationError(f"genus {g} < 2")


def gcd_invariant(g: int, d: int) -> GcdInvariant:
    _check_genus(g)
    return GcdInvariant(g, d, gcd(d - g + 1, 2 * g - 2))


def is_d_general(graph: DualGraph, d: int, method: Method | str = Method.EXHAUSTIVE) -> bool:
    method = Method(method)
    if method is Method.EXHAUSTIVE:
        if not graph.is_quasistable:
            raise ValidationError("exhaustive d-generality needs a quasistable graph")
        all_rows = balance.balanced_rows(graph, d)
        return len(all_rows) == len(balance.balanced_rows(graph, d, stably_only=True))
    if not graph.is_stable:
        raise ValidationError("the divisibility criterion is only valid on stable graphs")
    modulus = gcd_invariant(graph.genus, d).modulus
    full = graph.full_mask
    for mask in graph.connected_proper_masks:
        if graph.is_connected_subset(full & ~mask) and graph.canonical_degree(mask) % modulus == 0:
            return False
    return True


def is_d_special(graph: DualGraph, d: int, method: Method | str = Method.EXHAUSTIVE) -> bool:
    return not is_d_general(graph, d, method)


@dataclass(frozen=True)
class VineGenerator:
    """Vine curve with components of genera g1, g2 meeting in k nodes."""

    g1: int
    g2: int
    k: int
    m_values: tuple[int, ...] = field(default=(), compare=False)

    def graph(self) -> DualGraph:
        return DualGraph.vine(self.g1, self.g2, self.k)

    def to_json(self) -> dict:
        return {"g1": self.g1, "g2": self.g2, "k": self.k}


def positive_degree(g: int, d: int) -> int:
    """Smallest d + n(2g - 2) that is >= 1; the gcd invariant is unchanged."""
    _check_genus(g)
    step = 2 * g - 2
    if d >= 1:
        return d
    return d + step * ((1 - d + step - 1) // step)


def enumerate_special_vine_generators(g: int, d: int) -> list[VineGenerator]:
    """Vine curves whose closures make up the d-special locus, one per unordered vine."""
    _check_genus(g)
    if d < 1:
        raise ValidationError(
            f"degree {d} < 1; reduce with positive_degree(g, d) = {positive_degree(g, d)} first")
    G = gcd_invariant(g, d).value
    step = (2 * g - 2) // G
    found: dict[tuple[int, int, int], VineGenerator] = {}
    order: list[tuple[int, int, int]] = []
    for m in range(1, G):
        w1 = step * m
        for k in range(1, min(w1 + 2, 2 * g - w1) + 1):
            if (k - w1) % 2:
                continue
            g1 = (w1 - k) // 2 + 1
            g2 = g - (w1 + k) // 2
            assert g1 + g2 + k - 1 == g and g1 >= 0 and g2 >= 0
            key = (min(g1, g2), max(g1, g2), k)
            if key in found:
                prev = found[key]
                found[key] = VineGenerator(prev.g1, prev.g2, k, prev.m_values + (m,))
            else:
                found[key] = VineGenerator(g1, g2, k, (m,))
                order.append(key)
    return [found[key] for key in order]


def stratum_containment(g: int, d: int, d2: int) -> bool:
    """Whether the d-special locus lies inside the d2-special locus."""
    return gcd_invariant(g, d2).value % gcd_invariant(g, d).value == 0


@dataclass(frozen=True)
class StratumLattice:
    """Divisors M of 2g - 2, ordered by inclusion of the d-general opens.

    The open for M sits inside the open for M' exactly when M' divides M.
    """

    g: int
    nodes: tuple[int, ...]

    @property
    def top(self) -> int:
        return 1

    @property
    def bottom(self) -> int:
        return 2 * self.g - 2

    def contained(self, M: int, M2: int) -> bool:
        self._check(M, M2)
        return M % M2 == 0

    def meet(self, M: int, M2: int) -> int:
        self._check(M, M2)
        return M * M2 // gcd(M, M2)

    def join(self, M: int, M2: int) -> int:
        self._check(M, M2)
        return gcd(M, M2)

    def degree_for(self, M: int) -> int:
        """A degree d with G_d = M."""
        self._check(M)
        return M + self.g - 1

    @property
    def covers(self) -> tuple[tuple[int, int], ...]:
        """Hasse edges (M, M'): M' | M with nothing strictly between."""
        out = []
        for M in sorted(self.nodes, reverse=True):
            for M2 in sorted(self.nodes, reverse=True):
                if M2 != M and M % M2 == 0 and not any(
                        x not in (M, M2) and M % x == 0 and x % M2 == 0 for x in self.nodes):
                    out.append((M, M2))
        return tuple(out)

    def _check(self, *ms: int) -> None:
        for M in ms:
            if M not in self.nodes:
                raise ValidationError(f"{M} is not a positive divisor of {self.bottom}")

    def to_json(self) -> dict:
        return {
            "format": 1,
            "genus": self.g,
            "nodes": list(self.nodes),
            "top": self.top,
            "bottom": self.bottom,
            "covers": [list(e) for e in self.covers],
        }

    def to_dot(self) -> str:
        lines = ["digraph strata {", "  rankdir=BT;"]
        for M in self.nodes:
            lines.append(f'  "{M}";')
        for a, b in self.covers:
            lines.append(f'  "{a}" -> "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def divisor_lattice(g: int) -> StratumLattice:
    _check_genus(g)
    n = 2 * g - 2
    return StratumLattice(g, tuple(M for M in range(1, n + 1) if n % M == 0))
