"""Multigraphs, two-terminal gadgets, standard families and edge substitution.

Vertices are dense integer indices ``0 .. vertex_count-1``. Parallel edges are
stored once with a multiplicity, so a bundle of ``t`` edges is a single *slot*.
All objects are immutable.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidInput, InvalidParameter

Edge = tuple[int, int]


@dataclass(frozen=True)
class Multigraph:
    """Loopless multigraph; ``slots`` holds ``((a, b), multiplicity)`` with a < b, sorted."""

    vertex_count: int
    slots: tuple[tuple[Edge, int], ...]

    def __post_init__(self):
        if self.vertex_count < 1:
            raise InvalidParameter("a multigraph needs at least one vertex")
        for (a, b), t in self.slots:
            if not (0 <= a < b < self.vertex_count):
                raise InvalidInput(f"bad edge {(a, b)} for {self.vertex_count} vertices")
            if t < 1:
                raise InvalidInput(f"edge {(a, b)} has multiplicity {t}")

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Sequence[int]]) -> "Multigraph":
        """Build from ``(a, b)`` or ``(a, b, mult)`` entries; repeated pairs are merged."""
        counts: Counter = Counter()
        for e in edges:
            a, b = int(e[0]), int(e[1])
            t = int(e[2]) if len(e) > 2 else 1
            if a == b:
                raise InvalidInput(f"self-loop at vertex {a}")
            if t < 1:
                raise InvalidInput(f"edge {(a, b)} has multiplicity {t}")
            counts[(min(a, b), max(a, b))] += t
        return cls(vertex_count, tuple(sorted(counts.items())))

    @property
    def edge_count(self) -> int:
        return sum(t for _, t in self.slots)

    @property
    def slot_count(self) -> int:
        return len(self.slots)

    def edges(self) -> list[Edge]:
        """Edge list with parallel edges repeated."""
        return [e for e, t in self.slots for _ in range(t)]

    def multiplicity(self, a: int, b: int) -> int:
        key = (min(a, b), max(a, b))
        for e, t in self.slots:
            if e == key:
                return t
        return 0

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.vertex_count)]
        for (a, b), _ in self.slots:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def __repr__(self) -> str:
        return f"Multigraph(V={self.vertex_count}, E={self.edge_count}, slots={self.slot_count})"


@dataclass(frozen=True)
class TwoTerminalGraph:
    graph: Multigraph
    terminal_u: int
    terminal_v: int

    def __post_init__(self):
        n = self.graph.vertex_count
        if self.terminal_u == self.terminal_v:
            raise InvalidInput("terminals must be distinct")
        if not (0 <= self.terminal_u < n and 0 <= self.terminal_v < n):
            raise InvalidInput("terminal outside the vertex range")
        if not is_connected(self.graph):
            raise InvalidInput("a gadget must be connected")


def is_connected(g: Multigraph) -> bool:
    adj = g.adjacency()
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == g.vertex_count


def is_simple(g: Multigraph) -> bool:
    return all(t == 1 for _, t in g.slots)


def complete_graph(n: int) -> Multigraph:
    if n < 1:
        raise InvalidParameter(f"K_n needs n >= 1, got {n}")
    return Multigraph(n, tuple(((a, b), 1) for a in range(n) for b in range(a + 1, n)))


def complete_gadget(n: int) -> TwoTerminalGraph:
    """K_n with terminals 0 and 1."""
    if n < 2:
        raise InvalidParameter(f"a complete gadget needs n >= 2, got {n}")
    return TwoTerminalGraph(complete_graph(n), 0, 1)


def bundle(n: int) -> TwoTerminalGraph:
    """Two vertices joined by ``n`` parallel edges."""
    if n < 1:
        raise InvalidParameter(f"bundle needs n >= 1, got {n}")
    return TwoTerminalGraph(Multigraph(2, (((0, 1), n),)), 0, 1)


def cycle(m: int) -> Multigraph:
    if m < 3:
        raise InvalidParameter(f"cycle needs m >= 3, got {m}")
    return Multigraph.from_edges(m, [(i, (i + 1) % m) for i in range(m)])


def path(k: int) -> Multigraph:
    """Path on ``k`` vertices (P_3 has two edges)."""
    if k < 1:
        raise InvalidParameter(f"path needs k >= 1, got {k}")
    return Multigraph.from_edges(k, [(i, i + 1) for i in range(k - 1)])


def path_gadget(k: int) -> TwoTerminalGraph:
    if k < 2:
        raise InvalidParameter(f"a path gadget needs k >= 2, got {k}")
    return TwoTerminalGraph(path(k), 0, k - 1)


def star(leaves: int) -> Multigraph:
    return Multigraph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def petersen() -> Multigraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Multigraph.from_edges(10, outer + spokes + inner)


def substitute(
    host: Multigraph,
    gadget: TwoTerminalGraph,
    flipped: Iterable[int] = (),
) -> Multigraph:
    """Replace every host edge (with multiplicity) by a fresh copy of ``gadget``.

    Host edge copies are visited in slot order; copy ``i`` maps terminal_u to
    the smaller endpoint unless ``i`` is in ``flipped``. Host vertices keep
    their indices and each copy's interior vertices are appended in order.
    """
    if not is_connected(host):
        raise InvalidInput("host graph must be connected")
    flipped = set(flipped)
    h = gadget.graph
    interior = [v for v in range(h.vertex_count) if v not in (gadget.terminal_u, gadget.terminal_v)]
    next_vertex = host.vertex_count
    edges: list[tuple[int, int, int]] = []
    for i, (a, b) in enumerate(host.edges()):
        if i in flipped:
            a, b = b, a
        label = {gadget.terminal_u: a, gadget.terminal_v: b}
        for v in interior:
            label[v] = next_vertex
            next_vertex += 1
        edges.extend((label[x], label[y], t) for (x, y), t in h.slots)
    return Multigraph.from_edges(next_vertex, edges)


def cycle_of_cliques(m: int, n: int) -> Multigraph:
    """C_m[K_{n+1}]: the simple witness graph of the density construction."""
    return substitute(cycle(m), complete_gadget(n + 1))


def parse_graph_text(text: str) -> Multigraph:
    """Parse ``V E`` followed by ``E`` lines ``a b [mult]``."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InvalidInput("empty graph file")
    try:
        header = [int(x) for x in lines[0].split()]
        if len(header) != 2:
            raise ValueError
        v, e = header
        rows = [[int(x) for x in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise InvalidInput(f"malformed graph text: {exc}") from None
    if len(rows) != e:
        raise InvalidInput(f"header announces {e} edge lines, found {len(rows)}")
    for r in rows:
        if len(r) not in (2, 3):
            raise InvalidInput(f"edge line must be 'a b [mult]', got {r}")
        if not all(0 <= x < v for x in r[:2]):
            raise InvalidInput(f"edge {r[:2]} out of range for {v} vertices")
    return Multigraph.from_edges(v, rows)


def format_graph_text(g: Multigraph) -> str:
    out = [f"{g.vertex_count} {g.slot_count}"]
    for (a, b), t in g.slots:
        out.append(f"{a} {b}" if t == 1 else f"{a} {b} {t}")
    return "\n".join(out) + "\n"
