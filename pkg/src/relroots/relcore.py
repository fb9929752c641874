"""Reliability and split-reliability engines.

Four exact routes to Rel(G; q):

* definitional subset enumeration (compiled kernel, bundles weighted by
  1 - q**t / q**t),
* deletion-contraction over edge slots,
* the complete-graph recursions (memoised in a :class:`~.kncache.KnCache`),
* gadget composition Rel(G[H]) from Rel(G), Rel(H) and sRel(H).
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from . import kernels
from .errors import ContractViolation, InvalidInput, InvalidParameter, TooLarge
from .graphs import Multigraph, TwoTerminalGraph, is_connected, is_simple
from .kncache import KnCache, default_cache
from .polyalg import ONE, ComplexApprox, IntPolynomial, poly_sum_of_products

DEFAULT_SLOT_CAP = 24
MC_BLOCK = 8192

Slots = tuple[tuple[tuple[int, int], int], ...]


# -- subset enumeration -------------------------------------------------------

def _up(t: int) -> IntPolynomial:
    return ONE - IntPolynomial.monomial(t)


def _enumerate(g: Multigraph, mode: int, tu: int, tv: int, cap: int, backend: str | None) -> IntPolynomial:
    if g.slot_count > cap:
        raise TooLarge(f"{g.slot_count} edge slots exceed the brute-force cap {cap}")
    classes = sorted({t for _, t in g.slots})
    sizes = [sum(1 for _, t in g.slots if t == c) for c in classes]
    strides, acc = [], 1
    for n_c in sizes:
        strides.append(acc)
        acc *= n_c + 1
    index = {c: i for i, c in enumerate(classes)}
    ea = np.array([a for (a, _), _ in g.slots], dtype=np.int32)
    eb = np.array([b for (_, b), _ in g.slots], dtype=np.int32)
    stride = np.array([strides[index[t]] for _, t in g.slots], dtype=np.int64)
    out = np.zeros(acc, dtype=np.int64)
    kernels.get_backend(backend).subset_histogram(g.vertex_count, ea, eb, stride, out, mode, tu, tv)

    ups = [[ONE] for _ in classes]
    downs = [[ONE] for _ in classes]
    for i, (c, n_c) in enumerate(zip(classes, sizes)):
        for _ in range(n_c):
            ups[i].append(ups[i][-1] * _up(c))
            downs[i].append(downs[i][-1].shift(c))
    total = IntPolynomial()
    for idx in np.flatnonzero(out):
        term = IntPolynomial([int(out[idx])])
        rem = int(idx)
        for i, n_c in enumerate(sizes):
            k = rem % (n_c + 1)
            rem //= n_c + 1
            term = term * ups[i][k] * downs[i][n_c - k]
        total = total + term
    return total


def rel_bruteforce(g: Multigraph, cap: int = DEFAULT_SLOT_CAP, backend: str | None = None) -> IntPolynomial:
    """Rel(G) as the sum over connected spanning edge subsets."""
    if not is_connected(g):
        raise InvalidInput("reliability needs a connected graph")
    return _enumerate(g, 0, 0, 0, cap, backend)


def srel_bruteforce(h: TwoTerminalGraph, cap: int = DEFAULT_SLOT_CAP, backend: str | None = None) -> IntPolynomial:
    """sRel(H, u, v): exactly two components, terminals separated."""
    return _enumerate(h.graph, 1, h.terminal_u, h.terminal_v, cap, backend)


# -- deletion-contraction -----------------------------------------------------

def _bridge_slots(vertex_count: int, slots: Slots) -> list[int]:
    """Indices of slots whose removal disconnects the graph (iterative Tarjan)."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(vertex_count)]
    for i, ((a, b), _) in enumerate(slots):
        adj[a].append((b, i))
        adj[b].append((a, i))
    disc = [-1] * vertex_count
    low = [0] * vertex_count
    bridges = []
    timer = 0
    for root in range(vertex_count):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            v, via, it = stack[-1]
            advanced = False
            for w, eid in it:
                if eid == via:
                    continue
                if disc[w] == -1:
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append((w, eid, iter(adj[w])))
                    advanced = True
                    break
                low[v] = min(low[v], disc[w])
            if not advanced:
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    low[parent] = min(low[parent], low[v])
                    if low[v] > disc[parent]:
                        bridges.append(via)
    return bridges


def _quotient(vertex_count: int, slots: Slots, merge: Sequence[tuple[int, int]]) -> tuple[int, Slots]:
    """Identify the given vertex pairs, drop loops, merge parallel slots, relabel densely."""
    parent = list(range(vertex_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in merge:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    label: dict[int, int] = {}
    for v in range(vertex_count):
        r = find(v)
        if r not in label:
            label[r] = len(label)
    merged: dict[tuple[int, int], int] = {}
    for (a, b), t in slots:
        x, y = label[find(a)], label[find(b)]
        if x == y:
            continue
        key = (x, y) if x < y else (y, x)
        merged[key] = merged.get(key, 0) + t
    return len(label), tuple(sorted(merged.items()))


@functools.lru_cache(maxsize=1 << 17)
def _dc(vertex_count: int, slots: Slots) -> IntPolynomial:
    if vertex_count == 1:
        return ONE
    bridges = _bridge_slots(vertex_count, slots)
    if bridges:
        factor = ONE
        for i in bridges:
            factor = factor * _up(slots[i][1])
        nv, ns = _quotient(vertex_count, slots, [slots[i][0] for i in bridges])
        return factor * _dc(nv, ns)
    # every slot lies on a cycle: pivot on the heaviest bundle
    pivot = max(range(len(slots)), key=lambda i: (slots[i][1], -i))
    (a, b), t = slots[pivot]
    rest = slots[:pivot] + slots[pivot + 1:]
    contracted = _dc(*_quotient(vertex_count, rest, [(a, b)]))
    deleted = _dc(vertex_count, rest)
    return _up(t) * contracted + deleted.shift(t)


def rel_deletion_contraction(g: Multigraph) -> IntPolynomial:
    """Rel(G) by deletion-contraction, memoised on the sorted slot signature."""
    if not is_connected(g):
        raise InvalidInput("reliability needs a connected graph")
    return _dc(g.vertex_count, g.slots)


def identify_terminals(h: TwoTerminalGraph) -> Multigraph:
    nv, ns = _quotient(h.graph.vertex_count, h.graph.slots, [(h.terminal_u, h.terminal_v)])
    return Multigraph(nv, ns)


def srel_by_identification(h: TwoTerminalGraph) -> IntPolynomial:
    """sRel(H) = Rel(H with u = v) - Rel(H).

    After gluing the terminals, a surviving edge set is connected exactly
    when it was connected before or split H into the two terminal sides.
    """
    return rel_deletion_contraction(identify_terminals(h)) - rel_deletion_contraction(h.graph)


def reliability(g: Multigraph, engine: str = "auto", cap: int = DEFAULT_SLOT_CAP) -> IntPolynomial:
    if engine == "brute":
        return rel_bruteforce(g, cap)
    if engine == "dc":
        return rel_deletion_contraction(g)
    if engine != "auto":
        raise InvalidParameter(f"unknown engine {engine!r}")
    if g.slot_count <= min(cap, 20):
        return rel_bruteforce(g, cap)
    return rel_deletion_contraction(g)


# -- complete graphs ----------------------------------------------------------

def _rel_complete_step(n: int, cache: KnCache) -> IntPolynomial:
    out = [0] * (n * (n - 1) // 2 + 1)
    out[0] = 1
    for s in range(1, n):
        c = math.comb(n - 1, s - 1)
        shift = s * (n - s)
        for k, r in enumerate(cache.get("rel", s).coeffs):
            out[shift + k] -= c * r
    return IntPolynomial(out)


def rel_complete(n: int, cache: KnCache | None = None) -> IntPolynomial:
    """Rel(K_n) = 1 - sum_s C(n-1, s-1) Rel(K_s) q^{s(n-s)}."""
    if n < 1:
        raise InvalidParameter(f"K_n needs n >= 1, got {n}")
    cache = cache or default_cache()
    p = cache.get("rel", n)
    if p is not None:
        return p
    cache.get_or_compute("rel", 1, lambda: ONE)
    for k in range(2, n + 1):
        if cache.get("rel", k) is None:
            cache.get_or_compute("rel", k, lambda k=k: _rel_complete_step(k, cache))
    return cache.get("rel", n)


def _srel_complete_step(n: int, cache: KnCache) -> IntPolynomial:
    # summand for s and n-s share the product and the shift; C(n-2,s-1) = C(n-2,n-s-1)
    rel_complete(n - 1, cache)
    terms = []
    for s in range(1, n // 2 + 1):
        c = math.comb(n - 2, s - 1)
        if 2 * s != n:
            c *= 2
        a = rel_complete(s, cache)
        b = rel_complete(n - s, cache)
        terms.append((c, a, b, s * (n - s)))
    return poly_sum_of_products(terms)


def srel_complete(n: int, cache: KnCache | None = None) -> IntPolynomial:
    """sRel(K_n) = sum_s C(n-2, s-1) Rel(K_s) Rel(K_{n-s}) q^{s(n-s)}."""
    if n < 2:
        raise InvalidParameter(f"split reliability of K_n needs n >= 2, got {n}")
    cache = cache or default_cache()
    return cache.get_or_compute("srel", n, lambda: _srel_complete_step(n, cache))


# -- gadget composition -------------------------------------------------------

def _is_complete(g: Multigraph) -> bool:
    n = g.vertex_count
    return is_simple(g) and g.slot_count == n * (n - 1) // 2


def gadget_polynomials(gadget: TwoTerminalGraph, cache: KnCache | None = None) -> tuple[IntPolynomial, IntPolynomial]:
    """(Rel(H), sRel(H)) from the cheapest exact route."""
    h = gadget.graph
    if _is_complete(h):
        n = h.vertex_count
        return rel_complete(n, cache), srel_complete(n, cache)
    if h.slot_count <= 20:
        return rel_bruteforce(h), srel_bruteforce(gadget)
    return rel_deletion_contraction(h), srel_by_identification(gadget)


def compose(rel_host: IntPolynomial, edge_count: int, r: IntPolynomial, s: IntPolynomial) -> IntPolynomial:
    """sum_k rel_host[k] * s^k * (r+s)^(E-k), the homogenised Rel(G; s/(r+s))*(r+s)^E."""
    d = rel_host.degree
    if d < 0:
        return IntPolynomial()
    if d > edge_count:
        raise InvalidInput("host polynomial degree exceeds its edge count")
    t = r + s
    tpow = [ONE]
    for _ in range(d):
        tpow.append(tpow[-1] * t)
    acc = IntPolynomial([rel_host[d]])
    for k in range(d - 1, -1, -1):
        acc = acc * s + tpow[d - k] * rel_host[k]
    for _ in range(edge_count - d):
        acc = acc * t
    return acc


def rel_substituted(host: Multigraph, gadget: TwoTerminalGraph, cache: KnCache | None = None) -> IntPolynomial:
    """Rel(G[H]) from Rel(G) (deletion-contraction) and the gadget's (Rel, sRel)."""
    r, s = gadget_polynomials(gadget, cache)
    return compose(rel_deletion_contraction(host), host.edge_count, r, s)


def cycle_gadget_factor(m: int, n: int, cache: KnCache | None = None) -> IntPolynomial:
    """Rel(K_{n+1}) + m sRel(K_{n+1}); its zeros are roots of Rel(C_m[K_{n+1}])."""
    if m < 3 or n < 1:
        raise InvalidParameter(f"need m >= 3 and n >= 1, got m={m}, n={n}")
    return rel_complete(n + 1, cache) + srel_complete(n + 1, cache) * m


def rel_cycle_gadget(m: int, n: int, cache: KnCache | None = None) -> IntPolynomial:
    """Rel(C_m[K_{n+1}]) = Rel(K_{n+1})^(m-1) * (Rel(K_{n+1}) + m sRel(K_{n+1}))."""
    factor = cycle_gadget_factor(m, n, cache)
    return rel_complete(n + 1, cache) ** (m - 1) * factor


# -- point utilities ----------------------------------------------------------

def mobius_subdivision(q0: ComplexApprox) -> ComplexApprox:
    """q0 -> q0 / (2 - q0): a multigraph root becomes a root of the subdivided simple graph."""
    with mpmath.workprec(q0.precision_bits):
        z = q0.to_mpc()
        if z == 2:
            raise InvalidParameter("q0 = 2 is the pole of the subdivision map")
        w = z / (2 - z)
        return ComplexApprox(+w.real, +w.imag, q0.precision_bits)


def rel_at_minus_one(g: Multigraph, rel: IntPolynomial | None = None) -> int:
    return (rel if rel is not None else reliability(g))(-1)


def sign_at_minus_one(g: Multigraph, rel: IntPolynomial | None = None) -> int:
    """Sign of the exact integer Rel(G; -1), checked against (-1)^(|E|-|V|+1)."""
    if not is_simple(g) or not is_connected(g):
        raise InvalidInput("the sign law at -1 is stated for simple connected graphs")
    value = rel_at_minus_one(g, rel)
    if value == 0:
        raise ContractViolation(f"Rel(G; -1) = 0 for a simple graph {g!r}")
    sign = 1 if value > 0 else -1
    expected = (-1) ** ((g.edge_count - g.vertex_count + 1) % 2)
    if sign != expected:
        raise ContractViolation(f"sign of Rel(G; -1) is {sign}, expected {expected}")
    return sign


# -- Monte Carlo --------------------------------------------------------------

def _mc_block(g: Multigraph, fail: np.ndarray, block: int, size: int, seed: int, backend: str | None) -> int:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))
    alive = (rng.random((size, g.slot_count)) >= fail).view(np.uint8)
    ea = np.array([a for (a, _), _ in g.slots], dtype=np.int32)
    eb = np.array([b for (_, b), _ in g.slots], dtype=np.int32)
    return int(kernels.get_backend(backend).count_connected(g.vertex_count, ea, eb, alive))


def monte_carlo_rel(
    g: Multigraph,
    q: float,
    trials: int,
    seed: int,
    jobs: int = 1,
    backend: str | None = None,
) -> tuple[float, float]:
    """Estimate Rel(G; q) by sampling; returns (estimate, binomial standard error).

    Trials are cut into fixed blocks, each with its own spawned seed, so the
    estimate depends only on ``(seed, trials)`` and not on ``jobs``.
    """
    if trials <= 0:
        raise InvalidParameter("trials must be positive")
    if not 0 < q < 1:
        raise InvalidParameter("q must lie in (0, 1)")
    if not is_connected(g):
        raise InvalidInput("reliability needs a connected graph")
    fail = np.array([q ** t for _, t in g.slots])
    blocks = [(b, min(MC_BLOCK, trials - b * MC_BLOCK)) for b in range((trials + MC_BLOCK - 1) // MC_BLOCK)]
    run = lambda bs: _mc_block(g, fail, bs[0], bs[1], seed, backend)  # noqa: E731
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            hits = sum(pool.map(run, blocks))
    else:
        hits = sum(map(run, blocks))
    p = hits / trials
    return p, math.sqrt(p * (1 - p) / trials)


def exact_value(p: IntPolynomial, q: float) -> float:
    return float(p(Fraction(q)))
