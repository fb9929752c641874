"""Pure-Python/numpy versions of the compiled kernels (same signatures)."""

from __future__ import annotations

import numpy as np


def _find(parent: list[int], x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def subset_histogram(vertex_count, ea, eb, stride, out, mode, tu, tv):
    ea = [int(x) for x in ea]
    eb = [int(x) for x in eb]
    stride = [int(x) for x in stride]
    k = len(ea)
    slots = list(zip(range(k), ea, eb, stride))
    for mask in range(1 << k):
        parent = list(range(vertex_count))
        comps = vertex_count
        idx = 0
        for i, a, b, s in slots:
            if (mask >> i) & 1:
                idx += s
                ra = _find(parent, a)
                rb = _find(parent, b)
                if ra != rb:
                    parent[ra] = rb
                    comps -= 1
        if mode == 0:
            if comps == 1:
                out[idx] += 1
        elif comps == 2 and _find(parent, tu) != _find(parent, tv):
            out[idx] += 1


def count_connected(vertex_count, ea, eb, alive):
    """Vectorised over trials: min-label propagation until a fixed point."""
    alive = np.asarray(alive, dtype=bool)
    trials = alive.shape[0]
    if vertex_count == 1:
        return trials
    ea = np.asarray(ea)
    eb = np.asarray(eb)
    labels = np.tile(np.arange(vertex_count), (trials, 1))
    rows = np.arange(trials)
    while True:
        changed = False
        for i in range(len(ea)):
            on = alive[:, i]
            la = labels[:, ea[i]]
            lb = labels[:, eb[i]]
            low = np.minimum(la, lb)
            upd = on & (la != lb)
            if upd.any():
                changed = True
                r = rows[upd]
                labels[r, ea[i]] = low[upd]
                labels[r, eb[i]] = low[upd]
        if not changed:
            break
    return int(np.count_nonzero((labels == 0).all(axis=1)))
