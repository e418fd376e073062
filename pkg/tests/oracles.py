"""Brute-force reference implementations used to cross-check the library."""
from __future__ import annotations

import itertools
from collections import deque

from opencospan.finset import FinFunction, FinSet


def closure_partition(f: FinFunction, g: FinFunction) -> set[frozenset]:
    """Classes of ``m + m'`` under the equivalence generated by ``f(x) ~ g(x)``.

    Computed by repeatedly merging any two blocks linked by a generating
    pair, until nothing changes.  Elements are tagged ``("L", a)``/``("R", b)``.
    """
    blocks = [{("L", a)} for a in f.cod] + [{("R", b)} for b in g.cod]
    pairs = [(("L", f(x)), ("R", g(x))) for x in f.dom]
    changed = True
    while changed:
        changed = False
        for u, v in pairs:
            bu = next(b for b in blocks if u in b)
            bv = next(b for b in blocks if v in b)
            if bu is not bv:
                bu |= bv
                blocks.remove(bv)
                changed = True
    return {frozenset(b) for b in blocks}


def all_functions(dom, cod):
    dom, cod = list(dom), list(cod)
    for images in itertools.product(cod, repeat=len(dom)):
        yield dict(zip(dom, images))


def cocones(f: FinFunction, g: FinFunction, w: list[str]):
    """Every pair ``(h, k)`` into ``w`` with ``f;h = g;k``."""
    for h in all_functions(f.cod, w):
        for k in all_functions(g.cod, w):
            if all(h[f(x)] == k[g(x)] for x in f.dom):
                yield h, k


def shortest_run_length(net, start, target, max_depth):
    """Exhaustive depth-first enumeration of firing sequences.

    Explores every sequence of length ``<= max_depth`` (no memoisation) and
    returns the minimum length reaching ``target``, or ``None``.
    """
    best = None

    def dfs(m, depth):
        nonlocal best
        if m == target and (best is None or depth < best):
            best = depth
        if depth == max_depth or (best is not None and depth >= best):
            return
        for t in net.transitions:
            if net.src[t] <= m:
                dfs(m - net.src[t] + net.tgt[t], depth + 1)

    dfs(start, 0)
    return best


def reachable_set(net, start, max_depth):
    """All markings reachable within ``max_depth`` firings (plain BFS)."""
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        m, d = frontier.popleft()
        if d == max_depth:
            continue
        for t in net.transitions:
            if net.src[t] <= m:
                n = m - net.src[t] + net.tgt[t]
                if n not in seen:
                    seen.add(n)
                    frontier.append((n, d + 1))
    return seen


def bijections(a: FinSet, b: FinSet):
    if len(a) != len(b):
        return
    for perm in itertools.permutations(list(b)):
        yield dict(zip(a, perm))


def cospan_iso_exists(p, q) -> bool:
    """Exhaustive search for an apex bijection commuting with both legs."""
    if p.left != q.left or p.right != q.right:
        return False
    for phi in bijections(p.apex, q.apex):
        if all(phi[p.in_leg(x)] == q.in_leg(x) for x in p.left) and all(
            phi[p.out_leg(y)] == q.out_leg(y) for y in p.right
        ):
            return True
    return False
