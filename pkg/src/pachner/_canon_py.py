"""Pure Python canonical-labeling kernel.

Same contract as the compiled kernel in ``_canon_fast``: given the triangle
list of a valid triangulated 2-sphere, return the relabeled triangle list
that is lexicographically smallest (as a sorted sequence of sorted integer
triples) over every seeded traversal.  A seed is a directed edge (u, v)
together with one of the two rotation senses at u; the traversal labels
u = 1, v = 2 and numbers the remaining vertices in order of first
appearance while walking each vertex's neighbors in rotation order,
starting from the neighbor it was discovered from.

Because a triangulated 2-sphere is 3-connected and planar its embedding is
unique up to reflection, so minimizing over all 4(3n - 6) seeds is a
complete isomorphism invariant.
"""

from __future__ import annotations


def rotation_maps(n, tris):
    """Orient the triangles consistently and return (succ, pred) maps.

    ``succ[u][v]`` is the neighbor following v counterclockwise around u for
    one global orientation; ``pred`` is the other sense.
    """
    edge_owner: dict[tuple[int, int], list[int]] = {}
    for i, (a, b, c) in enumerate(tris):
        for e in ((a, b), (a, c), (b, c)):
            edge_owner.setdefault(e, []).append(i)

    m = len(tris)
    oriented = [None] * m
    oriented[0] = tris[0]
    stack = [0]
    while stack:
        i = stack.pop()
        x, y, z = oriented[i]
        for (u, v) in ((x, y), (y, z), (z, x)):
            e = (u, v) if u < v else (v, u)
            for j in edge_owner[e]:
                if j != i and oriented[j] is None:
                    w = next(t for t in tris[j] if t != u and t != v)
                    oriented[j] = (v, u, w)
                    stack.append(j)

    succ = [dict() for _ in range(n + 1)]
    pred = [dict() for _ in range(n + 1)]
    for (x, y, z) in oriented:
        succ[x][y] = z
        succ[y][z] = x
        succ[z][x] = y
        pred[x][z] = y
        pred[y][x] = z
        pred[z][y] = x
    return succ, pred


def canonical_triangles(n, tris):
    """Return the canonical relabeled triangle list (sorted tuples)."""
    tris = sorted(tuple(sorted(t)) for t in tris)
    succ, pred = rotation_maps(n, tris)
    degs = [0] * (n + 1)
    for v in range(1, n + 1):
        degs[v] = len(succ[v])

    best = None
    lab = [0] * (n + 1)
    for u in range(1, n + 1):
        for v in succ[u]:
            for table in (succ, pred):
                for i in range(n + 1):
                    lab[i] = 0
                lab[u] = 1
                lab[v] = 2
                order = [u, v]
                parent = {u: v, v: u}
                cnt = 2
                for idx in range(n):
                    x = order[idx]
                    y = parent[x]
                    row = table[x]
                    for _ in range(degs[x]):
                        if lab[y] == 0:
                            cnt += 1
                            lab[y] = cnt
                            order.append(y)
                            parent[y] = x
                        y = row[y]
                cand = sorted(
                    _pack(lab[a], lab[b], lab[c]) for (a, b, c) in tris
                )
                if best is None or cand < best:
                    best = cand
    return [_unpack(code) for code in best]


def _pack(a, b, c):
    if a > b:
        a, b = b, a
    if b > c:
        b, c = c, b
        if a > b:
            a, b = b, a
    return (a << 20) | (b << 10) | c


def _unpack(code):
    return (code >> 20, (code >> 10) & 0x3FF, code & 0x3FF)
