# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled canonical-labeling kernel.

Identical contract to ``pachner._canon_py.canonical_triangles``; see that
module for the algorithm description.  This version keeps the seeded
traversals in C arrays, which matters because enumeration at the larger
sphere sizes calls the kernel millions of times.
"""

from libc.stdlib cimport calloc, free, malloc
from libc.string cimport memcpy, memset


def canonical_triangles(int n, tris):
    """Return the canonical relabeled triangle list (sorted tuples)."""
    if n < 4 or n > 1023:
        raise ValueError("vertex count out of supported range 4..1023")
    cdef int m = len(tris)
    cdef int stride = n + 1
    cdef int i, j, k, a, b, c, u, v, w, x, y, z, e, idx, cnt, sense, deg
    cdef int code, t0, t1, t2
    cdef int has_best = 0

    cdef int *tri = <int *> malloc(3 * m * sizeof(int))
    cdef int *orient = <int *> malloc(3 * m * sizeof(int))
    cdef int *eo = <int *> calloc(2 * stride * stride, sizeof(int))
    cdef int *succ = <int *> calloc(stride * stride, sizeof(int))
    cdef int *pred = <int *> calloc(stride * stride, sizeof(int))
    cdef int *oriented = <int *> calloc(m, sizeof(int))
    cdef int *stack = <int *> malloc(m * sizeof(int))
    cdef int *lab = <int *> malloc(stride * sizeof(int))
    cdef int *order = <int *> malloc((n + 2) * sizeof(int))
    cdef int *parent = <int *> malloc(stride * sizeof(int))
    cdef int *degs = <int *> calloc(stride, sizeof(int))
    cdef int *cand = <int *> malloc(m * sizeof(int))
    cdef int *best = <int *> malloc(m * sizeof(int))
    if (tri == NULL or orient == NULL or eo == NULL or succ == NULL or
            pred == NULL or oriented == NULL or stack == NULL or
            lab == NULL or order == NULL or parent == NULL or
            degs == NULL or cand == NULL or best == NULL):
        free(tri); free(orient); free(eo); free(succ); free(pred)
        free(oriented); free(stack); free(lab); free(order); free(parent)
        free(degs); free(cand); free(best)
        raise MemoryError()

    try:
        tris = sorted(tuple(sorted(t)) for t in tris)
        for i in range(m):
            t = tris[i]
            tri[3 * i] = t[0]
            tri[3 * i + 1] = t[1]
            tri[3 * i + 2] = t[2]

        # owners of each undirected edge (two triangle indices, 1-based)
        for i in range(m):
            a = tri[3 * i]; b = tri[3 * i + 1]; c = tri[3 * i + 2]
            for k in range(3):
                if k == 0:
                    u = a; v = b
                elif k == 1:
                    u = a; v = c
                else:
                    u = b; v = c
                e = 2 * (u * stride + v)
                if eo[e] == 0:
                    eo[e] = i + 1
                else:
                    eo[e + 1] = i + 1

        # propagate a consistent orientation from the first triangle
        orient[0] = tri[0]; orient[1] = tri[1]; orient[2] = tri[2]
        oriented[0] = 1
        stack[0] = 0
        cnt = 1
        while cnt > 0:
            cnt -= 1
            i = stack[cnt]
            x = orient[3 * i]; y = orient[3 * i + 1]; z = orient[3 * i + 2]
            for k in range(3):
                if k == 0:
                    u = x; v = y
                elif k == 1:
                    u = y; v = z
                else:
                    u = z; v = x
                if u < v:
                    e = 2 * (u * stride + v)
                else:
                    e = 2 * (v * stride + u)
                for idx in range(2):
                    j = eo[e + idx] - 1
                    if j >= 0 and j != i and oriented[j] == 0:
                        a = tri[3 * j]; b = tri[3 * j + 1]; c = tri[3 * j + 2]
                        if a != u and a != v:
                            w = a
                        elif b != u and b != v:
                            w = b
                        else:
                            w = c
                        orient[3 * j] = v
                        orient[3 * j + 1] = u
                        orient[3 * j + 2] = w
                        oriented[j] = 1
                        stack[cnt] = j
                        cnt += 1

        for i in range(m):
            x = orient[3 * i]; y = orient[3 * i + 1]; z = orient[3 * i + 2]
            succ[x * stride + y] = z
            succ[y * stride + z] = x
            succ[z * stride + x] = y
            pred[x * stride + z] = y
            pred[y * stride + x] = z
            pred[z * stride + y] = x

        for u in range(1, n + 1):
            deg = 0
            for v in range(1, n + 1):
                if succ[u * stride + v] != 0:
                    deg += 1
            degs[u] = deg

        for u in range(1, n + 1):
            for v in range(1, n + 1):
                if succ[u * stride + v] == 0:
                    continue
                for sense in range(2):
                    memset(lab, 0, stride * sizeof(int))
                    lab[u] = 1
                    lab[v] = 2
                    order[0] = u
                    order[1] = v
                    parent[u] = v
                    parent[v] = u
                    cnt = 2
                    for idx in range(n):
                        x = order[idx]
                        y = parent[x]
                        deg = degs[x]
                        if sense == 0:
                            for k in range(deg):
                                if lab[y] == 0:
                                    cnt += 1
                                    lab[y] = cnt
                                    order[cnt - 1] = y
                                    parent[y] = x
                                y = succ[x * stride + y]
                        else:
                            for k in range(deg):
                                if lab[y] == 0:
                                    cnt += 1
                                    lab[y] = cnt
                                    order[cnt - 1] = y
                                    parent[y] = x
                                y = pred[x * stride + y]
                    # pack relabeled triangles and insertion-sort them
                    for i in range(m):
                        t0 = lab[tri[3 * i]]
                        t1 = lab[tri[3 * i + 1]]
                        t2 = lab[tri[3 * i + 2]]
                        if t0 > t1:
                            t0, t1 = t1, t0
                        if t1 > t2:
                            t1, t2 = t2, t1
                            if t0 > t1:
                                t0, t1 = t1, t0
                        cand[i] = (t0 << 20) | (t1 << 10) | t2
                    for i in range(1, m):
                        code = cand[i]
                        j = i - 1
                        while j >= 0 and cand[j] > code:
                            cand[j + 1] = cand[j]
                            j -= 1
                        cand[j + 1] = code
                    if has_best == 0:
                        memcpy(best, cand, m * sizeof(int))
                        has_best = 1
                    else:
                        for i in range(m):
                            if cand[i] != best[i]:
                                if cand[i] < best[i]:
                                    memcpy(best, cand, m * sizeof(int))
                                break

        out = []
        for i in range(m):
            code = best[i]
            out.append((code >> 20, (code >> 10) & 0x3FF, code & 0x3FF))
        return out
    finally:
        free(tri); free(orient); free(eo); free(succ); free(pred)
        free(oriented); free(stack); free(lab); free(order); free(parent)
        free(degs); free(cand); free(best)
