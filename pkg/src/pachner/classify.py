"""Class predicates, primitive decomposition, clique balls and dual trees,
and generators for the named triangulations used throughout the library.

Generator naming (descriptive, the CLI exposes the short option names):

* :func:`double_cone` -- two apices joined to an (n-2)-gon rim; flag for
  n >= 6 but flip-isolated among flag spheres.
* :func:`flag_target` -- the canonical flag sphere every other flag sphere
  is flipped to by :mod:`pachner.flag_path`.
* :func:`canonical_stacked_sphere` -- boundary of the stacked ball whose
  tetrahedra all share one edge; the target of :mod:`pachner.stacked_path`.
* :func:`quad_disc` -- the k-interior-vertex quadrilateral disc with a hub
  vertex below its diagonal path (the pathological region the flag path
  machinery has to resolve).
* :func:`klee` -- stellar subdivision of every triangle at once.
"""

from __future__ import annotations

from dataclasses import dataclass

from .canonical import signature
from .errors import BadSize, NotStacked
from .moves import two_move
from .sphere import Triangulation, build


# -- class predicates ----------------------------------------------------


def is_standard(t: Triangulation) -> bool:
    return t.n == 4


def is_flag(t: Triangulation) -> bool:
    """Not the standard sphere, and every 3-cycle bounds a triangle."""
    return t.n > 4 and not t.nonfacial_3cycles()


def is_stacked(t: Triangulation) -> bool:
    """Reducible to the standard sphere by repeated degree-3 removals."""
    cur = t
    while cur.n > 4:
        v = next((w for w in cur.vertices() if cur.degree(w) == 3), None)
        if v is None:
            return False
        cur = two_move(cur, v)
    return True


def is_stacked0(t: Triangulation) -> bool:
    """Stacked with no degree-4 node in the dual tree of its clique ball."""
    if not is_stacked(t):
        return False
    for tet in _four_cliques(t):
        boundary_faces = sum(
            1 for f in _faces(tet) if t.has_triangle(f))
        if boundary_faces == 0:
            return False
    return True


def is_hamiltonian(t: Triangulation) -> bool:
    """Exact backtracking search with degree-ordered branching."""
    n = t.n
    deg = {v: t.degree(v) for v in t.vertices()}
    start = min(t.vertices(), key=lambda v: (deg[v], v))
    used = [False] * (n + 1)
    used[start] = True
    order = {v: sorted(t.neighbors(v), key=lambda w: (deg[w], w))
             for v in t.vertices()}

    def extend(v, count):
        if count == n:
            return t.has_edge(v, start)
        for w in order[v]:
            if not used[w]:
                used[w] = True
                if extend(w, count + 1):
                    return True
                used[w] = False
        return False

    return extend(start, 1)


CLASS_PREDICATES = {
    "any": lambda t: True,
    "flag": is_flag,
    "stacked": is_stacked,
    "stacked0": is_stacked0,
    "hamiltonian": is_hamiltonian,
}


# -- clique balls and dual trees ----------------------------------------


Tetrahedron = tuple[int, int, int, int]


def _faces(tet: Tetrahedron):
    a, b, c, d = tet
    return ((a, b, c), (a, b, d), (a, c, d), (b, c, d))


def _four_cliques(t: Triangulation) -> list[Tetrahedron]:
    out = []
    for (u, v) in t.edges():
        common = sorted(t.neighbors(u) & t.neighbors(v))
        for i, x in enumerate(common):
            if x < v:
                continue
            for y in common[i + 1:]:
                if t.has_edge(x, y):
                    out.append((u, v, x, y))
    return out


@dataclass(frozen=True)
class CliqueBall:
    """The stacked 3-ball recovered from a stacked sphere's edge graph."""

    tetrahedra: tuple[Tetrahedron, ...]

    def boundary_triangles(self) -> list[tuple[int, int, int]]:
        count: dict[tuple[int, int, int], int] = {}
        for tet in self.tetrahedra:
            for f in _faces(tet):
                count[f] = count.get(f, 0) + 1
        return sorted(f for f, c in count.items() if c == 1)


@dataclass(frozen=True)
class DualTree:
    """Tetrahedra as nodes, arcs between tetrahedra sharing a triangle."""

    nodes: tuple[Tetrahedron, ...]
    arcs: tuple[tuple[int, int], ...]

    def degrees(self) -> list[int]:
        deg = [0] * len(self.nodes)
        for i, j in self.arcs:
            deg[i] += 1
            deg[j] += 1
        return deg

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def is_path(self) -> bool:
        return self.max_degree() <= 2

    def neighbors(self, i: int) -> list[int]:
        out = []
        for a, b in self.arcs:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return out


def clique_ball(s: Triangulation) -> CliqueBall:
    """All 4-cliques of the edge graph; exactly n-3 of them for stacked s."""
    if not is_stacked(s):
        raise NotStacked(f"{signature(s)} is not stacked")
    tets = tuple(sorted(_four_cliques(s)))
    return CliqueBall(tets)


def dual_tree(ball: CliqueBall) -> DualTree:
    nodes = tuple(sorted(ball.tetrahedra))
    arcs = []
    for i in range(len(nodes)):
        si = set(nodes[i])
        for j in range(i + 1, len(nodes)):
            if len(si & set(nodes[j])) == 3:
                arcs.append((i, j))
    return DualTree(nodes, tuple(arcs))


def sphere_dual_tree(s: Triangulation) -> DualTree:
    return dual_tree(clique_ball(s))


# -- primitive decomposition ---------------------------------------------


def primitive_components(t: Triangulation) -> list[Triangulation]:
    """Cut along nonfacial 3-cycles until every piece is flag or standard.

    Pieces are relabeled densely (order-preserving) and returned sorted by
    signature.
    """
    pieces = _cut_recursive(t.n, list(t.triangles))
    spheres = [build(k, tris) for (k, tris) in pieces]
    return sorted(spheres, key=signature)


def _cut_recursive(n, tris):
    cycle = _smallest_nonfacial_3cycle(tris)
    if cycle is None:
        return [_relabel_dense(tris)]
    u, v, w = cycle
    forbidden = {(u, v), (u, w), (v, w)}
    side_a, side_b = _split_triangles(tris, forbidden)
    out = []
    for side in (side_a, side_b):
        side = side + [cycle]
        out.extend(_cut_recursive(n, side))
    return out


def _smallest_nonfacial_3cycle(tris):
    adj: dict[int, set[int]] = {}
    tri_set = set(tris)
    for (a, b, c) in tris:
        adj.setdefault(a, set()).update((b, c))
        adj.setdefault(b, set()).update((a, c))
        adj.setdefault(c, set()).update((a, b))
    for u in sorted(adj):
        for v in sorted(adj[u]):
            if v <= u:
                continue
            for w in sorted(adj[u] & adj[v]):
                if w > v and (u, v, w) not in tri_set:
                    return (u, v, w)
    return None


def _split_triangles(tris, forbidden_edges):
    edge_owner: dict[tuple[int, int], list[int]] = {}
    for i, (a, b, c) in enumerate(tris):
        for e in ((a, b), (a, c), (b, c)):
            edge_owner.setdefault(e, []).append(i)
    seen = [False] * len(tris)
    comps = []
    for root in range(len(tris)):
        if seen[root]:
            continue
        comp = []
        stack = [root]
        seen[root] = True
        while stack:
            i = stack.pop()
            comp.append(tris[i])
            a, b, c = tris[i]
            for e in ((a, b), (a, c), (b, c)):
                if e in forbidden_edges:
                    continue
                for j in edge_owner[e]:
                    if not seen[j]:
                        seen[j] = True
                        stack.append(j)
        comps.append(comp)
    if len(comps) != 2:
        raise AssertionError(
            f"cut produced {len(comps)} parts, expected 2")
    return comps


def _relabel_dense(tris):
    verts = sorted({v for t in tris for v in t})
    relab = {v: i + 1 for i, v in enumerate(verts)}
    return len(verts), [tuple(sorted(relab[v] for v in t)) for t in tris]


# -- generators ----------------------------------------------------------


def double_cone(n: int) -> Triangulation:
    """Rim cycle 1..n-2 with both apices n-1, n joined to every rim vertex."""
    if n < 5:
        raise BadSize(f"double cone needs n >= 5, got {n}")
    rim = n - 2
    tris = []
    for apex in (n - 1, n):
        for i in range(1, rim + 1):
            j = i % rim + 1
            tris.append(tuple(sorted((i, j, apex))))
    return build(n, tris)


def flag_target(n: int) -> Triangulation:
    """The canonical n-vertex flag sphere targeted by the flag path module.

    Two quadrilaterals glued along an induced 4-cycle: a hub-and-path disc
    with three fan triangles on each side of the path, and a ladder of
    vertices each adjacent to both ends of the 4-cycle.  For n = 7 this
    coincides with the double cone.
    """
    if n < 7:
        raise BadSize(f"flag target needs n >= 7, got {n}")
    if n == 7:
        return double_cone(7)
    a0, a1, a2, a3, a, b, c = 1, 2, 3, 4, 5, 6, 7
    xs = list(range(8, n + 1))  # x_1 .. x_{n-7}
    tris = [
        (a, a0, a1), (a, a1, a2), (a, a2, a3),
        (c, a0, a1), (c, a1, a2), (c, a2, a3),
        (b, a0, c), (b, c, a3),
        (a0, a, xs[0]), (a3, a, xs[0]),
        (a0, xs[-1], b), (a3, xs[-1], b),
    ]
    for x, y in zip(xs, xs[1:]):
        tris.append((a0, x, y))
        tris.append((a3, x, y))
    return build(n, [tuple(sorted(t)) for t in tris])


@dataclass(frozen=True)
class Disc:
    """A triangulated disc with a distinguished boundary 4-cycle."""

    n: int
    triangles: tuple[tuple[int, int, int], ...]
    boundary: tuple[int, int, int, int]
    diagonal: tuple[int, ...]
    hub: int


def quad_disc(k: int) -> Disc:
    """Quadrilateral disc with diagonal path a_0..a_k, a fan apex above the
    path, a hub below it, and a two-triangle corner closing the boundary.

    Vertices: a_0..a_k are 1..k+1, the fan apex is k+2, the corner vertex is
    k+3, the hub is k+4.  Boundary 4-cycle: a_0 - apex - a_k - corner.
    """
    if k < 3:
        raise BadSize(f"quad disc needs k >= 3, got {k}")
    path = list(range(1, k + 2))
    apex, corner, hub = k + 2, k + 3, k + 4
    tris = []
    for x, y in zip(path, path[1:]):
        tris.append(tuple(sorted((apex, x, y))))
        tris.append(tuple(sorted((hub, x, y))))
    tris.append(tuple(sorted((corner, path[0], hub))))
    tris.append(tuple(sorted((corner, hub, path[-1]))))
    return Disc(
        n=k + 4,
        triangles=tuple(sorted(tris)),
        boundary=(path[0], apex, path[-1], corner),
        diagonal=tuple(path),
        hub=hub,
    )


def canonical_stacked_sphere(n: int) -> Triangulation:
    """Boundary of the stacked ball whose n-3 tetrahedra share edge (n-1, n)."""
    if n < 4:
        raise BadSize(f"need n >= 4, got {n}")
    a, b = n - 1, n
    xs = list(range(1, n - 1))
    tris = [tuple(sorted((a, b, xs[0]))), tuple(sorted((a, b, xs[-1])))]
    for x, y in zip(xs, xs[1:]):
        tris.append(tuple(sorted((a, x, y))))
        tris.append(tuple(sorted((b, x, y))))
    return build(n, tris)


def klee(s: Triangulation) -> Triangulation:
    """Stellarly subdivide every triangle of s once (never flag)."""
    tris = []
    w = s.n
    for (a, b, c) in s.triangles:
        w += 1
        tris.extend([(a, b, w), (a, c, w), (b, c, w)])
    return build(w, tris)
